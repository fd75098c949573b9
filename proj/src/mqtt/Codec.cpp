/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <atmosphere/mqtt/Codec.hpp>
#include <atmosphere/mqtt/Topic.hpp>

namespace atmosphere::mqtt {

PacketType typeOf(const Packet& packet) {
    return std::visit(
        [](const auto& p) -> PacketType {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Connect>) return PacketType::Connect;
            else if constexpr (std::is_same_v<T, ConnAck>) return PacketType::ConnAck;
            else if constexpr (std::is_same_v<T, Publish>) return PacketType::Publish;
            else if constexpr (std::is_same_v<T, PubAck>) return PacketType::PubAck;
            else if constexpr (std::is_same_v<T, Subscribe>) return PacketType::Subscribe;
            else if constexpr (std::is_same_v<T, SubAck>) return PacketType::SubAck;
            else if constexpr (std::is_same_v<T, Unsubscribe>) return PacketType::Unsubscribe;
            else if constexpr (std::is_same_v<T, UnsubAck>) return PacketType::UnsubAck;
            else if constexpr (std::is_same_v<T, PingReq>) return PacketType::PingReq;
            else if constexpr (std::is_same_v<T, PingResp>) return PacketType::PingResp;
            else return PacketType::Disconnect;
        },
        packet);
}

const char* toString(PacketType type) {
    switch (type) {
        case PacketType::Connect: return "CONNECT";
        case PacketType::ConnAck: return "CONNACK";
        case PacketType::Publish: return "PUBLISH";
        case PacketType::PubAck: return "PUBACK";
        case PacketType::Subscribe: return "SUBSCRIBE";
        case PacketType::SubAck: return "SUBACK";
        case PacketType::Unsubscribe: return "UNSUBSCRIBE";
        case PacketType::UnsubAck: return "UNSUBACK";
        case PacketType::PingReq: return "PINGREQ";
        case PacketType::PingResp: return "PINGRESP";
        case PacketType::Disconnect: return "DISCONNECT";
    }
    return "?";
}

Bytes encodeRemainingLength(std::uint32_t length) {
    if (length > kMaxRemainingLength) {
        throw CodecError(CodecError::Kind::Overflow, "remaining length exceeds 268435455");
    }
    Bytes out;
    do {
        std::uint8_t digit = length % 128;
        length /= 128;
        if (length > 0) {
            digit |= 0x80;
        }
        out.push_back(digit);
    } while (length > 0);
    return out;
}

namespace {

void putU16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void putString(Bytes& out, std::string_view s) {
    if (s.size() > 0xFFFF) {
        throw CodecError(CodecError::Kind::Overflow, "string longer than 65535 bytes");
    }
    putU16(out, static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

Bytes frame(std::uint8_t firstByte, const Bytes& body) {
    Bytes out{firstByte};
    auto length = encodeRemainingLength(static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), length.begin(), length.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

[[noreturn]] void violation(const std::string& message) { throw CodecError(CodecError::Kind::ProtocolViolation, message); }
[[noreturn]] void unsupported(const std::string& message) { throw CodecError(CodecError::Kind::Unsupported, message); }

Bytes encodeBody(const Connect& p, std::uint8_t& first) {
    first = 0x10;
    Bytes body;
    putString(body, "MQTT");
    body.push_back(0x04);
    std::uint8_t flags = p.cleanSession ? 0x02 : 0x00;
    if (p.username) flags |= 0x80;
    if (p.password) {
        if (!p.username) violation("password without username");
        flags |= 0x40;
    }
    body.push_back(flags);
    putU16(body, p.keepAliveS);
    putString(body, p.clientId);
    if (p.username) putString(body, *p.username);
    if (p.password) putString(body, *p.password);
    return body;
}

Bytes encodeBody(const ConnAck& p, std::uint8_t& first) {
    first = 0x20;
    return {static_cast<std::uint8_t>(p.sessionPresent ? 1 : 0), p.returnCode};
}

Bytes encodeBody(const Publish& p, std::uint8_t& first) {
    if (p.qos > 1) unsupported("QoS 2 is not supported");
    if (p.qos == 1 && (!p.packetId || *p.packetId == 0)) violation("QoS 1 publish requires a packet id");
    if (p.qos == 0 && p.packetId) violation("QoS 0 publish must not carry a packet id");
    if (p.qos == 0 && p.dup) violation("QoS 0 publish must not set DUP");
    if (!isValidTopicName(p.topic)) violation("invalid topic name '" + p.topic + "'");
    first = static_cast<std::uint8_t>(0x30 | (p.dup ? 0x08 : 0) | (p.qos << 1));
    Bytes body;
    putString(body, p.topic);
    if (p.qos == 1) putU16(body, *p.packetId);
    body.insert(body.end(), p.payload.begin(), p.payload.end());
    return body;
}

Bytes encodeBody(const PubAck& p, std::uint8_t& first) {
    first = 0x40;
    Bytes body;
    putU16(body, p.packetId);
    return body;
}

Bytes encodeBody(const Subscribe& p, std::uint8_t& first) {
    if (p.filters.empty()) violation("SUBSCRIBE without filters");
    first = 0x82;
    Bytes body;
    putU16(body, p.packetId);
    for (const auto& [filter, qos] : p.filters) {
        putString(body, filter);
        body.push_back(qos);
    }
    return body;
}

Bytes encodeBody(const SubAck& p, std::uint8_t& first) {
    first = 0x90;
    Bytes body;
    putU16(body, p.packetId);
    body.insert(body.end(), p.grantedQos.begin(), p.grantedQos.end());
    return body;
}

Bytes encodeBody(const Unsubscribe& p, std::uint8_t& first) {
    if (p.filters.empty()) violation("UNSUBSCRIBE without filters");
    first = 0xA2;
    Bytes body;
    putU16(body, p.packetId);
    for (const auto& filter : p.filters) putString(body, filter);
    return body;
}

Bytes encodeBody(const UnsubAck& p, std::uint8_t& first) {
    first = 0xB0;
    Bytes body;
    putU16(body, p.packetId);
    return body;
}

Bytes encodeBody(const PingReq&, std::uint8_t& first) {
    first = 0xC0;
    return {};
}
Bytes encodeBody(const PingResp&, std::uint8_t& first) {
    first = 0xD0;
    return {};
}
Bytes encodeBody(const Disconnect&, std::uint8_t& first) {
    first = 0xE0;
    return {};
}

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> data) : data(data) {}
    bool empty() const { return position == data.size(); }
    std::size_t remaining() const { return data.size() - position; }
    std::uint8_t u8() {
        if (remaining() < 1) violation("truncated packet");
        return data[position++];
    }
    std::uint16_t u16() {
        if (remaining() < 2) violation("truncated packet");
        std::uint16_t v = static_cast<std::uint16_t>((data[position] << 8) | data[position + 1]);
        position += 2;
        return v;
    }
    std::string string() {
        auto length = u16();
        if (remaining() < length) violation("truncated string");
        std::string s(reinterpret_cast<const char*>(data.data() + position), length);
        position += length;
        return s;
    }
    std::string rest() {
        std::string s(reinterpret_cast<const char*>(data.data() + position), remaining());
        position = data.size();
        return s;
    }

  private:
    std::span<const std::uint8_t> data;
    std::size_t position = 0;
};

void expectFlags(std::uint8_t flags, std::uint8_t expected, const char* name) {
    if (flags != expected) violation(std::string("invalid fixed-header flags for ") + name);
}

std::uint16_t packetIdFrom(Reader& r) {
    const auto id = r.u16();
    if (id == 0) violation("packet id 0 is not allowed");
    return id;
}

Packet decodeBody(std::uint8_t first, Reader r) {
    const std::uint8_t type = first >> 4;
    const std::uint8_t flags = first & 0x0F;
    switch (type) {
        case 1: {
            expectFlags(flags, 0, "CONNECT");
            if (r.string() != "MQTT") unsupported("only protocol name MQTT is supported");
            if (r.u8() != 0x04) unsupported("only MQTT protocol level 4 (3.1.1) is supported");
            const auto connectFlags = r.u8();
            if (connectFlags & 0x01) violation("reserved CONNECT flag set");
            if (connectFlags & 0x04) unsupported("will messages are not supported");
            Connect p;
            p.cleanSession = (connectFlags & 0x02) != 0;
            p.keepAliveS = r.u16();
            p.clientId = r.string();
            if (connectFlags & 0x80) p.username = r.string();
            if (connectFlags & 0x40) {
                if (!p.username) violation("password flag without username flag");
                p.password = r.string();
            }
            if (!r.empty()) violation("trailing bytes in CONNECT");
            return p;
        }
        case 2: {
            expectFlags(flags, 0, "CONNACK");
            ConnAck p;
            const auto ackFlags = r.u8();
            if (ackFlags > 1) violation("reserved CONNACK flags set");
            p.sessionPresent = ackFlags == 1;
            p.returnCode = r.u8();
            if (!r.empty()) violation("trailing bytes in CONNACK");
            return p;
        }
        case 3: {
            Publish p;
            p.dup = (flags & 0x08) != 0;
            p.qos = (flags >> 1) & 0x03;
            if (flags & 0x01) unsupported("retained messages are not supported");
            if (p.qos == 3) violation("invalid QoS 3");
            if (p.qos == 2) unsupported("QoS 2 is not supported");
            if (p.qos == 0 && p.dup) violation("QoS 0 publish must not set DUP");
            p.topic = r.string();
            if (!isValidTopicName(p.topic)) violation("invalid topic name '" + p.topic + "'");
            if (p.qos == 1) {
                p.packetId = r.u16();
                if (*p.packetId == 0) violation("packet id 0 is not allowed");
            }
            p.payload = r.rest();
            return p;
        }
        case 4: {
            expectFlags(flags, 0, "PUBACK");
            PubAck p{packetIdFrom(r)};
            if (!r.empty()) violation("trailing bytes in PUBACK");
            return p;
        }
        case 5:
        case 6:
        case 7: unsupported("QoS 2 handshake packets are not supported");
        case 8: {
            expectFlags(flags, 0x02, "SUBSCRIBE");
            Subscribe p;
            p.packetId = packetIdFrom(r);
            while (!r.empty()) {
                auto filter = r.string();
                auto qos = r.u8();
                if (qos > 2) violation("invalid requested QoS");
                p.filters.emplace_back(std::move(filter), qos);
            }
            if (p.filters.empty()) violation("SUBSCRIBE without filters");
            return p;
        }
        case 9: {
            expectFlags(flags, 0, "SUBACK");
            SubAck p;
            p.packetId = packetIdFrom(r);
            while (!r.empty()) p.grantedQos.push_back(r.u8());
            return p;
        }
        case 10: {
            expectFlags(flags, 0x02, "UNSUBSCRIBE");
            Unsubscribe p;
            p.packetId = packetIdFrom(r);
            while (!r.empty()) p.filters.push_back(r.string());
            if (p.filters.empty()) violation("UNSUBSCRIBE without filters");
            return p;
        }
        case 11: {
            expectFlags(flags, 0, "UNSUBACK");
            UnsubAck p{packetIdFrom(r)};
            if (!r.empty()) violation("trailing bytes in UNSUBACK");
            return p;
        }
        case 12:
            expectFlags(flags, 0, "PINGREQ");
            if (!r.empty()) violation("PINGREQ has no body");
            return PingReq{};
        case 13:
            expectFlags(flags, 0, "PINGRESP");
            if (!r.empty()) violation("PINGRESP has no body");
            return PingResp{};
        case 14:
            expectFlags(flags, 0, "DISCONNECT");
            if (!r.empty()) violation("DISCONNECT has no body");
            return Disconnect{};
        default: unsupported("reserved packet type " + std::to_string(type));
    }
}

}// namespace

Bytes encodePacket(const Packet& packet) {
    std::uint8_t first = 0;
    Bytes body = std::visit([&](const auto& p) { return encodeBody(p, first); }, packet);
    return frame(first, body);
}

std::optional<Decoded> decodePacket(std::span<const std::uint8_t> input) {
    if (input.size() < 2) {
        return std::nullopt;
    }
    std::uint32_t length = 0;
    std::uint32_t multiplier = 1;
    std::size_t index = 1;
    while (true) {
        if (index > 4) {
            throw CodecError(CodecError::Kind::MalformedLength, "remaining length longer than 4 bytes");
        }
        if (index >= input.size()) {
            return std::nullopt;
        }
        const std::uint8_t digit = input[index++];
        length += (digit & 0x7F) * multiplier;
        if ((digit & 0x80) == 0) {
            break;
        }
        multiplier *= 128;
    }
    if (input.size() - index < length) {
        return std::nullopt;
    }
    Reader reader(input.subspan(index, length));
    return Decoded{decodeBody(input[0], reader), index + length};
}

void PacketFramer::append(std::span<const std::uint8_t> bytes) {
    if (offset > 0 && offset == buffer.size()) {
        buffer.clear();
        offset = 0;
    }
    buffer.insert(buffer.end(), bytes.begin(), bytes.end());
}

std::optional<Packet> PacketFramer::next() {
    auto decoded = decodePacket(std::span<const std::uint8_t>(buffer).subspan(offset));
    if (!decoded) {
        if (offset > 4096 && offset * 2 > buffer.size()) {
            buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(offset));
            offset = 0;
        }
        return std::nullopt;
    }
    offset += decoded->consumed;
    return std::move(decoded->packet);
}

}// namespace atmosphere::mqtt
