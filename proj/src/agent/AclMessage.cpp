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

#include <atmosphere/agent/AclMessage.hpp>

namespace atmosphere::agent {

const char* toString(Performative p) { return p == Performative::Inform ? "INFORM" : "REQUEST"; }

std::string AclMessage::stream() const {
    auto it = content.find("_stream");
    return it != content.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::string encodeAcl(const AclMessage& m) {
    if (!m.broadcast && m.receivers.empty()) {
        throw ValidationError("receivers", "ACL message needs receivers unless broadcast");
    }
    Json j;
    j["performative"] = toString(m.performative);
    j["sender"] = m.sender;
    if (m.broadcast) {
        j["receivers"] = "BROADCAST";
    } else {
        j["receivers"] = m.receivers;
    }
    j["content"] = m.content;
    j["sent_at"] = m.sentAt;
    if (!m.deliveredTo.empty()) j["delivered_to"] = m.deliveredTo;
    return j.dump();
}

AclMessage decodeAcl(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw DecodeError(std::string("ACL message is not JSON: ") + e.what());
    }
    auto require = [&](const char* key) -> const Json& {
        auto it = j.find(key);
        if (it == j.end()) throw DecodeError(std::string("ACL message lacks '") + key + "'");
        return *it;
    };
    AclMessage m;
    const auto& perf = require("performative");
    if (perf == "INFORM") {
        m.performative = Performative::Inform;
    } else if (perf == "REQUEST") {
        m.performative = Performative::Request;
    } else {
        throw DecodeError("unsupported performative " + perf.dump());
    }
    if (!require("sender").is_string()) throw DecodeError("sender must be a string");
    m.sender = j["sender"].get<std::string>();
    const auto& receivers = require("receivers");
    if (receivers == "BROADCAST") {
        m.broadcast = true;
    } else if (receivers.is_array() && !receivers.empty()) {
        for (const auto& r : receivers) {
            if (!r.is_string()) throw DecodeError("receiver ids must be strings");
            m.receivers.push_back(r.get<std::string>());
        }
    } else {
        throw DecodeError("receivers must be \"BROADCAST\" or a non-empty list");
    }
    if (!require("content").is_object()) throw DecodeError("content must be an object");
    m.content = j["content"];
    if (!require("sent_at").is_number_integer()) throw DecodeError("sent_at must be an integer");
    m.sentAt = j["sent_at"].get<std::int64_t>();
    if (auto it = j.find("delivered_to"); it != j.end()) {
        if (!it->is_string()) throw DecodeError("delivered_to must be a string");
        m.deliveredTo = it->get<std::string>();
    }
    return m;
}

std::string frameAcl(const AclMessage& message) {
    const std::string body = encodeAcl(message);
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(4 + body.size());
    out.push_back(static_cast<char>(n >> 24));
    out.push_back(static_cast<char>(n >> 16));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(n));
    out += body;
    return out;
}

void AclFramer::append(std::string_view bytes) { buffer.append(bytes); }

std::optional<AclMessage> AclFramer::next() {
    if (buffer.size() < 4) return std::nullopt;
    const auto* p = reinterpret_cast<const unsigned char*>(buffer.data());
    const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
    if (n > kMaxFrame) throw DecodeError("ACL frame of " + std::to_string(n) + " bytes exceeds limit");
    if (buffer.size() < 4 + std::size_t{n}) return std::nullopt;
    std::string body = buffer.substr(4, n);
    buffer.erase(0, 4 + std::size_t{n});
    return decodeAcl(body);
}

}// namespace atmosphere::agent
