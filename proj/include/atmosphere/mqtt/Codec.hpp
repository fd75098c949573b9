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

#ifndef ATMOSPHERE_MQTT_CODEC_HPP_
#define ATMOSPHERE_MQTT_CODEC_HPP_

#include <atmosphere/common/Errors.hpp>
#include <atmosphere/mqtt/Packet.hpp>

#include <cstddef>
#include <optional>
#include <span>

namespace atmosphere::mqtt {

class CodecError : public AtmosphereError {
  public:
    enum class Kind { MalformedLength, Unsupported, ProtocolViolation, Overflow };
    CodecError(Kind kind, const std::string& message) : AtmosphereError(message), errorKind(kind) {}
    Kind kind() const { return errorKind; }

  private:
    Kind errorKind;
};

inline constexpr std::uint32_t kMaxRemainingLength = 268'435'455;

/// MQTT fixed-header varint: 7 bits per byte, least significant group first.
Bytes encodeRemainingLength(std::uint32_t length);

Bytes encodePacket(const Packet& packet);

struct Decoded {
    Packet packet;
    std::size_t consumed;
};

/// Decodes one packet from the front of `input`. Returns nullopt when more bytes are needed.
std::optional<Decoded> decodePacket(std::span<const std::uint8_t> input);

/// Accumulates a byte stream and yields complete packets.
class PacketFramer {
  public:
    void append(std::span<const std::uint8_t> bytes);
    std::optional<Packet> next();
    std::size_t buffered() const { return buffer.size() - offset; }

  private:
    Bytes buffer;
    std::size_t offset = 0;
};

}// namespace atmosphere::mqtt

#endif// ATMOSPHERE_MQTT_CODEC_HPP_
