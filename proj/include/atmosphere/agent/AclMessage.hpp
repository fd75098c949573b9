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

#ifndef ATMOSPHERE_AGENT_ACLMESSAGE_HPP_
#define ATMOSPHERE_AGENT_ACLMESSAGE_HPP_

#include <atmosphere/common/Errors.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atmosphere::agent {

using Json = nlohmann::ordered_json;

enum class Performative { Inform, Request };

const char* toString(Performative p);

/// Reserved agent names handled by the gateway itself.
inline constexpr const char* kAmsAgent = "ams";
inline constexpr const char* kGatewayAgent = "gateway";

struct AclMessage {
    Performative performative = Performative::Inform;
    std::string sender;
    bool broadcast = false;
    std::vector<std::string> receivers;
    Json content = Json::object();// `_stream` plus fields
    std::int64_t sentAt = 0;
    /// Set by the gateway on the per-recipient copy it forwards.
    std::string deliveredTo;

    std::string stream() const;
    bool operator==(const AclMessage&) const = default;
};

std::string encodeAcl(const AclMessage& message);
AclMessage decodeAcl(std::string_view json);

/// 4-byte big-endian length followed by the JSON body.
std::string frameAcl(const AclMessage& message);

class AclFramer {
  public:
    static constexpr std::uint32_t kMaxFrame = 16 * 1024 * 1024;
    void append(std::string_view bytes);
    /// Throws DecodeError on an oversized or malformed frame.
    std::optional<AclMessage> next();

  private:
    std::string buffer;
};

}// namespace atmosphere::agent

#endif// ATMOSPHERE_AGENT_ACLMESSAGE_HPP_
