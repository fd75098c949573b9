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

#ifndef ATMOSPHERE_AGENT_GATEWAYREGISTRY_HPP_
#define ATMOSPHERE_AGENT_GATEWAYREGISTRY_HPP_

#include <atmosphere/agent/AclMessage.hpp>

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace atmosphere::agent {

class UnregisteredSenderError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

/**
 * Per-agent FIFO inboxes. A broadcast reaches every agent of the sender's
 * group except the sender; a named receiver that is not registered produces
 * an undeliverable INFORM from `ams` back to the sender.
 */
class GatewayRegistry {
  public:
    /// Returns false if `id` is already registered.
    bool registerAgent(const std::string& id, const std::string& group = "");
    void unregisterAgent(const std::string& id);
    bool isRegistered(const std::string& id) const;
    std::vector<std::string> agents() const;

    /// Returns the agent ids whose queue grew, in enqueue order.
    std::vector<std::string> dispatch(const AclMessage& message);

    std::vector<AclMessage> drain(const std::string& id);
    std::size_t queueSize(const std::string& id) const;

    static AclMessage undeliverable(const AclMessage& original, const std::string& receiver);

  private:
    struct Entry {
        std::string group;
        std::deque<AclMessage> queue;
    };
    mutable std::mutex mutex;
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
};

}// namespace atmosphere::agent

#endif// ATMOSPHERE_AGENT_GATEWAYREGISTRY_HPP_
