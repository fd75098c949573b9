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

#include <atmosphere/agent/GatewayRegistry.hpp>

#include <algorithm>

namespace atmosphere::agent {

bool GatewayRegistry::registerAgent(const std::string& id, const std::string& group) {
    std::lock_guard lock(mutex);
    if (!entries.emplace(id, Entry{group, {}}).second) return false;
    order.push_back(id);
    return true;
}

void GatewayRegistry::unregisterAgent(const std::string& id) {
    std::lock_guard lock(mutex);
    entries.erase(id);
    order.erase(std::remove(order.begin(), order.end(), id), order.end());
}

bool GatewayRegistry::isRegistered(const std::string& id) const {
    std::lock_guard lock(mutex);
    return entries.count(id) > 0;
}

std::vector<std::string> GatewayRegistry::agents() const {
    std::lock_guard lock(mutex);
    return order;
}

AclMessage GatewayRegistry::undeliverable(const AclMessage& original, const std::string& receiver) {
    AclMessage notice;
    notice.performative = Performative::Inform;
    notice.sender = kAmsAgent;
    notice.receivers = {original.sender};
    notice.content = Json::object();
    notice.content["_stream"] = "Undeliverable";
    notice.content["receiver"] = receiver;
    notice.content["stream"] = original.stream();
    notice.sentAt = original.sentAt;
    return notice;
}

std::vector<std::string> GatewayRegistry::dispatch(const AclMessage& message) {
    std::lock_guard lock(mutex);
    auto sender = entries.find(message.sender);
    if (sender == entries.end()) throw UnregisteredSenderError("unregistered sender '" + message.sender + "'");
    std::vector<std::string> grown;
    if (message.broadcast) {
        for (const auto& id : order) {
            auto& entry = entries.at(id);
            if (id == message.sender || entry.group != sender->second.group) continue;
            entry.queue.push_back(message);
            grown.push_back(id);
        }
        return grown;
    }
    for (const auto& receiver : message.receivers) {
        auto it = entries.find(receiver);
        if (it == entries.end()) {
            sender->second.queue.push_back(undeliverable(message, receiver));
            grown.push_back(message.sender);
        } else {
            it->second.queue.push_back(message);
            grown.push_back(receiver);
        }
    }
    return grown;
}

std::vector<AclMessage> GatewayRegistry::drain(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = entries.find(id);
    if (it == entries.end()) return {};
    std::vector<AclMessage> out(std::make_move_iterator(it->second.queue.begin()),
                                std::make_move_iterator(it->second.queue.end()));
    it->second.queue.clear();
    return out;
}

std::size_t GatewayRegistry::queueSize(const std::string& id) const {
    std::lock_guard lock(mutex);
    auto it = entries.find(id);
    return it == entries.end() ? 0 : it->second.queue.size();
}

}// namespace atmosphere::agent
