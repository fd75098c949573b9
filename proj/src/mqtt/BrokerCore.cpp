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

#include <atmosphere/mqtt/BrokerCore.hpp>
#include <atmosphere/mqtt/Topic.hpp>

#include <algorithm>

namespace atmosphere::mqtt {

BrokerCore::BrokerCore(BrokerConfig config) : brokerConfig(std::move(config)) {}

BrokerCore::ConnectResult BrokerCore::connect(const Connect& connect, std::int64_t nowMs) {
    ConnectResult result;
    result.clientId = connect.clientId;
    if (result.clientId.empty()) {
        result.clientId = "auto-" + std::to_string(++generatedIds);
    }
    if (brokerConfig.authenticate && !brokerConfig.authenticate(connect)) {
        result.actions.emplace_back(action::Send{result.clientId, ConnAck{false, 5}});
        result.actions.emplace_back(action::Drop{result.clientId, "not authorized"});
        return result;
    }
    if (auto it = sessions.find(result.clientId); it != sessions.end() && !it->second.local) {
        // Session takeover: the previous connection with the same id is closed.
        result.actions.emplace_back(action::Drop{result.clientId, "session taken over"});
        sessions.erase(it);
    }
    Session session;
    session.clientId = result.clientId;
    sessions.emplace(result.clientId, std::move(session));
    result.actions.emplace_back(action::Send{result.clientId, ConnAck{false, 0}});
    result.accepted = true;
    return result;
}

std::vector<Action> BrokerCore::handlePacket(const std::string& clientId, const Packet& packet, std::int64_t nowMs) {
    auto it = sessions.find(clientId);
    if (it == sessions.end()) {
        return {action::Drop{clientId, "packet before CONNECT"}};
    }
    Session& session = it->second;
    std::vector<Action> out;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Publish>) {
                out = handlePublish(clientId, p, nowMs);
            } else if constexpr (std::is_same_v<T, PubAck>) {
                session.inflight.acknowledge(p.packetId);
            } else if constexpr (std::is_same_v<T, Subscribe>) {
                SubAck ack{p.packetId, {}};
                for (const auto& [filter, qos] : p.filters) {
                    if (!isValidTopicFilter(filter)) {
                        ack.grantedQos.push_back(SubAck::kFailure);
                        continue;
                    }
                    const std::uint8_t granted = std::min<std::uint8_t>(qos, 1);
                    session.subscriptions[filter] = granted;
                    ack.grantedQos.push_back(granted);
                }
                out.emplace_back(action::Send{clientId, std::move(ack)});
            } else if constexpr (std::is_same_v<T, Unsubscribe>) {
                for (const auto& filter : p.filters) {
                    session.subscriptions.erase(filter);
                }
                out.emplace_back(action::Send{clientId, UnsubAck{p.packetId}});
            } else if constexpr (std::is_same_v<T, PingReq>) {
                out.emplace_back(action::Send{clientId, PingResp{}});
            } else if constexpr (std::is_same_v<T, Disconnect>) {
                sessions.erase(it);
                out.emplace_back(action::Drop{clientId, "client disconnected"});
            } else {
                sessions.erase(it);
                out.emplace_back(action::Drop{clientId, "protocol violation: unexpected packet from client"});
            }
        },
        packet);
    return out;
}

std::vector<Action> BrokerCore::handlePublish(const std::string& publisherId, const Publish& publish, std::int64_t nowMs) {
    std::vector<Action> out;
    auto it = sessions.find(publisherId);
    if (it == sessions.end()) {
        out.emplace_back(action::Drop{publisherId, "publish before CONNECT"});
        return out;
    }
    if (publish.qos == 1) {
        const auto id = publish.packetId.value_or(0);
        out.emplace_back(action::Send{publisherId, PubAck{id}});
        auto& recent = it->second.recentlyReceived;
        // A redelivery (DUP) of an id we already accepted is acknowledged again but not forwarded.
        if (publish.dup && recent.contains(id)) {
            recent[id] = nowMs;
            return out;
        }
        recent[id] = nowMs;
    }
    auto forwarded = forward(publish, nowMs);
    out.insert(out.end(), std::make_move_iterator(forwarded.begin()), std::make_move_iterator(forwarded.end()));
    return out;
}

std::vector<Action> BrokerCore::forward(const Publish& publish, std::int64_t nowMs) {
    std::vector<Action> out;
    for (auto& [clientId, session] : sessions) {
        int best = -1;
        for (const auto& [filter, qos] : session.subscriptions) {
            if (matchTopic(filter, publish.topic)) {
                best = std::max<int>(best, qos);
            }
        }
        if (best < 0) {
            continue;
        }
        const auto qos = static_cast<std::uint8_t>(std::min<int>(best, publish.qos));
        if (session.local) {
            out.emplace_back(action::LocalDeliver{clientId, publish.topic, publish.payload});
            continue;
        }
        Publish copy{publish.topic, publish.payload, qos, std::nullopt, false};
        if (qos == 1) {
            auto id = session.inflight.add(copy, nowMs);
            if (!id) {
                out.emplace_back(action::Drop{clientId, "inflight window exhausted"});
                continue;
            }
            copy.packetId = id;
        }
        out.emplace_back(action::Send{clientId, std::move(copy)});
    }
    return out;
}

void BrokerCore::disconnect(const std::string& clientId) {
    auto it = sessions.find(clientId);
    if (it != sessions.end() && !it->second.local) {
        sessions.erase(it);
    }
}

void BrokerCore::retransmitSession(Session& session, std::int64_t nowMs, std::vector<Action>& out) {
    auto result = session.inflight.tick(nowMs, brokerConfig.retry);
    for (auto& publish : result.resend) {
        out.emplace_back(action::Send{session.clientId, std::move(publish)});
    }
    if (result.exhausted) {
        out.emplace_back(action::Drop{session.clientId, "retries exhausted"});
    }
}

std::vector<Action> BrokerCore::retransmitTick(std::int64_t nowMs) {
    std::vector<Action> out;
    std::vector<std::string> dropped;
    for (auto& [clientId, session] : sessions) {
        auto before = out.size();
        retransmitSession(session, nowMs, out);
        if (out.size() > before && std::holds_alternative<action::Drop>(out.back())) {
            dropped.push_back(clientId);
        }
        std::erase_if(session.recentlyReceived,
                      [&](const auto& entry) { return nowMs - entry.second > brokerConfig.duplicateWindowMs; });
    }
    for (const auto& clientId : dropped) {
        sessions.erase(clientId);
    }
    return out;
}

std::optional<std::int64_t> BrokerCore::nextRetransmitDeadline() const {
    std::optional<std::int64_t> earliest;
    for (const auto& [clientId, session] : sessions) {
        if (auto due = session.inflight.nextDeadline(brokerConfig.retry)) {
            earliest = earliest ? std::min(*earliest, *due) : *due;
        }
    }
    return earliest;
}

void BrokerCore::subscribeLocal(const std::string& subscriberId, const std::string& filter) {
    auto& session = sessions[subscriberId];
    session.clientId = subscriberId;
    session.local = true;
    session.subscriptions[filter] = 1;
}

std::vector<Action> BrokerCore::publishLocal(const std::string& topic, std::string payload, std::uint8_t qos,
                                             std::int64_t nowMs) {
    return forward(Publish{topic, std::move(payload), qos, std::nullopt, false}, nowMs);
}

const Session* BrokerCore::session(const std::string& clientId) const {
    auto it = sessions.find(clientId);
    return it == sessions.end() ? nullptr : &it->second;
}

std::size_t BrokerCore::inflightCount() const {
    std::size_t total = 0;
    for (const auto& [id, session] : sessions) {
        total += session.inflight.size();
    }
    return total;
}

}// namespace atmosphere::mqtt
