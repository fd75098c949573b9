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

#include <atmosphere/runtime/Network.hpp>

namespace atmosphere::runtime {

class SimNetwork::SimConnection : public Connection, public std::enable_shared_from_this<SimConnection> {
  public:
    SimConnection(SimNetwork& net, std::string endpoint) : net(net), endpoint(std::move(endpoint)) {}

    void send(std::string bytes) override {
        if (!open) return;
        const auto profile = net.profileFor(endpoint);
        if (net.lose(profile.lossRate)) return;
        net.loop.schedule(profile.latencyUs, [peer = peer, bytes = std::move(bytes)] {
            if (auto p = peer.lock(); p && p->open) p->deliver(bytes);
        });
    }

    void close() override {
        if (!open) return;
        open = false;
        net.loop.post([self = shared_from_this()] { self->closed(); });
        net.loop.schedule(net.profileFor(endpoint).latencyUs, [peer = peer] {
            if (auto p = peer.lock(); p && p->open) {
                p->open = false;
                p->closed();
            }
        });
    }

    bool isOpen() const override { return open; }

    SimNetwork& net;
    std::string endpoint;
    std::weak_ptr<SimConnection> peer;
    bool open = true;
};

SimNetwork::SimNetwork(EventLoop& loop, std::uint64_t seed, LinkProfile defaults)
    : loop(loop), rng(seed), defaults(defaults) {}

bool SimNetwork::lose(double rate) {
    if (rate <= 0.0) return false;
    if (std::bernoulli_distribution(rate)(rng)) {
        ++droppedSends;
        return true;
    }
    return false;
}

void SimNetwork::listen(const std::string& endpoint, AcceptHandler onAccept) { listeners[endpoint] = std::move(onAccept); }

void SimNetwork::stopListening(const std::string& endpoint) { listeners.erase(endpoint); }

LinkProfile SimNetwork::profileFor(const std::string& endpoint) const {
    auto it = profiles.find(endpoint);
    return it == profiles.end() ? defaults : it->second;
}

void SimNetwork::setProfile(const std::string& endpoint, LinkProfile profile) { profiles[endpoint] = profile; }

void SimNetwork::connect(const std::string& fromNode, const std::string& endpoint, ConnectHandler onConnect) {
    auto listener = listeners.find(endpoint);
    if (listener == listeners.end()) {
        loop.post([onConnect = std::move(onConnect), endpoint] { onConnect(nullptr, "connection refused: " + endpoint); });
        return;
    }
    auto client = std::make_shared<SimConnection>(*this, endpoint);
    auto server = std::make_shared<SimConnection>(*this, endpoint);
    client->peer = server;
    server->peer = client;
    registry.record(fromNode, endpoint);
    loop.post([accept = listener->second, server] { accept(server); });
    loop.post([onConnect = std::move(onConnect), client] { onConnect(client, ""); });
}

}// namespace atmosphere::runtime
