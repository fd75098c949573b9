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

std::string nodeOfEndpoint(const std::string& endpoint) { return endpoint.substr(0, endpoint.find(':')); }

void ConnectionRegistry::record(const std::string& fromNode, const std::string& endpoint) {
    std::lock_guard lock(mutex);
    records.push_back({fromNode, nodeOfEndpoint(endpoint), endpoint});
}

std::vector<ConnectionRecord> ConnectionRegistry::all() const {
    std::lock_guard lock(mutex);
    return records;
}

void connectWithRetry(EventLoop& loop, Network& network, const std::string& fromNode, const std::string& endpoint,
                      int attempts, std::int64_t delayUs, ConnectHandler onConnect) {
    network.connect(fromNode, endpoint,
                    [&loop, &network, fromNode, endpoint, attempts, delayUs, onConnect](ConnectionPtr c, const std::string& error) {
                        if (c || attempts <= 1) {
                            onConnect(std::move(c), error);
                            return;
                        }
                        loop.schedule(delayUs, [&loop, &network, fromNode, endpoint, attempts, delayUs, onConnect] {
                            connectWithRetry(loop, network, fromNode, endpoint, attempts - 1, delayUs, onConnect);
                        });
                    });
}

}// namespace atmosphere::runtime
