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

#include <atmosphere/runtime/Metrics.hpp>

namespace atmosphere::runtime {

void RunCounters::countPacket(mqtt::PacketType type) {
    switch (type) {
        case mqtt::PacketType::Publish: ++publish; break;
        case mqtt::PacketType::PubAck: ++puback; break;
        default: ++mqttOther; break;
    }
}

void RunCounters::add(const nlohmann::ordered_json& other) {
    publish += other.value("publish", std::uint64_t{0});
    puback += other.value("puback", std::uint64_t{0});
    mqttOther += other.value("mqtt_other", std::uint64_t{0});
    acl += other.value("acl", std::uint64_t{0});
    control += other.value("control", std::uint64_t{0});
}

nlohmann::ordered_json RunCounters::toJson() const {
    return {{"publish", publish.load()},
            {"puback", puback.load()},
            {"mqtt_other", mqttOther.load()},
            {"acl", acl.load()},
            {"control", control.load()}};
}

}// namespace atmosphere::runtime
