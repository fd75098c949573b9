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

#include <atmosphere/runtime/EventLoop.hpp>

#include <algorithm>

namespace atmosphere::runtime {

TimerId SimLoop::schedule(std::int64_t delayUs, Task task) {
    const auto id = nextId++;
    const auto due = current + std::max<std::int64_t>(delayUs, 0);
    queue.emplace(std::make_pair(due, id), std::move(task));
    dueOf.emplace(id, due);
    return id;
}

void SimLoop::cancel(TimerId id) {
    auto it = dueOf.find(id);
    if (it == dueOf.end()) return;
    queue.erase({it->second, id});
    dueOf.erase(it);
}

bool SimLoop::runOne(std::int64_t limitUs) {
    if (queue.empty() || queue.begin()->first.first > limitUs) return false;
    auto node = queue.extract(queue.begin());
    dueOf.erase(node.key().second);
    current = std::max(current, node.key().first);
    ++ran;
    node.mapped()();
    return true;
}

void SimLoop::runUntil(std::int64_t untilUs) {
    while (runOne(untilUs)) {
    }
    current = std::max(current, untilUs);
}

bool SimLoop::runWhile(const std::function<bool()>& predicate, std::int64_t deadlineUs) {
    while (predicate()) {
        if (!runOne(deadlineUs)) {
            if (queue.empty()) return !predicate();
            current = std::max(current, deadlineUs);
            return !predicate();
        }
    }
    return true;
}

}// namespace atmosphere::runtime
