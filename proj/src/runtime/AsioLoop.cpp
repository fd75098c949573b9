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

#include <boost/asio/executor_work_guard.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>

#include <unordered_map>

namespace atmosphere::runtime {

struct AsioLoop::Impl {
    boost::asio::io_context io;
    boost::asio::executor_work_guard<boost::asio::io_context::executor_type> guard = boost::asio::make_work_guard(io);
    std::chrono::steady_clock::time_point origin = std::chrono::steady_clock::now();
    std::int64_t originUs = std::chrono::duration_cast<std::chrono::microseconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count();
    TimerId nextId = 1;
    std::unordered_map<TimerId, std::shared_ptr<boost::asio::steady_timer>> timers;
};

AsioLoop::AsioLoop() : impl(std::make_unique<Impl>()) {}
AsioLoop::~AsioLoop() = default;

std::int64_t AsioLoop::nowUs() const {
    const auto elapsed = std::chrono::steady_clock::now() - impl->origin;
    return impl->originUs + std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count();
}

void AsioLoop::post(Task task) { boost::asio::post(impl->io, std::move(task)); }

TimerId AsioLoop::schedule(std::int64_t delayUs, Task task) {
    const auto id = impl->nextId++;
    auto timer = std::make_shared<boost::asio::steady_timer>(impl->io, std::chrono::microseconds(std::max<std::int64_t>(delayUs, 0)));
    impl->timers.emplace(id, timer);
    timer->async_wait([this, id, task = std::move(task)](const boost::system::error_code& ec) {
        if (ec) return;
        if (impl->timers.erase(id) == 0) return;
        task();
    });
    return id;
}

void AsioLoop::cancel(TimerId id) {
    auto it = impl->timers.find(id);
    if (it == impl->timers.end()) return;
    it->second->cancel();
    impl->timers.erase(it);
}

boost::asio::io_context& AsioLoop::context() { return impl->io; }

bool AsioLoop::runWhile(const std::function<bool()>& predicate, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    if (impl->io.stopped()) impl->io.restart();
    while (predicate()) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) return !predicate();
        const auto slice = std::min<std::chrono::steady_clock::duration>(deadline - now, std::chrono::milliseconds(5));
        impl->io.run_one_for(slice);
        if (impl->io.stopped()) impl->io.restart();
    }
    return true;
}

void AsioLoop::runFor(std::chrono::milliseconds duration) {
    runWhile([] { return true; }, duration);
}

void AsioLoop::stop() { impl->io.stop(); }

}// namespace atmosphere::runtime
