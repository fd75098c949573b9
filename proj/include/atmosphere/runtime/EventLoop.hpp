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

#ifndef ATMOSPHERE_RUNTIME_EVENTLOOP_HPP_
#define ATMOSPHERE_RUNTIME_EVENTLOOP_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>

namespace boost::asio {
class io_context;
}

namespace atmosphere::runtime {

using Task = std::function<void()>;
using TimerId = std::uint64_t;

/**
 * Single-threaded executor shared by every node of a run. Time is in
 * microseconds since the Unix epoch.
 */
class EventLoop {
  public:
    virtual ~EventLoop() = default;
    virtual std::int64_t nowUs() const = 0;
    std::int64_t nowMs() const { return nowUs() / 1000; }
    virtual void post(Task task) = 0;
    virtual TimerId schedule(std::int64_t delayUs, Task task) = 0;
    virtual void cancel(TimerId id) = 0;
};

/// Virtual time; tasks due at the same instant run in submission order.
class SimLoop : public EventLoop {
  public:
    explicit SimLoop(std::int64_t startUs = 0) : current(startUs) {}

    std::int64_t nowUs() const override { return current; }
    void post(Task task) override { schedule(0, std::move(task)); }
    TimerId schedule(std::int64_t delayUs, Task task) override;
    void cancel(TimerId id) override;

    /// Runs every task due at or before `untilUs`, then sets the clock to it.
    void runUntil(std::int64_t untilUs);
    /// Runs tasks while `predicate` holds and tasks remain before `deadlineUs`; returns true once it no longer holds.
    bool runWhile(const std::function<bool()>& predicate, std::int64_t deadlineUs);
    bool idle() const { return queue.empty(); }
    std::size_t pending() const { return queue.size(); }
    std::uint64_t executed() const { return ran; }

  private:
    bool runOne(std::int64_t limitUs);

    std::int64_t current;
    TimerId nextId = 1;
    std::uint64_t ran = 0;
    std::map<std::pair<std::int64_t, TimerId>, Task> queue;
    std::map<TimerId, std::int64_t> dueOf;
};

/// Wall-clock loop over boost::asio. Time is the wall clock at construction plus monotonic elapsed time.
class AsioLoop : public EventLoop {
  public:
    AsioLoop();
    ~AsioLoop() override;

    std::int64_t nowUs() const override;
    void post(Task task) override;
    TimerId schedule(std::int64_t delayUs, Task task) override;
    void cancel(TimerId id) override;

    boost::asio::io_context& context();
    /// Runs handlers while `predicate` holds, at most `timeout`; returns true once it no longer holds.
    bool runWhile(const std::function<bool()>& predicate, std::chrono::milliseconds timeout);
    void runFor(std::chrono::milliseconds duration);
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl;
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_EVENTLOOP_HPP_
