#pragma once

#include "hsmsim/sim_time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

namespace hsmsim {

using EntityId = std::uint32_t;
using EventId = std::uint64_t;

// What an event means is up to the receiving entity; the engine only orders and delivers it.
struct Payload {
    std::uint32_t kind = 0;
    std::uint64_t arg = 0;
};

struct Event {
    SimTime fire_at;
    std::uint64_t seq = 0;
    EntityId target = 0;
    Payload payload;
};

// One delivered event, as recorded in the optional trace.
struct TraceRecord {
    SimTime fire_at;
    std::uint64_t seq;
    EntityId target;
    std::uint32_t kind;
    std::uint64_t arg;

    friend bool operator==(const TraceRecord &, const TraceRecord &) = default;
};

// Deterministic sequential discrete-event engine. Events are delivered in
// (fire_at, seq) order, so equal-time events fire in the order they were scheduled.
class Engine {
public:
    using Handler = std::function<void(Engine &, const Event &)>;

    Engine() = default;
    Engine(const Engine &) = delete;
    Engine &operator=(const Engine &) = delete;

    EntityId add_entity(Handler handler);

    // Throws ConfigError on a negative delay or after run_until_idle() has finished.
    EventId schedule(SimTime delay, EntityId target, Payload payload);
    // Absolute-time variant; a time before now() is an InternalError.
    EventId schedule_at(SimTime at, EntityId target, Payload payload);

    // Returns false if the event was already delivered or cancelled.
    bool cancel(EventId id);

    SimTime run_until_idle();

    [[nodiscard]] SimTime now() const { return now_; }
    [[nodiscard]] std::size_t pending() const { return queue_.size() - cancelled_.size(); }
    [[nodiscard]] std::uint64_t delivered() const { return delivered_; }
    [[nodiscard]] std::uint64_t cancelled_count() const { return cancelled_total_; }
    [[nodiscard]] std::uint64_t scheduled_count() const { return next_seq_; }

    void enable_trace(bool on = true) { tracing_ = on; }
    [[nodiscard]] const std::vector<TraceRecord> &trace() const { return trace_; }

private:
    struct Later {
        bool operator()(const Event &a, const Event &b) const {
            if (a.fire_at != b.fire_at) {
                return a.fire_at > b.fire_at;
            }
            return a.seq > b.seq;
        }
    };

    SimTime now_{};
    std::uint64_t next_seq_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t cancelled_total_ = 0;
    bool finalized_ = false;
    bool tracing_ = false;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<EventId> cancelled_;
    std::unordered_set<EventId> live_;
    std::vector<Handler> entities_;
    std::vector<TraceRecord> trace_;
};

}  // namespace hsmsim
