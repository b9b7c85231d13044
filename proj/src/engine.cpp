#include "hsmsim/engine.hpp"

#include "hsmsim/error.hpp"

#include <string>
#include <utility>

namespace hsmsim {

EntityId Engine::add_entity(Handler handler) {
    entities_.push_back(std::move(handler));
    return static_cast<EntityId>(entities_.size() - 1);
}

EventId Engine::schedule(SimTime delay, EntityId target, Payload payload) {
    if (delay < SimTime{}) {
        throw ConfigError{"schedule: negative delay " + std::to_string(delay.micros()) + "us"};
    }
    return schedule_at(now_ + delay, target, payload);
}

EventId Engine::schedule_at(SimTime at, EntityId target, Payload payload) {
    if (finalized_) {
        throw ConfigError{"schedule: engine already finalized"};
    }
    if (at < now_) {
        throw InternalError{"schedule_at: " + std::to_string(at.micros()) + "us is before now " +
                            std::to_string(now_.micros()) + "us"};
    }
    if (target >= entities_.size()) {
        throw InternalError{"schedule: unknown entity " + std::to_string(target)};
    }
    const EventId id = next_seq_++;
    queue_.push(Event{at, id, target, payload});
    live_.insert(id);
    return id;
}

bool Engine::cancel(EventId id) {
    if (live_.erase(id) == 0) {
        return false;
    }
    cancelled_.insert(id);
    ++cancelled_total_;
    return true;
}

SimTime Engine::run_until_idle() {
    while (!queue_.empty()) {
        const Event ev = queue_.top();
        queue_.pop();
        if (cancelled_.erase(ev.seq) != 0) {
            continue;
        }
        live_.erase(ev.seq);
        if (ev.fire_at < now_) {
            throw InternalError{"event queue delivered an event from the past"};
        }
        now_ = ev.fire_at;
        ++delivered_;
        if (tracing_) {
            trace_.push_back({ev.fire_at, ev.seq, ev.target, ev.payload.kind, ev.payload.arg});
        }
        entities_[ev.target](*this, ev);
    }
    finalized_ = true;
    return now_;
}

}  // namespace hsmsim
