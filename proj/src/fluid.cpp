#include "hsmsim/fluid.hpp"

#include "hsmsim/error.hpp"

#include <algorithm>
#include <cmath>

namespace hsmsim {

FluidNetwork::FluidNetwork(Engine &engine, std::vector<double> capacities)
    : engine_{engine}, capacities_{std::move(capacities)} {
    self_ = engine_.add_entity([this](Engine &, const Event &) { on_event(); });
    last_update_ = engine_.now();
}

std::size_t FluidNetwork::active_count() const {
    return static_cast<std::size_t>(
        std::count_if(state_.begin(), state_.end(), [](const FlowState &f) { return !f.finished; }));
}

double FluidNetwork::delivered_bytes() const {
    double sum = 0;
    for (const auto &f : state_) {
        sum += f.bytes - f.remaining;
    }
    return sum;
}

FluidNetwork::FlowId FluidNetwork::start(FlowSpec spec) {
    if (!(spec.bytes > 0)) {
        throw ConfigError{"fluid flow: size must be > 0"};
    }
    if (!spec.cap) {
        throw ConfigError{"fluid flow: missing cap function"};
    }
    advance();
    const FlowId id = specs_.size();
    state_.push_back(FlowState{spec.bytes, spec.bytes, 0.0, engine_.now(), std::nullopt});
    specs_.push_back(std::move(spec));
    reallocate();
    return id;
}

void FluidNetwork::advance() {
    const double dt = (engine_.now() - last_update_).seconds();
    if (dt > 0) {
        for (auto &f : state_) {
            if (!f.finished) {
                f.remaining = std::max(0.0, f.remaining - f.rate * dt);
            }
        }
    }
    last_update_ = engine_.now();
}

void FluidNetwork::reallocate() {
    advance();
    std::vector<FlowId> active;
    std::vector<net::FlowDemand> demands;
    for (FlowId i = 0; i < state_.size(); ++i) {
        if (!state_[i].finished) {
            active.push_back(i);
            demands.push_back(net::FlowDemand{specs_[i].cap(), specs_[i].usage});
        }
    }
    const auto rates = net::max_min_allocate(capacities_, demands);

    if (pending_) {
        engine_.cancel(*pending_);
        pending_.reset();
    }
    double soonest = net::unlimited;
    for (std::size_t k = 0; k < active.size(); ++k) {
        FlowState &f = state_[active[k]];
        f.rate = rates[k];
        if (!std::isfinite(f.rate)) {
            throw ConfigError{"fluid flow has no finite bottleneck"};
        }
        if (f.rate > 0) {
            soonest = std::min(soonest, f.remaining / f.rate);
        }
    }
    if (!active.empty()) {
        if (!std::isfinite(soonest)) {
            throw InternalError{"fluid network stalled: active flows with zero rate"};
        }
        pending_ = engine_.schedule(SimTime::from_seconds(soonest), self_, {});
    }
}

void FluidNetwork::on_event() {
    pending_.reset();
    advance();
    std::vector<FlowId> done;
    for (FlowId i = 0; i < state_.size(); ++i) {
        FlowState &f = state_[i];
        // anything within one clock tick of completion is complete
        if (!f.finished && f.remaining <= f.rate * 1e-6 + 1e-9) {
            f.remaining = 0;
            f.finished = engine_.now();
            done.push_back(i);
        }
    }
    for (FlowId i : done) {
        if (specs_[i].on_done) {
            specs_[i].on_done(i, engine_.now());
        }
    }
    reallocate();
}

}  // namespace hsmsim
