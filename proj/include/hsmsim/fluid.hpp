#pragma once

#include "hsmsim/engine.hpp"
#include "hsmsim/netmodel.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hsmsim {

// Fluid transfers over shared resources. Rates are re-solved (max-min) on every
// arrival and departure; between those events every flow moves at a constant rate.
class FluidNetwork {
public:
    using FlowId = std::size_t;

    struct FlowSpec {
        double bytes = 0;
        // Evaluated at every reallocation, so caps may depend on current load.
        std::function<double()> cap;
        std::vector<std::pair<std::size_t, double>> usage;
        std::function<void(FlowId, SimTime)> on_done;
    };

    struct FlowState {
        double bytes = 0;
        double remaining = 0;
        double rate = 0;
        SimTime started;
        std::optional<SimTime> finished;
    };

    FluidNetwork(Engine &engine, std::vector<double> capacities);
    FluidNetwork(const FluidNetwork &) = delete;
    FluidNetwork &operator=(const FluidNetwork &) = delete;

    FlowId start(FlowSpec spec);

    // Re-solve rates after an external change to something a cap depends on.
    void reallocate();

    [[nodiscard]] const FlowState &flow(FlowId id) const { return state_.at(id); }
    [[nodiscard]] std::size_t flow_count() const { return state_.size(); }
    [[nodiscard]] std::size_t active_count() const;
    [[nodiscard]] double delivered_bytes() const;

private:
    void advance();
    void on_event();

    Engine &engine_;
    std::vector<double> capacities_;
    EntityId self_;
    std::vector<FlowSpec> specs_;
    std::vector<FlowState> state_;
    SimTime last_update_{};
    std::optional<EventId> pending_;
};

}  // namespace hsmsim
