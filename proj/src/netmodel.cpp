#include "hsmsim/netmodel.hpp"

#include "hsmsim/error.hpp"

#include <algorithm>
#include <cmath>

namespace hsmsim::net {

namespace {

bool positive(double v) { return v > 0 && !std::isnan(v); }

// Relative slack used when deciding that a resource or cap is exactly reached.
constexpr double tight = 1e-12;

}  // namespace

void NetPath::validate() const {
    if (!positive(rtt)) {
        throw ConfigError{"path " + label + ": rtt must be > 0"};
    }
    if (!positive(capacity)) {
        throw ConfigError{"path " + label + ": capacity must be > 0"};
    }
    if (!(loss_rate >= 0 && loss_rate < 1)) {
        throw ConfigError{"path " + label + ": loss_rate must be in [0, 1)"};
    }
    if (loss_k < 0) {
        throw ConfigError{"path " + label + ": loss_k must be >= 0"};
    }
}

void Endpoint::validate() const {
    if (!positive(tcp_buffer)) {
        throw ConfigError{"endpoint " + host + ": tcp_buffer must be > 0"};
    }
    if (!positive(cpu_throughput_cap)) {
        throw ConfigError{"endpoint " + host + ": cpu_throughput_cap must be > 0"};
    }
}

TcpSession::TcpSession(NetPath path, Endpoint sender, Endpoint receiver)
    : path_{std::move(path)}, sender_{std::move(sender)}, receiver_{std::move(receiver)} {
    path_.validate();
    sender_.validate();
    receiver_.validate();
}

double TcpSession::effective_window() const { return std::min(sender_.tcp_buffer, receiver_.tcp_buffer); }

double window_rate(double window, const NetPath &path) {
    const double raw = window / path.rtt;
    if (path.loss_k > 0 && path.loss_rate > 0) {
        return raw / (1.0 + path.loss_k * path.loss_rate);
    }
    return raw;
}

double session_rate_unconstrained(const TcpSession &s) {
    return std::min({window_rate(s.effective_window(), s.path()), s.sender().cpu_throughput_cap,
                     s.receiver().cpu_throughput_cap, s.path().capacity});
}

double FlowSet::shared_capacity() const {
    if (sessions.empty()) {
        throw ConfigError{"flow set is empty"};
    }
    double cap = sessions.front().path().capacity;
    const auto all_share = [&](auto host_of) {
        return std::all_of(sessions.begin(), sessions.end(),
                           [&](const TcpSession &s) { return host_of(s) == host_of(sessions.front()); });
    };
    if (all_share([](const TcpSession &s) { return s.sender().host; })) {
        cap = std::min(cap, sessions.front().sender().cpu_throughput_cap);
    }
    if (all_share([](const TcpSession &s) { return s.receiver().host; })) {
        cap = std::min(cap, sessions.front().receiver().cpu_throughput_cap);
    }
    return cap;
}

std::vector<double> water_fill(double capacity, std::span<const double> demands) {
    const double caps[] = {capacity};
    std::vector<FlowDemand> flows;
    flows.reserve(demands.size());
    for (double d : demands) {
        flows.push_back(FlowDemand{d, {{0, 1.0}}});
    }
    return max_min_allocate(caps, flows);
}

std::vector<double> water_fill(const FlowSet &flows) {
    std::vector<double> demands;
    demands.reserve(flows.sessions.size());
    for (const auto &s : flows.sessions) {
        demands.push_back(session_rate_unconstrained(s));
    }
    return water_fill(flows.shared_capacity(), demands);
}

std::vector<double> max_min_allocate(std::span<const double> capacities, std::span<const FlowDemand> flows) {
    for (double c : capacities) {
        if (!(c >= 0)) {
            throw ConfigError{"max_min_allocate: negative or NaN capacity"};
        }
    }
    for (const auto &f : flows) {
        if (!(f.cap >= 0)) {
            throw ConfigError{"max_min_allocate: negative or NaN flow cap"};
        }
        for (auto [r, coef] : f.usage) {
            if (r >= capacities.size() || !(coef > 0)) {
                throw ConfigError{"max_min_allocate: bad resource usage"};
            }
        }
    }

    const std::size_t n = flows.size();
    std::vector<double> rate(n, 0.0);
    std::vector<bool> frozen(n, false);
    std::vector<double> fixed_load(capacities.size(), 0.0);
    std::size_t active = n;

    // Every unfrozen flow sits at the common fill level; each round raises the
    // level to the next cap or resource saturation point and freezes what stops.
    while (active > 0) {
        std::vector<double> weight(capacities.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!frozen[i]) {
                for (auto [r, coef] : flows[i].usage) {
                    weight[r] += coef;
                }
            }
        }
        double level = unlimited;
        for (std::size_t r = 0; r < capacities.size(); ++r) {
            if (weight[r] > 0) {
                level = std::min(level, std::max(0.0, capacities[r] - fixed_load[r]) / weight[r]);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!frozen[i]) {
                level = std::min(level, flows[i].cap);
            }
        }

        std::vector<bool> saturated(capacities.size(), false);
        for (std::size_t r = 0; r < capacities.size(); ++r) {
            if (weight[r] > 0 && std::isfinite(capacities[r])) {
                const double used = fixed_load[r] + weight[r] * level;
                saturated[r] = used >= capacities[r] * (1 - tight);
            }
        }

        const std::size_t before = active;
        for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i]) {
                continue;
            }
            bool stop = flows[i].cap <= level * (1 + tight) || !std::isfinite(level);
            for (auto [r, coef] : flows[i].usage) {
                stop = stop || saturated[r];
            }
            if (stop) {
                rate[i] = std::min(level, flows[i].cap);
                frozen[i] = true;
                --active;
                for (auto [r, coef] : flows[i].usage) {
                    fixed_load[r] += coef * rate[i];
                }
            }
        }
        if (active == before) {
            throw InternalError{"max_min_allocate: fill level made no progress"};
        }
    }
    return rate;
}

std::vector<NetperfPoint> netperf_sweep(std::span<const NetPath> paths, std::span<const double> buffers,
                                        const Endpoint &server, const Endpoint &client) {
    if (buffers.empty()) {
        throw ConfigError{"netperf_sweep: empty buffer sweep"};
    }
    if (paths.empty()) {
        throw ConfigError{"netperf_sweep: no paths"};
    }
    std::vector<NetperfPoint> out;
    for (const auto &path : paths) {
        for (double buffer : buffers) {
            Endpoint s = server;
            Endpoint c = client;
            s.tcp_buffer = buffer;
            c.tcp_buffer = buffer;
            out.push_back({path.label, buffer, session_rate_unconstrained(TcpSession{path, s, c})});
        }
    }
    return out;
}

}  // namespace hsmsim::net
