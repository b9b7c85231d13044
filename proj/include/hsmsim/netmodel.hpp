#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hsmsim::net {

inline constexpr double unlimited = std::numeric_limits<double>::infinity();

struct NetPath {
    std::string label = "WAN";
    double rtt = 3.5e-3;       // seconds
    double capacity = 125e6;   // bytes/s
    double loss_rate = 0.0;    // fraction
    double loss_k = 0.0;       // penalty slope; 0 disables the loss model

    void validate() const;
};

struct Endpoint {
    std::string host;
    double tcp_buffer = 64e6;             // bytes
    double cpu_throughput_cap = 90e6;     // bytes/s

    void validate() const;
};

class TcpSession {
public:
    TcpSession(NetPath path, Endpoint sender, Endpoint receiver);

    [[nodiscard]] const NetPath &path() const { return path_; }
    [[nodiscard]] const Endpoint &sender() const { return sender_; }
    [[nodiscard]] const Endpoint &receiver() const { return receiver_; }
    [[nodiscard]] double effective_window() const;

private:
    NetPath path_;
    Endpoint sender_;
    Endpoint receiver_;
};

// window/rtt bound only, with the optional loss penalty applied.
[[nodiscard]] double window_rate(double window, const NetPath &path);

// min(window/rtt, sender cpu, receiver cpu, path capacity)
[[nodiscard]] double session_rate_unconstrained(const TcpSession &s);

// Sessions sharing one bottleneck. The shared capacity is the path capacity,
// further reduced by a common sender or receiver cpu cap when every session
// shares that endpoint.
struct FlowSet {
    std::vector<TcpSession> sessions;

    [[nodiscard]] double shared_capacity() const;
};

// Max-min fair share of one capacity among flows with individual demand caps.
[[nodiscard]] std::vector<double> water_fill(double capacity, std::span<const double> demands);
[[nodiscard]] std::vector<double> water_fill(const FlowSet &flows);

// A flow's consumption of shared resources: (resource index, coefficient).
// A coefficient of 2 means every byte crosses that resource twice.
struct FlowDemand {
    double cap = unlimited;
    std::vector<std::pair<std::size_t, double>> usage;
};

// Progressive filling over several shared resources (max-min fairness with
// per-flow caps). Ties are resolved identically for identical input.
[[nodiscard]] std::vector<double> max_min_allocate(std::span<const double> capacities,
                                                   std::span<const FlowDemand> flows);

struct NetperfPoint {
    std::string path_label;
    double buffer = 0;
    double rate = 0;
};

// Sets both endpoint buffers to each swept value and reports the single-session rate.
[[nodiscard]] std::vector<NetperfPoint> netperf_sweep(std::span<const NetPath> paths, std::span<const double> buffers,
                                                      const Endpoint &server, const Endpoint &client);

}  // namespace hsmsim::net
