#pragma once

#include "hsmsim/data_path.hpp"
#include "hsmsim/engine.hpp"
#include "hsmsim/netmodel.hpp"
#include "hsmsim/sim_time.hpp"
#include "hsmsim/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hsmsim::proto {

// 256 KiB, the SP2-tuned buffer size; also the default mover window.
inline constexpr double default_packet = 262144;

// Mover-driven: every packet is solicited by a header round trip.
struct MoverPdata {
    double packet = default_packet;
    bool pipelined = false;  // what-if: overlap header exchanges
};
// Client-driven streaming; one round trip of setup, no per-packet exchange.
struct PdataPush {};
// Parallel FTP over the pdata mover protocol; pwidth TCP streams per file.
struct Pftp {
    std::size_t pwidth = 1;
    double packet = default_packet;
};
// Client API transfer; the request unit is min(buffer, packet).
struct ClientApi {
    double buffer = 1 << 20;
    double packet = default_packet;
};

using ProtocolKind = std::variant<MoverPdata, PdataPush, Pftp, ClientApi>;

void validate(const ProtocolKind &p);
[[nodiscard]] std::string protocol_name(const ProtocolKind &p);

enum class Overlap { serial, parallel };

struct PipelineStages {
    std::vector<double> rates;  // bytes/s; infinity for memory or /dev/null
    Overlap mode = Overlap::serial;
};

// Serial: 1/sum(1/r). Parallel: min(r).
[[nodiscard]] double serial_pipeline_rate(const PipelineStages &stages);

// ceil(size/packet) * (rtt + packet/rate)
[[nodiscard]] double pdata_transfer_time(double size, double packet, double rtt, double rate);
// rtt + ceil(size/packet) * packet/rate
[[nodiscard]] double pdata_pipelined_transfer_time(double size, double packet, double rtt, double rate);
// rtt + size/rate
[[nodiscard]] double pdata_push_transfer_time(double size, double rtt, double rate);

struct PdataRun {
    SimTime completed;
    double bytes_delivered = 0;
    std::uint64_t packets = 0;
};

// Event-level pdata exchange on an engine: a header event after each round
// trip, then a data event when the packet has crossed the bottleneck.
class PdataMachine {
public:
    struct Params {
        double size = 0;
        double packet = default_packet;
        double rtt = 0;
        double rate = 0;
        bool pipelined = false;
    };

    PdataMachine(Engine &engine, Params params, std::function<void(const PdataRun &)> on_done = {});
    PdataMachine(const PdataMachine &) = delete;
    PdataMachine &operator=(const PdataMachine &) = delete;

    void start();
    [[nodiscard]] const PdataRun &result() const { return run_; }
    [[nodiscard]] bool finished() const { return finished_; }

    enum Kind : std::uint32_t { header_exchanged = 1, packet_delivered = 2 };

private:
    void on_event(const Event &ev);
    void request_next();

    Engine &engine_;
    Params params_;
    std::function<void(const PdataRun &)> on_done_;
    EntityId self_;
    SimTime origin_{};
    double clock_ = 0;  // exact elapsed seconds since origin; the engine sees it rounded
    double remaining_ = 0;
    PdataRun run_;
    bool finished_ = false;
};

// Runs one pdata transfer on a fresh engine.
[[nodiscard]] PdataRun simulate_pdata(const PdataMachine::Params &params);

enum class EndpointKind { disk, memory, null_device, tape_file };

struct StorageEndpoint {
    EndpointKind kind = EndpointKind::disk;
    std::string host;                 // empty disk host on the mover side: round-robin over all movers
    std::optional<std::size_t> disk;  // empty: round-robin over the host's disks
};

struct TransferSpec {
    double size = 2e9;
    StorageEndpoint source{EndpointKind::disk, "", std::nullopt};
    StorageEndpoint sink{EndpointKind::null_device, "client", std::nullopt};
    ProtocolKind protocol = Pftp{};
    net::NetPath path;
    std::size_t streams = 1;  // ignored for Pftp, which uses pwidth
    DataPath data_path = Direct{};
    Overlap overlap = Overlap::serial;
    std::string label;

    [[nodiscard]] std::size_t stream_count() const;
    void validate(const Topology &topo) const;
};

struct TransferOutcome {
    std::string source;
    std::string sink;
    double bytes = 0;
    SimTime started;
    SimTime completed;
};

struct SessionResult {
    std::vector<TransferOutcome> transfers;
    SimTime makespan;
    double bytes_delivered = 0;
    double aggregate_rate = 0;  // bytes_delivered / makespan
};

// concurrent_files copies of spec start together. Mover-side disk endpoints
// without an explicit disk are assigned round-robin across movers, then disks.
[[nodiscard]] SessionResult run_pftp_session(const Topology &topo, const TransferSpec &spec,
                                             std::size_t concurrent_files);

// Same machinery with a forwarding hop through spec.data_path's relay
// host, whose NIC carries every byte twice. A relay on the source host is a
// direct transfer.
[[nodiscard]] SessionResult run_relay_transfer(const Topology &topo, const TransferSpec &spec,
                                               std::size_t concurrent_files = 1);

enum class Direction { read, write };

struct ApiPoint {
    std::string path;
    Direction direction = Direction::read;
    double buffer = 0;
    double rate = 0;
    SimTime elapsed;
};

// Client API transfer of `size` bytes between mover 0's first disk and client
// memory, for each (path, direction, buffer).
[[nodiscard]] std::vector<ApiPoint> client_api_sweep(const Topology &topo, std::span<const double> buffers,
                                                     std::span<const std::string> paths, double size = 2e9,
                                                     double packet = default_packet);

// Single client API transfer, as used by the sweep.
[[nodiscard]] ApiPoint client_api_transfer(const Topology &topo, const std::string &path, Direction dir,
                                           double buffer, double size = 2e9, double packet = default_packet);

}  // namespace hsmsim::proto
