#include "hsmsim/protocols.hpp"

#include "hsmsim/error.hpp"
#include "hsmsim/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace hsmsim::proto {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double packets_for(double size, double packet) { return std::ceil(size / packet); }

void require_positive(double v, const char *what) {
    if (!(v > 0)) {
        throw ConfigError{std::string{what} + " must be > 0"};
    }
}

}  // namespace

void validate(const ProtocolKind &p) {
    std::visit(overloaded{
                   [](const MoverPdata &m) { require_positive(m.packet, "pdata packet"); },
                   [](const PdataPush &) {},
                   [](const Pftp &f) {
                       require_positive(f.packet, "pftp packet");
                       if (f.pwidth == 0) {
                           throw ConfigError{"pftp pwidth must be >= 1"};
                       }
                   },
                   [](const ClientApi &c) {
                       require_positive(c.buffer, "client API buffer");
                       require_positive(c.packet, "client API packet");
                   },
               },
               p);
}

std::string protocol_name(const ProtocolKind &p) {
    return std::visit(overloaded{
                          [](const MoverPdata &) { return std::string{"pdata"}; },
                          [](const PdataPush &) { return std::string{"pdata-push"}; },
                          [](const Pftp &) { return std::string{"pftp"}; },
                          [](const ClientApi &) { return std::string{"client-api"}; },
                      },
                      p);
}

double serial_pipeline_rate(const PipelineStages &stages) {
    if (stages.rates.empty()) {
        throw ConfigError{"pipeline needs at least one stage"};
    }
    for (double r : stages.rates) {
        require_positive(r, "pipeline stage rate");
    }
    if (stages.mode == Overlap::parallel) {
        return *std::min_element(stages.rates.begin(), stages.rates.end());
    }
    double inverse = 0;
    for (double r : stages.rates) {
        inverse += 1.0 / r;  // 1/inf contributes nothing
    }
    return 1.0 / inverse;
}

double pdata_transfer_time(double size, double packet, double rtt, double rate) {
    return packets_for(size, packet) * (rtt + packet / rate);
}

double pdata_pipelined_transfer_time(double size, double packet, double rtt, double rate) {
    return rtt + packets_for(size, packet) * (packet / rate);
}

double pdata_push_transfer_time(double size, double rtt, double rate) { return rtt + size / rate; }

PdataMachine::PdataMachine(Engine &engine, Params params, std::function<void(const PdataRun &)> on_done)
    : engine_{engine}, params_{params}, on_done_{std::move(on_done)} {
    require_positive(params_.size, "pdata size");
    require_positive(params_.packet, "pdata packet");
    require_positive(params_.rate, "pdata bottleneck rate");
    if (!(params_.rtt >= 0)) {
        throw ConfigError{"pdata rtt must be >= 0"};
    }
    self_ = engine_.add_entity([this](Engine &, const Event &ev) { on_event(ev); });
}

void PdataMachine::start() {
    origin_ = engine_.now();
    clock_ = 0;
    remaining_ = params_.size;
    run_ = {};
    finished_ = false;
    request_next();
}

void PdataMachine::request_next() {
    clock_ += params_.rtt;
    engine_.schedule_at(origin_ + SimTime::from_seconds(clock_), self_, {header_exchanged, run_.packets});
}

void PdataMachine::on_event(const Event &ev) {
    switch (ev.payload.kind) {
        case header_exchanged:
            clock_ += params_.packet / params_.rate;
            engine_.schedule_at(origin_ + SimTime::from_seconds(clock_), self_, {packet_delivered, run_.packets});
            break;
        case packet_delivered: {
            const double chunk = std::min(params_.packet, remaining_);
            remaining_ -= chunk;
            run_.bytes_delivered += chunk;
            ++run_.packets;
            if (remaining_ <= 0) {
                finished_ = true;
                run_.completed = engine_.now() - origin_;
                if (on_done_) {
                    on_done_(run_);
                }
            } else if (params_.pipelined) {
                clock_ += params_.packet / params_.rate;
                engine_.schedule_at(origin_ + SimTime::from_seconds(clock_), self_,
                                    {packet_delivered, run_.packets});
            } else {
                request_next();
            }
            break;
        }
        default:
            throw InternalError{"pdata machine: unknown event kind"};
    }
}

PdataRun simulate_pdata(const PdataMachine::Params &params) {
    Engine engine;
    PdataMachine machine{engine, params};
    machine.start();
    engine.run_until_idle();
    if (!machine.finished()) {
        throw InternalError{"pdata machine did not finish"};
    }
    return machine.result();
}

std::size_t TransferSpec::stream_count() const {
    if (const auto *f = std::get_if<Pftp>(&protocol)) {
        return f->pwidth;
    }
    return streams;
}

void TransferSpec::validate(const Topology &topo) const {
    require_positive(size, "transfer size");
    proto::validate(protocol);
    path.validate();
    if (stream_count() == 0) {
        throw ConfigError{"transfer needs at least one stream"};
    }
    for (const StorageEndpoint *e : {&source, &sink}) {
        if (e->kind == EndpointKind::tape_file) {
            throw ConfigError{"tape endpoints are served by the tape library model, not a network session"};
        }
        if (!e->host.empty() && !topo.has_host(e->host)) {
            throw ScenarioError{"transfer references unknown host '" + e->host + "'"};
        }
    }
    if (sink.kind == EndpointKind::null_device && source.kind == EndpointKind::null_device) {
        throw ConfigError{"transfer from /dev/null to /dev/null"};
    }
    if (const auto *r = std::get_if<Relay>(&data_path)) {
        if (!topo.has_host(r->via) || r->via == topo.core_host) {
            throw ScenarioError{"relay host '" + r->via + "' is not a data-capable host"};
        }
    }
}

namespace {

struct ResolvedEnd {
    const HostSpec *host = nullptr;
    EndpointKind kind = EndpointKind::memory;
    const storage::Disk *disk = nullptr;
};

ResolvedEnd resolve(const Topology &topo, const StorageEndpoint &e, std::size_t file, bool mover_side) {
    ResolvedEnd out;
    out.kind = e.kind;
    if (e.host.empty()) {
        if (!mover_side) {
            out.host = &topo.client;
        } else {
            out.host = &topo.movers[file % topo.movers.size()];
            file /= topo.movers.size();
        }
    } else {
        out.host = &topo.host(e.host);
    }
    if (e.kind == EndpointKind::disk) {
        if (out.host->disks.empty()) {
            throw ScenarioError{"host '" + out.host->name + "' has no disks"};
        }
        const std::size_t idx = e.disk ? *e.disk : file % out.host->disks.size();
        if (idx >= out.host->disks.size()) {
            throw ScenarioError{"host '" + out.host->name + "' has no disk " + std::to_string(idx)};
        }
        out.disk = &out.host->disks[idx];
    }
    return out;
}

std::string describe(const ResolvedEnd &e) {
    switch (e.kind) {
        case EndpointKind::disk:
            return e.disk->id;
        case EndpointKind::memory:
            return e.host->name + ":memory";
        case EndpointKind::null_device:
            return e.host->name + ":/dev/null";
        case EndpointKind::tape_file:
            break;
    }
    return e.host->name + ":tape";
}

// Per-file rate ceiling at the current disk load: the network stage under the
// protocol, combined with the disk stages by the overlap mode.
struct FileRateModel {
    const TransferSpec *spec = nullptr;
    const storage::Disk *source_disk = nullptr;
    const storage::Disk *sink_disk = nullptr;
    const std::map<const storage::Disk *, std::size_t> *load = nullptr;
    struct Leg {
        double window = 0;
        double shared_cap = 0;
    };
    // one leg direct; two through a relay, which forwards as it receives
    std::vector<Leg> legs;

    [[nodiscard]] double streams_sum(double shared_cap, double per_stream) const {
        const std::vector<double> demands(spec->stream_count(), per_stream);
        double sum = 0;
        for (double r : net::water_fill(shared_cap, demands)) {
            sum += r;
        }
        return sum;
    }

    [[nodiscard]] double disk_rate(const storage::Disk *d) const {
        if (d == nullptr) {
            return net::unlimited;
        }
        return storage::disk_stream_rate(*d, std::max<std::size_t>(1, load->at(d)));
    }

    [[nodiscard]] double leg_rate(const Leg &leg) const {
        const double window = leg.window;
        const double rtt = spec->path.rtt;
        const auto k = static_cast<double>(spec->stream_count());
        const auto solicited = [&](double unit, bool pipelined) {
            // a chunk that fits in one window is not window-limited; the round trip is charged per request
            const double chunk = unit / k;
            const double r =
                streams_sum(leg.shared_cap, chunk > window ? net::window_rate(window, spec->path) : net::unlimited);
            return pipelined ? r : unit / (rtt + unit / r);
        };
        return std::visit(overloaded{
                              [&](const MoverPdata &m) { return solicited(m.packet, m.pipelined); },
                              [&](const Pftp &f) { return solicited(f.packet, false); },
                              [&](const ClientApi &c) { return solicited(std::min(c.buffer, c.packet), false); },
                              [&](const PdataPush &) {
                                  return streams_sum(leg.shared_cap, net::window_rate(window, spec->path));
                              },
                          },
                          spec->protocol);
    }

    [[nodiscard]] double network_rate() const {
        std::vector<double> rates;
        for (const Leg &l : legs) {
            rates.push_back(leg_rate(l));
        }
        return serial_pipeline_rate({rates, Overlap::parallel});
    }

    [[nodiscard]] double operator()() const {
        return serial_pipeline_rate({{disk_rate(source_disk), network_rate(), disk_rate(sink_disk)}, spec->overlap});
    }
};

SessionResult run_session(const Topology &topo, const TransferSpec &spec, std::size_t files) {
    if (files == 0) {
        throw ConfigError{"concurrent file count must be >= 1"};
    }
    spec.validate(topo);

    const bool reading = spec.source.kind == EndpointKind::disk &&
                         (spec.source.host.empty() || topo.is_mover(spec.source.host));
    const bool writing = !reading && spec.sink.kind == EndpointKind::disk &&
                         (spec.sink.host.empty() || topo.is_mover(spec.sink.host));

    // resource 0: the network path; then one io resource per host
    std::vector<double> capacities{spec.path.capacity};
    std::map<std::string, std::size_t> host_res;
    for (const HostSpec *h : [&] {
             std::vector<const HostSpec *> hs{&topo.client};
             for (const auto &m : topo.movers) {
                 hs.push_back(&m);
             }
             return hs;
         }()) {
        host_res[h->name] = capacities.size();
        capacities.push_back(h->io_capacity());
    }

    Engine engine;
    FluidNetwork fluid{engine, capacities};
    auto load = std::make_unique<std::map<const storage::Disk *, std::size_t>>();
    std::vector<FileRateModel> models(files);
    std::vector<TransferOutcome> outcomes(files);
    std::vector<FluidNetwork::FlowSpec> flows(files);

    const SimTime setup =
        std::holds_alternative<PdataPush>(spec.protocol) ? SimTime::from_seconds(spec.path.rtt) : SimTime{};

    for (std::size_t i = 0; i < files; ++i) {
        const ResolvedEnd src = resolve(topo, spec.source, i, reading);
        const ResolvedEnd dst = resolve(topo, spec.sink, i, writing);
        if (src.host == dst.host) {
            throw ConfigError{"transfer source and sink are on the same host '" + src.host->name + "'"};
        }
        for (const storage::Disk *d : {src.disk, dst.disk}) {
            if (d != nullptr) {
                (*load)[d];
            }
        }

        FileRateModel &m = models[i];
        m.spec = &spec;
        m.source_disk = src.disk;
        m.sink_disk = dst.disk;
        m.load = load.get();
        const auto leg = [&](const HostSpec &a, const HostSpec &b) {
            return FileRateModel::Leg{std::min(a.tcp_buffer, b.tcp_buffer),
                                      std::min({spec.path.capacity, a.io_capacity(), b.io_capacity()})};
        };

        std::vector<std::pair<std::size_t, double>> usage{
            {0, 1.0}, {host_res.at(src.host->name), 1.0}, {host_res.at(dst.host->name), 1.0}};
        if (const auto *relay = std::get_if<Relay>(&spec.data_path);
            relay != nullptr && relay->via != src.host->name && relay->via != dst.host->name) {
            const HostSpec &via = topo.host(relay->via);
            m.legs = {leg(*src.host, via), leg(via, *dst.host)};
            // inbound and outbound legs share the relay's single NIC
            usage.emplace_back(host_res.at(via.name), 2.0);
        } else {
            m.legs = {leg(*src.host, *dst.host)};
        }

        outcomes[i] = TransferOutcome{describe(src), describe(dst), spec.size, SimTime{}, SimTime{}};
        flows[i] = FluidNetwork::FlowSpec{
            spec.size, [&m] { return m(); }, std::move(usage),
            [&, src_disk = src.disk, dst_disk = dst.disk](FluidNetwork::FlowId id, SimTime at) {
                outcomes[id].completed = at;
                for (const storage::Disk *d : {src_disk, dst_disk}) {
                    if (d != nullptr) {
                        --(*load)[d];
                    }
                }
            }};
    }

    const EntityId starter = engine.add_entity([&](Engine &eng, const Event &) {
        for (std::size_t i = 0; i < files; ++i) {
            for (const storage::Disk *d : {models[i].source_disk, models[i].sink_disk}) {
                if (d != nullptr) {
                    ++(*load)[d];
                }
            }
            outcomes[i].started = eng.now();
        }
        for (std::size_t i = 0; i < files; ++i) {
            fluid.start(std::move(flows[i]));
        }
    });
    engine.schedule(setup, starter, {});
    const SimTime end = engine.run_until_idle();

    SessionResult out;
    out.transfers = std::move(outcomes);
    out.makespan = end;
    out.bytes_delivered = fluid.delivered_bytes();
    const double expected = spec.size * static_cast<double>(files);
    if (std::abs(out.bytes_delivered - expected) > 1e-6 * expected) {
        throw InternalError{"session delivered " + std::to_string(out.bytes_delivered) + " of " +
                            std::to_string(expected) + " bytes"};
    }
    out.aggregate_rate = out.bytes_delivered / out.makespan.seconds();
    return out;
}

}  // namespace

SessionResult run_pftp_session(const Topology &topo, const TransferSpec &spec, std::size_t concurrent_files) {
    return run_session(topo, spec, concurrent_files);
}

SessionResult run_relay_transfer(const Topology &topo, const TransferSpec &spec, std::size_t concurrent_files) {
    if (!std::holds_alternative<Relay>(spec.data_path)) {
        throw ConfigError{"run_relay_transfer needs a relay data path"};
    }
    return run_session(topo, spec, concurrent_files);
}

ApiPoint client_api_transfer(const Topology &topo, const std::string &path_label, Direction dir, double buffer,
                             double size, double packet) {
    require_positive(buffer, "client API buffer");
    const net::NetPath &path = topo.path(path_label);
    const HostSpec &mover = topo.movers.front();
    const HostSpec &client = topo.client;
    const double unit = std::min(buffer, packet);
    const double window = std::min(mover.tcp_buffer, client.tcp_buffer);
    double bottleneck = std::min({mover.disks.front().seq_rate, mover.io_capacity(), client.io_capacity(),
                                  path.capacity});
    if (unit > window) {
        bottleneck = std::min(bottleneck, net::window_rate(window, path));
    }
    // memory is not a bottleneck in either direction, so read and write share the machine
    const PdataRun run = simulate_pdata({size, unit, path.rtt, bottleneck, false});
    return ApiPoint{path_label, dir, buffer, run.bytes_delivered / run.completed.seconds(), run.completed};
}

std::vector<ApiPoint> client_api_sweep(const Topology &topo, std::span<const double> buffers,
                                       std::span<const std::string> paths, double size, double packet) {
    if (buffers.empty()) {
        throw ConfigError{"client API sweep: empty buffer list"};
    }
    std::vector<ApiPoint> out;
    for (const auto &p : paths) {
        for (Direction dir : {Direction::read, Direction::write}) {
            for (double b : buffers) {
                out.push_back(client_api_transfer(topo, p, dir, b, size, packet));
            }
        }
    }
    return out;
}

}  // namespace hsmsim::proto
