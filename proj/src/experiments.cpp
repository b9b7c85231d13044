#include "hsmsim/experiments.hpp"

#include "hsmsim/checks.hpp"
#include "hsmsim/dialect.hpp"
#include "hsmsim/error.hpp"
#include "hsmsim/netmodel.hpp"
#include "hsmsim/protocols.hpp"
#include "hsmsim/staging.hpp"
#include "hsmsim/storage.hpp"
#include "hsmsim/units.hpp"
#include "hsmsim/xrsl.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hsmsim {

Topology build_topology(const Settings &s) {
    Topology t;
    const std::size_t movers = s.count("movers.count");
    const auto names = s.list("movers.names");
    if (!names.empty() && names.size() != movers) {
        throw ConfigError{"movers.names lists " + std::to_string(names.size()) + " hosts but movers.count is " +
                          std::to_string(movers)};
    }
    for (std::size_t m = 0; m < movers; ++m) {
        HostSpec h;
        h.name = names.empty() ? "mover" + std::to_string(m) : names[m];
        h.cpu_throughput_cap = s.rate("movers.cpu_cap");
        h.tcp_buffer = s.bytes("movers.tcp_buffer");
        h.nic_capacity = s.rate("movers.nic_capacity");
        for (std::size_t d = 0; d < s.count("movers.disks"); ++d) {
            h.disks.push_back({h.name + ".disk" + std::to_string(d), s.rate("movers.disk_rate"),
                               s.real("movers.disk_alpha")});
        }
        t.movers.push_back(std::move(h));
    }
    t.client.name = s.text("client.name");
    t.client.cpu_throughput_cap = s.rate("client.cpu_cap");
    t.client.tcp_buffer = s.bytes("client.tcp_buffer");
    t.client.nic_capacity = s.rate("client.nic_capacity");
    for (std::size_t d = 0; d < s.count("client.disks"); ++d) {
        t.client.disks.push_back({t.client.name + ".disk" + std::to_string(d), s.rate("client.disk_rate"),
                                  s.real("client.disk_alpha")});
    }
    if (s.has("transfer.buffer")) {
        const double b = s.bytes("transfer.buffer");
        for (auto &m : t.movers) {
            m.tcp_buffer = b;
        }
        t.client.tcp_buffer = b;
    }
    t.core_host = s.text("core.name");
    const double capacity = s.rate("network.capacity");
    const double loss = s.real("network.loss_rate");
    const double loss_k = s.real("network.loss_k");
    t.paths["LAN"] = net::NetPath{"LAN", s.seconds("network.lan_rtt"), capacity, loss, loss_k};
    t.paths["WAN"] = net::NetPath{"WAN", s.seconds("network.wan_rtt"), capacity, loss, loss_k};
    t.library.drives = s.count("library.drives");
    t.library.accessors = s.count("library.accessors");
    t.library.exchange_time = s.seconds("library.exchange_time");
    t.library.read_rate = s.rate("library.drive_rate");
    t.validate();
    return t;
}

namespace {

proto::ProtocolKind protocol_from(const Settings &s) {
    const std::string &name = s.text("transfer.protocol");
    const double packet = s.bytes("transfer.packet");
    if (name == "pdata") {
        return proto::MoverPdata{packet, s.boolean("transfer.pipelined")};
    }
    if (name == "push") {
        return proto::PdataPush{};
    }
    if (name == "pftp") {
        return proto::Pftp{s.count("transfer.pwidth"), packet};
    }
    if (name == "client_api") {
        return proto::ClientApi{s.bytes("transfer.api_buffer"), packet};
    }
    throw ConfigError{"transfer.protocol: unknown protocol '" + name + "' (pdata, push, pftp, client_api)"};
}

proto::Overlap overlap_from(const Settings &s) {
    const std::string &v = s.text("transfer.overlap");
    if (v == "serial") {
        return proto::Overlap::serial;
    }
    if (v == "parallel") {
        return proto::Overlap::parallel;
    }
    throw ConfigError{"transfer.overlap: expected serial or parallel, got '" + v + "'"};
}

proto::EndpointKind client_end_from(const Settings &s) {
    const std::string &v = s.text("transfer.client_end");
    if (v == "null") {
        return proto::EndpointKind::null_device;
    }
    if (v == "memory") {
        return proto::EndpointKind::memory;
    }
    if (v == "disk") {
        return proto::EndpointKind::disk;
    }
    throw ConfigError{"transfer.client_end: expected null, memory or disk, got '" + v + "'"};
}

bool reading(const Settings &s) {
    const std::string &v = s.text("transfer.direction");
    if (v == "read") {
        return true;
    }
    if (v == "write") {
        return false;
    }
    throw ConfigError{"transfer.direction: expected read or write, got '" + v + "'"};
}

// Mover-side data host "" means round-robin over every mover.
proto::TransferSpec transfer_from(const Settings &s, const Topology &t, const std::string &data_host) {
    proto::TransferSpec spec;
    spec.size = s.bytes("transfer.file_size");
    spec.protocol = protocol_from(s);
    spec.path = t.path(s.text("scenario.path"));
    spec.streams = s.count("transfer.streams");
    spec.overlap = overlap_from(s);
    if (!data_host.empty() && !t.is_mover(data_host)) {
        throw ScenarioError{"data host '" + data_host + "' is not a mover in the topology"};
    }
    const proto::StorageEndpoint mover_end{proto::EndpointKind::disk, data_host, std::nullopt};
    proto::EndpointKind client_kind = client_end_from(s);
    if (reading(s)) {
        spec.source = mover_end;
        spec.sink = {client_kind, t.client.name, std::nullopt};
    } else {
        if (client_kind == proto::EndpointKind::null_device) {
            client_kind = proto::EndpointKind::memory;
        }
        spec.source = {client_kind, t.client.name, std::nullopt};
        spec.sink = mover_end;
    }
    return spec;
}

ResultRow from_session(const proto::SessionResult &r) {
    ResultRow row;
    row.bytes = r.bytes_delivered;
    row.makespan_s = r.makespan.seconds();
    for (const auto &t : r.transfers) {
        row.elapsed_s.push_back((t.completed - t.started).seconds());
    }
    return row;
}

ftp::SpeakerProfile profile_from(const Settings &s, ftp::Role role) {
    const std::string side = role == ftp::Role::client ? "client" : "server";
    auto p = ftp::SpeakerProfile::standard(role, ftp::parse_dialect(s.text("dialect." + side)),
                                           s.text("dialect." + side + "_realm"));
    for (const auto &f : s.list("dialect." + side + "_requires")) {
        p.required.insert(ftp::parse_feature(f));
    }
    if (role == ftp::Role::client && s.has("dialect.sbuf")) {
        p.sbuf_bytes = s.bytes("dialect.sbuf");
    }
    return p;
}

// Negotiates and authenticates the FTP session. SBUF, when agreed, overrides
// the endpoint TCP buffers.
ftp::SessionAgreement open_session(const Settings &s, Topology &t) {
    const auto agreement = ftp::negotiate(profile_from(s, ftp::Role::client), profile_from(s, ftp::Role::server),
                                          s.count("transfer.streams"));
    if (ftp::auth_handshake(agreement) != ftp::AuthResult::authenticated) {
        throw ConfigError{"dialect: realm '" + agreement.client_realm + "' rejected by server realm '" +
                          agreement.server_realm + "'"};
    }
    if (agreement.tcp_buffer) {
        for (auto &m : t.movers) {
            m.tcp_buffer = *agreement.tcp_buffer;
        }
        t.client.tcp_buffer = *agreement.tcp_buffer;
    }
    return agreement;
}

ftp::Deployment deployment_from(const Settings &s, const Topology &t) {
    const std::string &host = s.text("dialect.pftpd");
    if (host == t.core_host) {
        return ftp::KerberosPftpdOnCore{};
    }
    if (!t.is_mover(host)) {
        throw ScenarioError{"dialect.pftpd: unknown host '" + host + "'"};
    }
    return ftp::GsiPftpdOnHost{host};
}

ResultRow run_netperf(const Settings &s, const Topology &t) {
    const net::NetPath &path = t.path(s.text("scenario.path"));
    const std::size_t k = s.count("transfer.streams");
    if (k == 0) {
        throw ConfigError{"transfer.streams must be >= 1"};
    }
    net::FlowSet set;
    for (std::size_t i = 0; i < k; ++i) {
        set.sessions.emplace_back(path, t.movers.front().endpoint(), t.client.endpoint());
    }
    const auto rates = net::water_fill(set);
    const double bytes = s.bytes("transfer.file_size");
    ResultRow row;
    row.bytes = bytes;
    for (double r : rates) {
        const double e = SimTime::from_seconds(bytes / static_cast<double>(k) / r).seconds();
        row.elapsed_s.push_back(e);
        row.makespan_s = std::max(row.makespan_s, e);
    }
    return row;
}

ResultRow run_client_api(const Settings &s, const Topology &t) {
    const auto dir = reading(s) ? proto::Direction::read : proto::Direction::write;
    const auto p = proto::client_api_transfer(t, s.text("scenario.path"), dir, s.bytes("transfer.api_buffer"),
                                              s.bytes("transfer.file_size"), s.bytes("transfer.packet"));
    ResultRow row;
    row.bytes = s.bytes("transfer.file_size");
    row.makespan_s = p.elapsed.seconds();
    row.elapsed_s = {row.makespan_s};
    return row;
}

ResultRow run_pftp(const Settings &s, const Topology &t) {
    const auto spec = transfer_from(s, t, "");
    return from_session(proto::run_pftp_session(t, spec, s.count("transfer.files")));
}

ResultRow run_relay(const Settings &s, Topology t) {
    const auto agreement = open_session(s, t);
    const std::string &data_host = s.text("dialect.data_host");
    auto spec = transfer_from(s, t, data_host);
    spec.streams = agreement.streams;
    spec.data_path = ftp::select_data_path(deployment_from(s, t), data_host);
    return from_session(proto::run_pftp_session(t, spec, s.count("transfer.files")));
}

ResultRow run_tape(const Settings &s, const Topology &t) {
    const std::size_t n = s.count("transfer.files");
    const auto r = storage::run_concurrent_tape_reads(t.library, n, s.bytes("transfer.file_size"),
                                                      s.boolean("library.premounted"));
    ResultRow row;
    row.bytes = s.bytes("transfer.file_size") * static_cast<double>(n);
    row.makespan_s = r.makespan.seconds();
    for (const auto &read : r.reads) {
        row.elapsed_s.push_back((read.completed_at - read.requested_at).seconds());
    }
    return row;
}

xrsl::Document load_job(const Scenario &sc, const Settings &s) {
    const std::string &job = s.text("scenario.job");
    if (job.empty()) {
        throw ConfigError{"stagein experiment needs scenario.job"};
    }
    const std::filesystem::path file = sc.origin / job;
    std::ifstream in{file};
    if (!in) {
        throw ConfigError{"cannot read job description " + file.string()};
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return xrsl::parse(text.str());
    } catch (const xrsl::ParseError &e) {
        throw ConfigError{file.string() + ": " + e.what()};
    }
}

// Stage-ins run one after another, as a single-threaded grid manager would.
ResultRow run_stagein(const Scenario &sc, const Settings &s, Topology t) {
    const auto doc = load_job(sc, s);
    xrsl::StageIns reqs;
    try {
        reqs = xrsl::extract_stage_ins(doc);
    } catch (const xrsl::ValidationError &e) {
        throw ConfigError{std::string{"job inputfiles: "} + e.what()};
    }
    (void)open_session(s, t);
    xrsl::StagingContext ctx;
    ctx.topology = &t;
    ctx.host_aliases = s.with_prefix("staging.alias.");
    ctx.placement = s.with_prefix("staging.place.");
    ctx.path_label = s.text("scenario.path");
    ctx.protocol = protocol_from(s);
    ctx.file_size = s.bytes("transfer.file_size");
    const auto transfers = xrsl::stage_in_to_transfers(reqs.routable, ctx);
    if (transfers.empty()) {
        throw ConfigError{"job has no routable stage-in files"};
    }
    ResultRow row;
    for (auto spec : transfers) {
        spec.overlap = overlap_from(s);
        const auto r = proto::run_pftp_session(t, spec, 1);
        row.bytes += r.bytes_delivered;
        row.makespan_s += r.makespan.seconds();
        row.elapsed_s.push_back(r.makespan.seconds());
    }
    return row;
}

ResultRow run_once(const Scenario &sc, const Settings &s) {
    const Topology t = build_topology(s);
    (void)t.path(s.text("scenario.path"));
    const std::string &e = sc.experiment;
    if (e == "netperf") {
        return run_netperf(s, t);
    }
    if (e == "client_api") {
        return run_client_api(s, t);
    }
    if (e == "pftp") {
        return run_pftp(s, t);
    }
    if (e == "relay") {
        return run_relay(s, t);
    }
    if (e == "tape") {
        return run_tape(s, t);
    }
    if (e == "stagein") {
        return run_stagein(sc, s, t);
    }
    throw ConfigError{sc.id + ": unknown experiment '" + e + "'"};
}

std::string sweep_label(const Scenario &sc, const std::string &raw) {
    const auto type = key_type(sc.sweep_key);
    double v = 0;
    switch (type.value_or(ValueType::text)) {
        case ValueType::bytes: v = units::parse_bytes(raw); break;
        case ValueType::rate: v = units::parse_rate(raw); break;
        case ValueType::seconds: v = units::parse_seconds(raw); break;
        case ValueType::count: v = static_cast<double>(units::parse_count(raw)); break;
        case ValueType::real: v = units::parse_real(raw); break;
        default: return raw;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::vector<Point> enumerate_points(std::span<const Scenario> suite) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const Scenario &s = suite[i];
        for (std::size_t p = 0; p < s.paths.size(); ++p) {
            for (std::size_t v = 0; v < s.variant_count(); ++v) {
                for (std::size_t w = 0; w < s.sweep_values.size(); ++w) {
                    out.push_back({i, p, v, w});
                }
            }
        }
    }
    return out;
}

ResultRow evaluate_point(const Scenario &sc, const Point &p) {
    const std::string &path = sc.paths.at(p.path);
    const KeyValues kv = sc.resolve(path, p.variant, p.sweep);
    const Settings s{kv};
    ResultRow row = run_once(sc, s);
    for (std::size_t rep = 1; rep < s.count("scenario.repetitions"); ++rep) {
        if (!(run_once(sc, s) == row)) {
            throw InternalError{sc.id + ": repetition " + std::to_string(rep) + " differs from the first run"};
        }
    }
    row.scenario = sc.id;
    row.sweep = sweep_label(sc, sc.sweep_values.at(p.sweep));
    row.path = sc.series(path, p.variant);
    return row;
}

void validate_scenario(const Scenario &sc) {
    static const char *experiments[] = {"netperf", "client_api", "pftp", "relay", "tape", "stagein"};
    if (std::none_of(std::begin(experiments), std::end(experiments), [&](const char *e) { return sc.experiment == e; })) {
        throw ConfigError{sc.id + ": unknown experiment '" + sc.experiment + "'"};
    }
    if (const auto it = sc.settings.find("scenario.checks"); it != sc.settings.end()) {
        for (const auto &c : units::parse_list(it->second)) {
            const auto &known = known_checks();
            if (std::find(known.begin(), known.end(), c) == known.end()) {
                throw ConfigError{sc.id + ": unknown check set '" + c + "'"};
            }
        }
    }
    for (std::size_t p = 0; p < sc.paths.size(); ++p) {
        for (std::size_t v = 0; v < sc.variant_count(); ++v) {
            for (std::size_t w = 0; w < sc.sweep_values.size(); ++w) {
                const KeyValues kv = sc.resolve(sc.paths[p], v, w);
                const Settings s{kv};
                Topology t = build_topology(s);
                (void)t.path(sc.paths[p]);
                if (sc.experiment == "pftp" || sc.experiment == "relay") {
                    const std::string host = sc.experiment == "relay" ? s.text("dialect.data_host") : "";
                    transfer_from(s, t, host).validate(t);
                }
                if (sc.experiment == "relay" || sc.experiment == "stagein") {
                    (void)open_session(s, t);
                    (void)deployment_from(s, t);
                }
                if (sc.experiment == "stagein") {
                    (void)load_job(sc, s);
                }
            }
        }
    }
}

std::vector<ResultRow> run_points_serial(std::span<const Scenario> suite) {
    std::vector<ResultRow> rows;
    for (const Point &p : enumerate_points(suite)) {
        rows.push_back(evaluate_point(suite[p.scenario], p));
    }
    return rows;
}

std::vector<ResultRow> run_points_parallel(std::span<const Scenario> suite, int jobs) {
    const std::vector<Point> points = enumerate_points(suite);
    std::vector<ResultRow> rows(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
    (void)jobs;
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            rows[k] = evaluate_point(suite[points[k].scenario], points[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return rows;
}

std::string to_csv(std::span<const ResultRow> rows) {
    std::string out = std::string{csv_header} + "\n";
    char buf[512];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", r.throughput_mbps(), r.makespan_s);
        out += r.scenario + "," + r.sweep + "," + r.path + buf;
    }
    return out;
}

std::vector<std::vector<ResultRow>> run_suite(std::span<const Scenario> suite, const std::filesystem::path &out_dir,
                                              int jobs) {
    std::vector<std::vector<ResultRow>> grouped(suite.size());
    if (suite.empty()) {
        return grouped;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw ConfigError{"cannot create output directory " + out_dir.string()};
    }
    const auto rows = jobs == 1 ? run_points_serial(suite) : run_points_parallel(suite, jobs);
    const auto points = enumerate_points(suite);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        grouped[points[i].scenario].push_back(rows[i]);
    }
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const auto file = out_dir / (suite[i].id + ".csv");
        std::ofstream out{file, std::ios::binary | std::ios::trunc};
        out << to_csv(grouped[i]);
        if (!out) {
            throw ConfigError{"cannot write " + file.string()};
        }
    }
    return grouped;
}

}  // namespace hsmsim
