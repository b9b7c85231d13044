#include "hsmsim/checks.hpp"

#include "hsmsim/error.hpp"
#include "hsmsim/units.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>

namespace hsmsim {

namespace {

// sweep value -> row, for one series
using Series = std::map<double, const ResultRow *>;

class Rows {
public:
    explicit Rows(std::span<const ResultRow> rows) {
        for (const auto &r : rows) {
            series_[r.path][std::stod(r.sweep)] = &r;
        }
    }

    [[nodiscard]] const Series *series(const std::string &label) const {
        const auto it = series_.find(label);
        return it == series_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::optional<double> rate(const std::string &label, double sweep) const {
        const Series *s = series(label);
        if (s == nullptr) {
            return std::nullopt;
        }
        const auto it = s->find(sweep);
        if (it == s->end()) {
            return std::nullopt;
        }
        return it->second->throughput_mbps();
    }

    [[nodiscard]] std::optional<double> makespan(const std::string &label, double sweep) const {
        const Series *s = series(label);
        if (s == nullptr || s->find(sweep) == s->end()) {
            return std::nullopt;
        }
        return s->at(sweep)->makespan_s;
    }

private:
    std::map<std::string, Series> series_;
};

std::string fmt(const char *format, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

using Emit = std::function<void(std::string name, bool pass, std::string detail)>;

void missing(const Emit &emit, const std::string &name, const std::string &what) {
    emit(name, false, "missing data: " + what);
}

void netperf_convergence(const Rows &rows, const Emit &emit) {
    const Series *lan = rows.series("LAN");
    const Series *wan = rows.series("WAN");
    if (lan == nullptr || wan == nullptr) {
        return missing(emit, "lan_wan_converge_ge_1MiB", "LAN and WAN series");
    }
    bool ok = true;
    double worst = 0;
    for (const auto &[buf, row] : *lan) {
        if (buf < 1048576 || wan->count(buf) == 0) {
            continue;
        }
        const double a = row->throughput_mbps();
        const double b = wan->at(buf)->throughput_mbps();
        const double diff = std::abs(a - b) / std::max(a, b);
        worst = std::max(worst, diff);
        ok = ok && diff <= 0.02;
    }
    emit("lan_wan_converge_ge_1MiB", ok, fmt("max relative gap %.4f (limit 0.02)", worst));
    const auto l = rows.rate("LAN", 65536);
    const auto w = rows.rate("WAN", 65536);
    if (!l || !w) {
        return missing(emit, "lan_wan_gap_64KiB", "64KiB point");
    }
    emit("lan_wan_gap_64KiB", *l >= 3 * *w, fmt("LAN/WAN = %.3f (limit >= 3)", *l / *w));
}

void stream_scaling(const Rows &rows, const Emit &emit) {
    const auto s1 = rows.rate("WAN-100kB", 1);
    const auto s4 = rows.rate("WAN-100kB", 4);
    if (!s1 || !s4) {
        missing(emit, "small_window_4_streams_ge_3x", "WAN-100kB streams 1 and 4");
    } else {
        emit("small_window_4_streams_ge_3x", *s4 >= 3 * *s1, fmt("4-stream/1-stream = %.3f (limit >= 3)", *s4 / *s1));
        bool monotone = true;
        for (double n = 2; n <= 4; ++n) {
            const auto prev = rows.rate("WAN-100kB", n - 1);
            const auto cur = rows.rate("WAN-100kB", n);
            monotone = monotone && prev && cur && *cur >= *prev;
        }
        emit("small_window_monotone_to_4", monotone, "aggregate non-decreasing from 1 to 4 streams");
    }
    const auto b1 = rows.rate("WAN-1MB", 1);
    const auto b4 = rows.rate("WAN-1MB", 4);
    if (!b1 || !b4) {
        return missing(emit, "large_window_4_streams_le_1.05x", "WAN-1MB streams 1 and 4");
    }
    emit("large_window_4_streams_le_1.05x", *b4 <= 1.05 * *b1, fmt("4-stream/1-stream = %.4f (limit <= 1.05)", *b4 / *b1));
}

void client_api_ratio(const Rows &rows, const Emit &emit) {
    for (const std::string dir : {"read", "write"}) {
        const Series *lan = rows.series("LAN-" + dir);
        const Series *wan = rows.series("WAN-" + dir);
        const std::string name = "wan_lan_ratio_" + dir;
        if (lan == nullptr || wan == nullptr) {
            missing(emit, name, "LAN-" + dir + " and WAN-" + dir);
            continue;
        }
        bool ok = true;
        double lo = 1e9;
        double hi = 0;
        for (const auto &[buf, row] : *lan) {
            if (buf < 1048576 || wan->count(buf) == 0) {
                continue;
            }
            const double r = wan->at(buf)->throughput_mbps() / row->throughput_mbps();
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ok = ok && r >= 0.45 && r <= 0.55;
        }
        emit(name, ok && hi > 0, fmt("WAN/LAN in [%.4f, %.4f] for buffers >= 1MiB (limit [0.45, 0.55])", lo, hi));
    }
    for (const std::string path : {"LAN", "WAN"}) {
        const Series *rd = rows.series(path + "-read");
        const Series *wr = rows.series(path + "-write");
        if (rd == nullptr || wr == nullptr) {
            missing(emit, "write_mirrors_read_" + path, path + " read/write series");
            continue;
        }
        bool ok = true;
        for (const auto &[buf, row] : *rd) {
            if (wr->count(buf) != 0) {
                const double a = row->throughput_mbps();
                const double b = wr->at(buf)->throughput_mbps();
                ok = ok && std::abs(a - b) <= 0.10 * a;
            }
        }
        emit("write_mirrors_read_" + path, ok, "write within 10% of read at every buffer");
    }
}

void pftp_concurrency(const Rows &rows, const Emit &emit) {
    for (const std::string path : {"LAN", "WAN"}) {
        const std::string label = path + "-null";
        // a LAN file alone already fills half the link, so only the WAN can
        // grow through all four disks
        const bool strict = path == "WAN";
        const std::string name = (strict ? "files_scale_to_4_" : "files_nondecreasing_to_4_") + path;
        bool ok = true;
        std::string detail;
        for (double n = 1; n <= 4; ++n) {
            const auto r = rows.rate(label, n);
            if (!r) {
                ok = false;
                detail = "missing point";
                break;
            }
            detail += fmt("%.2f ", *r);
            if (n > 1) {
                const double prev = *rows.rate(label, n - 1);
                ok = ok && (strict ? *r > prev : *r >= prev);
            }
        }
        emit(name, ok, "aggregate MB/s for 1..4 files: " + detail + (strict ? "(strictly increasing)" : "(non-decreasing)"));
        const auto r4 = rows.rate(label, 4);
        const auto r6 = rows.rate(label, 6);
        if (!r4 || !r6) {
            missing(emit, "files_saturate_at_4_" + path, label + " 4 and 6 files");
        } else {
            // one clock tick of makespan rounding is tolerated
            emit("files_saturate_at_4_" + path, *r6 <= *r4 * (1 + 1e-6),
                 fmt("6 files %.4f vs 4 files %.4f MB/s (must not increase)", *r6, *r4));
        }
        const auto p1 = rows.rate(path + "-pwidth1-1MB", 1);
        const auto p4 = rows.rate(path + "-pwidth4-1MB", 1);
        if (!p1 || !p4) {
            missing(emit, "pwidth_ineffective_" + path, "pwidth series");
        } else {
            emit("pwidth_ineffective_" + path, std::abs(*p4 - *p1) <= 0.05 * *p1,
                 fmt("pwidth 4 %.3f vs pwidth 1 %.3f MB/s (within 5%%)", *p4, *p1));
        }
    }
    const auto lan = rows.rate("LAN-null", 1);
    const auto wan = rows.rate("WAN-null", 1);
    if (!lan || !wan) {
        missing(emit, "wan_half_of_lan", "single-file null-sink points");
    } else {
        const double r = *wan / *lan;
        emit("wan_half_of_lan", r >= 0.45 && r <= 0.55, fmt("WAN/LAN = %.4f (limit [0.45, 0.55])", r));
    }
    if (const auto disk = rows.rate("LAN-disk", 1)) {
        emit("disk_to_disk_serial_near_20MBps", std::abs(*disk - 20) <= 2,
             fmt("LAN disk-to-disk single file %.3f MB/s (20 +- 2)", *disk));
    } else {
        missing(emit, "disk_to_disk_serial_near_20MBps", "LAN-disk series");
    }
}

void tape_accessors(const Rows &rows, const Emit &emit, const Scenario &sc) {
    const auto m1 = rows.makespan("WAN-offdrive", 1);
    const auto m2 = rows.makespan("WAN-offdrive", 2);
    const auto m3 = rows.makespan("WAN-offdrive", 3);
    if (!m1 || !m2 || !m3) {
        missing(emit, "accessor_limit", "WAN-offdrive 1..3 files");
    } else {
        emit("two_offdrive_files_in_parallel", *m2 / *m1 < 1.1, fmt("makespan(2)/makespan(1) = %.4f (limit < 1.1)", *m2 / *m1));
        emit("third_offdrive_file_waits", *m3 / *m2 > 1.3, fmt("makespan(3)/makespan(2) = %.4f (limit > 1.3)", *m3 / *m2));
    }
    const Settings s{sc.settings};
    const std::size_t drives = sc.settings.count("library.drives") ? s.count("library.drives") : 4;
    const auto a1 = rows.rate("WAN-mounted", 1);
    if (!a1) {
        return missing(emit, "premounted_linear", "WAN-mounted series");
    }
    bool ok = true;
    double worst = 0;
    for (std::size_t n = 1; n <= drives; ++n) {
        const auto an = rows.rate("WAN-mounted", static_cast<double>(n));
        if (!an) {
            ok = false;
            break;
        }
        const double dev = std::abs(*an / (static_cast<double>(n) * *a1) - 1);
        worst = std::max(worst, dev);
        ok = ok && dev <= 0.01;
    }
    emit("premounted_linear", ok, fmt("max deviation from n x single-drive rate %.5f (limit 0.01)", worst));
}

void write_contention(const Rows &rows, const Emit &emit) {
    for (const std::string path : {"LAN", "WAN"}) {
        const auto a1 = rows.rate(path, 1);
        const auto a2 = rows.rate(path, 2);
        if (!a1 || !a2) {
            missing(emit, "client_disk_contention_" + path, path + " 1 and 2 files");
            continue;
        }
        emit("client_disk_contention_" + path, *a2 < *a1,
             fmt("2 files %.3f < 1 file %.3f MB/s", *a2, *a1));
    }
}

void relay_halving(const Rows &rows, const Emit &emit) {
    const Series *orig = rows.series("WAN-original");
    const Series *colo = rows.series("WAN-colocated");
    const Series *relay = rows.series("WAN-relay");
    if (orig == nullptr || colo == nullptr || relay == nullptr) {
        return missing(emit, "relay_halving", "original, colocated and relay series");
    }
    bool halved = true;
    bool any = false;
    double worst = 0;
    for (const auto &[n, row] : *relay) {
        // one colocated file is held to its source disk, below the host cap
        if (n < 2 || colo->count(n) == 0) {
            continue;
        }
        any = true;
        const double r = row->throughput_mbps() / colo->at(n)->throughput_mbps();
        worst = std::max(worst, r);
        halved = halved && r <= 0.55;
    }
    emit("relay_at_most_0.55x_colocated_ge_2_files", halved && any, fmt("max relay/colocated %.4f for >= 2 files (limit 0.55)", worst));
    bool same = true;
    double gap = 0;
    for (const auto &[n, row] : *colo) {
        if (orig->count(n) == 0) {
            same = false;
            continue;
        }
        const double o = orig->at(n)->throughput_mbps();
        const double d = std::abs(row->throughput_mbps() - o) / o;
        gap = std::max(gap, d);
        same = same && d <= 0.01;
    }
    emit("colocated_equals_original", same, fmt("max relative gap %.5f (limit 0.01)", gap));
}

void stagein_route(const Rows &rows, const Emit &emit) {
    const Series *relay = rows.series("WAN-relay");
    const Series *colo = rows.series("WAN-colocated");
    if (relay == nullptr || colo == nullptr) {
        return missing(emit, "stagein_routes", "WAN-relay and WAN-colocated");
    }
    bool ok = true;
    for (const auto &[v, row] : *relay) {
        ok = ok && row->elapsed_s.size() == 1 && colo->count(v) != 0 &&
             row->throughput_mbps() <= colo->at(v)->throughput_mbps() * (1 + 1e-9);
    }
    emit("stagein_single_request_relay_not_faster", ok, "one stage-in per job; relayed path never beats co-located");
}

}  // namespace

const std::vector<std::string> &known_checks() {
    static const std::vector<std::string> names{"netperf_convergence", "stream_scaling",  "client_api_ratio",
                                                "pftp_concurrency",    "tape_accessors",  "write_contention",
                                                "relay_halving",       "stagein_route"};
    return names;
}

std::vector<CheckOutcome> run_checks(const Scenario &s, std::span<const ResultRow> rows) {
    std::vector<CheckOutcome> out;
    const Rows indexed{rows};
    const Emit emit = [&](std::string name, bool pass, std::string detail) {
        out.push_back({s.id, std::move(name), pass, std::move(detail)});
    };
    const auto it = s.settings.find("scenario.checks");
    if (it == s.settings.end()) {
        return out;
    }
    for (const auto &check : units::parse_list(it->second)) {
        if (check == "netperf_convergence") {
            netperf_convergence(indexed, emit);
        } else if (check == "stream_scaling") {
            stream_scaling(indexed, emit);
        } else if (check == "client_api_ratio") {
            client_api_ratio(indexed, emit);
        } else if (check == "pftp_concurrency") {
            pftp_concurrency(indexed, emit);
        } else if (check == "tape_accessors") {
            tape_accessors(indexed, emit, s);
        } else if (check == "write_contention") {
            write_contention(indexed, emit);
        } else if (check == "relay_halving") {
            relay_halving(indexed, emit);
        } else if (check == "stagein_route") {
            stagein_route(indexed, emit);
        } else {
            throw ConfigError{s.id + ": unknown check set '" + check + "'"};
        }
    }
    return out;
}

}  // namespace hsmsim
