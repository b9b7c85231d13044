#include "hsmsim/error.hpp"
#include "hsmsim/netmodel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace hsmsim::net;

namespace {

NetPath lan() { return NetPath{"LAN", 0.2e-3, 125e6, 0, 0}; }
NetPath wan() { return NetPath{"WAN", 3.5e-3, 125e6, 0, 0}; }

// Bisection on the fill level L: sum(min(d, L)) = min(C, sum d).
std::vector<double> fill_oracle(double capacity, const std::vector<double> &demands) {
    const auto used = [&](double level) {
        double s = 0;
        for (double d : demands) {
            s += std::min(d, level);
        }
        return s;
    };
    double lo = 0;
    double hi = capacity;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (used(mid) < capacity ? lo : hi) = mid;
    }
    std::vector<double> out;
    for (double d : demands) {
        out.push_back(std::min(d, hi));
    }
    return out;
}

}  // namespace

TEST_CASE("window-limited session rates") {
    const Endpoint big{"a", 64e6, 1e12};
    const Endpoint small{"b", 65536, 1e12};
    CHECK(session_rate_unconstrained(TcpSession{wan(), big, small}) == doctest::Approx(65536 / 3.5e-3));
    CHECK(session_rate_unconstrained(TcpSession{lan(), big, small}) == doctest::Approx(125e6));
    CHECK(window_rate(1e5, wan()) == doctest::Approx(28.571428e6));
    CHECK(TcpSession{wan(), big, small}.effective_window() == 65536);
}

TEST_CASE("cpu cap bounds a session") {
    const Endpoint mover{"m", 64e6, 90e6};
    const Endpoint client{"c", 64e6, 125e6};
    CHECK(session_rate_unconstrained(TcpSession{wan(), mover, client}) == doctest::Approx(90e6));
}

TEST_CASE("loss penalty divides the window rate") {
    NetPath p = wan();
    p.loss_rate = 0.01;
    p.loss_k = 50;
    CHECK(window_rate(1e5, p) == doctest::Approx(28.571428e6 / 1.5));
    p.loss_k = 0;
    CHECK(window_rate(1e5, p) == doctest::Approx(28.571428e6));
}

TEST_CASE("invalid paths and endpoints are rejected") {
    NetPath p = wan();
    p.rtt = 0;
    CHECK_THROWS_AS(TcpSession(p, Endpoint{}, Endpoint{}), hsmsim::ConfigError);
    p = wan();
    p.loss_rate = 1;
    CHECK_THROWS_AS(p.validate(), hsmsim::ConfigError);
    Endpoint e;
    e.tcp_buffer = -1;
    CHECK_THROWS_AS(TcpSession(wan(), e, Endpoint{}), hsmsim::ConfigError);
}

TEST_CASE("netperf sweep: LAN and WAN meet at large buffers") {
    const NetPath paths[] = {lan(), wan()};
    const double buffers[] = {16384, 65536, 262144, 1048576, 4194304, 67108864};
    const Endpoint server{"mover0", 0, 90e6};
    const Endpoint client{"client", 0, 125e6};
    const auto pts = netperf_sweep(paths, buffers, server, client);
    REQUIRE(pts.size() == 12);
    CHECK(pts[1].rate / pts[7].rate >= 3);  // 64 KiB
    for (std::size_t i = 3; i < 6; ++i) {
        CHECK(pts[i].rate == doctest::Approx(pts[i + 6].rate).epsilon(0.02));
    }
    CHECK_THROWS_AS((void)netperf_sweep(paths, std::span<const double>{}, server, client), hsmsim::ConfigError);
}

TEST_CASE("netperf rate is non-decreasing in the buffer size") {
    const NetPath paths[] = {lan(), wan()};
    std::vector<double> buffers;
    for (double b = 4096; b <= 128e6; b *= 1.5) {
        buffers.push_back(b);
    }
    const auto pts = netperf_sweep(paths, buffers, Endpoint{"s", 1, 90e6}, Endpoint{"c", 1, 125e6});
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].path_label == pts[i - 1].path_label) {
            CHECK(pts[i].rate >= pts[i - 1].rate);
        }
    }
}

TEST_CASE("water fill examples") {
    const double d1[] = {28.57e6, 28.57e6, 28.57e6, 28.57e6};
    const auto r1 = water_fill(90e6, d1);
    CHECK(std::accumulate(r1.begin(), r1.end(), 0.0) == doctest::Approx(90e6));
    for (double r : r1) {
        CHECK(r == doctest::Approx(22.5e6));
    }
    const double d2[] = {10, 100, 100};
    const auto r2 = water_fill(100, d2);
    CHECK(r2[0] == doctest::Approx(10));
    CHECK(r2[1] == doctest::Approx(45));
    CHECK(r2[2] == doctest::Approx(45));
    const double d3[] = {1, 2};
    const auto r3 = water_fill(100, d3);
    CHECK(r3[0] == 1);
    CHECK(r3[1] == 2);
    CHECK(water_fill(5, std::span<const double>{}).empty());
}

TEST_CASE("stream sets share the common host cap") {
    FlowSet set;
    for (int i = 0; i < 4; ++i) {
        set.sessions.emplace_back(wan(), Endpoint{"mover0", 1e5, 90e6}, Endpoint{"client", 1e5, 125e6});
    }
    CHECK(set.shared_capacity() == doctest::Approx(90e6));
    const auto r = water_fill(set);
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(90e6));
    CHECK_THROWS_AS((void)FlowSet{}.shared_capacity(), hsmsim::ConfigError);
}

TEST_CASE("water fill matches the fixed-point oracle on every grid of up to 6 flows") {
    const double grid[] = {0, 5, 20, 40, 100, unlimited};
    const double capacities[] = {1, 50, 100, 250};
    std::size_t cases = 0;
    for (double cap : capacities) {
        for (std::size_t n = 1; n <= 6; ++n) {
            std::vector<std::size_t> idx(n, 0);
            while (true) {
                std::vector<double> demands;
                for (auto i : idx) {
                    demands.push_back(grid[i]);
                }
                const auto got = water_fill(cap, demands);
                const auto want = fill_oracle(cap, demands);
                for (std::size_t k = 0; k < n; ++k) {
                    REQUIRE(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
                }
                ++cases;
                std::size_t pos = 0;
                while (pos < n && ++idx[pos] == std::size(grid)) {
                    idx[pos++] = 0;
                }
                if (pos == n) {
                    break;
                }
            }
        }
    }
    CHECK(cases > 50000);
}

TEST_CASE("water fill properties") {
    std::mt19937_64 rng{7};
    std::uniform_real_distribution<double> u{0.0, 200.0};
    for (int round = 0; round < 2000; ++round) {
        const std::size_t n = 1 + rng() % 8;
        std::vector<double> d(n);
        for (auto &x : d) {
            x = u(rng);
        }
        const double cap = u(rng);
        const auto r = water_fill(cap, d);
        const double sum = std::accumulate(r.begin(), r.end(), 0.0);
        const double demand = std::accumulate(d.begin(), d.end(), 0.0);
        // conservation and caps
        REQUIRE(sum <= cap * (1 + 1e-9) + 1e-12);
        REQUIRE(sum == doctest::Approx(std::min(cap, demand)).epsilon(1e-9));
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(r[i] <= d[i] * (1 + 1e-12));
        }
        // scale invariance
        const double k = 1 + u(rng);
        std::vector<double> dk = d;
        for (auto &x : dk) {
            x *= k;
        }
        const auto rk = water_fill(cap * k, dk);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(rk[i] == doctest::Approx(r[i] * k).epsilon(1e-9));
        }
        // more capacity never hurts anyone
        const auto more = water_fill(cap * 1.5, d);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(more[i] >= r[i] * (1 - 1e-12));
        }
    }
}

TEST_CASE("multi-resource allocation is max-min fair by definition") {
    std::mt19937_64 rng{11};
    std::uniform_real_distribution<double> u{1.0, 100.0};
    for (int round = 0; round < 2000; ++round) {
        const std::size_t m = 1 + rng() % 4;
        const std::size_t n = 1 + rng() % 6;
        std::vector<double> caps(m);
        for (auto &c : caps) {
            c = u(rng);
        }
        std::vector<FlowDemand> flows(n);
        for (auto &f : flows) {
            f.cap = rng() % 3 == 0 ? unlimited : u(rng);
            for (std::size_t r = 0; r < m; ++r) {
                if (rng() % 2 == 0) {
                    f.usage.emplace_back(r, rng() % 4 == 0 ? 2.0 : 1.0);
                }
            }
            if (f.usage.empty()) {
                f.usage.emplace_back(rng() % m, 1.0);
            }
        }
        const auto rate = max_min_allocate(caps, flows);
        std::vector<double> load(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto [r, c] : flows[i].usage) {
                load[r] += c * rate[i];
            }
        }
        for (std::size_t r = 0; r < m; ++r) {
            REQUIRE(load[r] <= caps[r] * (1 + 1e-9));
        }
        // every flow is either at its cap or has a saturated resource on which
        // no other flow gets a higher rate
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(rate[i] <= flows[i].cap * (1 + 1e-12));
            if (rate[i] >= flows[i].cap * (1 - 1e-9)) {
                continue;
            }
            bool bottleneck = false;
            for (auto [r, c] : flows[i].usage) {
                if (load[r] < caps[r] * (1 - 1e-9)) {
                    continue;
                }
                bool top = true;
                for (std::size_t j = 0; j < n; ++j) {
                    for (auto [rj, cj] : flows[j].usage) {
                        if (rj == r && rate[j] > rate[i] * (1 + 1e-9)) {
                            top = false;
                        }
                    }
                }
                bottleneck = bottleneck || top;
            }
            REQUIRE(bottleneck);
        }
        // deterministic
        REQUIRE(max_min_allocate(caps, flows) == rate);
    }
}

TEST_CASE("relay coefficient halves the share of a shared interface") {
    const double caps[] = {125e6, 90e6};
    const FlowDemand flows[] = {{unlimited, {{0, 1.0}, {1, 2.0}}}};
    CHECK(max_min_allocate(caps, flows)[0] == doctest::Approx(45e6));
}

TEST_CASE("bad allocation input is rejected") {
    const double caps[] = {-1};
    const FlowDemand flows[] = {{1, {{0, 1.0}}}};
    CHECK_THROWS_AS((void)max_min_allocate(caps, flows), hsmsim::ConfigError);
    const double ok[] = {1};
    const FlowDemand bad[] = {{1, {{3, 1.0}}}};
    CHECK_THROWS_AS((void)max_min_allocate(ok, bad), hsmsim::ConfigError);
}
