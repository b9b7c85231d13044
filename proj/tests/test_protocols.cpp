#include "hsmsim/error.hpp"
#include "hsmsim/protocols.hpp"
#include "hsmsim/topology.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hsmsim;
using namespace hsmsim::proto;

namespace {

constexpr double MB = 1e6;
constexpr double lan_rtt = 0.2e-3;
constexpr double wan_rtt = 3.5e-3;

double pdata_rate(double rtt) { return 2e9 / pdata_transfer_time(2e9, 262144, rtt, 80 * MB); }

TransferSpec read_spec(const Topology &t, const std::string &path, EndpointKind sink, Overlap o) {
    TransferSpec s;
    s.path = t.path(path);
    s.sink = {sink, "client", std::nullopt};
    s.overlap = o;
    return s;
}

}  // namespace

TEST_CASE("serial pipeline of mover disk, network and client disk gives 20 MB/s") {
    CHECK(serial_pipeline_rate({{80 * MB, 80 * MB, 40 * MB}, Overlap::serial}) / MB == doctest::Approx(20).epsilon(0.1 / 20));
    CHECK(serial_pipeline_rate({{80 * MB, 80 * MB, 40 * MB}, Overlap::parallel}) == 40 * MB);
    CHECK(serial_pipeline_rate({{80 * MB, net::unlimited}, Overlap::serial}) == doctest::Approx(80 * MB));
    CHECK_THROWS_AS((void)serial_pipeline_rate({{}, Overlap::serial}), ConfigError);
    CHECK_THROWS_AS((void)serial_pipeline_rate({{0.0}, Overlap::serial}), ConfigError);
}

TEST_CASE("serial pipeline is never faster than its slowest stage") {
    std::mt19937_64 rng{3};
    std::uniform_real_distribution<double> u{1, 200};
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> r(1 + rng() % 5);
        for (auto &x : r) {
            x = u(rng);
        }
        const double s = serial_pipeline_rate({r, Overlap::serial});
        const double p = serial_pipeline_rate({r, Overlap::parallel});
        REQUIRE(s <= p * (1 + 1e-12));
        REQUIRE(s >= p / static_cast<double>(r.size()) * (1 - 1e-12));
    }
}

TEST_CASE("pdata over the WAN is about half of LAN; push is not") {
    const double lan = pdata_rate(lan_rtt);
    const double wan = pdata_rate(wan_rtt);
    CHECK(lan / MB == doctest::Approx(75.40).epsilon(0.001));
    CHECK(wan / MB == doctest::Approx(38.68).epsilon(0.001));
    CHECK(wan / lan >= 0.45);
    CHECK(wan / lan <= 0.55);
    const double push_ratio = pdata_push_transfer_time(2e9, lan_rtt, 80 * MB) / pdata_push_transfer_time(2e9, wan_rtt, 80 * MB);
    CHECK(push_ratio >= 0.99);
    CHECK(push_ratio <= 1.0);
}

TEST_CASE("pdata closed forms") {
    CHECK(pdata_transfer_time(1, 262144, 1e-3, 1e6) == doctest::Approx(1e-3 + 0.262144));
    CHECK(pdata_transfer_time(262145, 262144, 0, 262144) == doctest::Approx(2));
    CHECK(pdata_pipelined_transfer_time(524288, 262144, 1, 262144) == doctest::Approx(3));
    CHECK(pdata_push_transfer_time(100, 1, 100) == doctest::Approx(2));
    // pdata time grows with rtt; push barely does
    double prev = 0;
    for (double rtt = 0; rtt < 0.02; rtt += 1e-3) {
        const double t = pdata_transfer_time(2e9, 262144, rtt, 80 * MB);
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("event-driven pdata equals the closed form exactly for files of up to 10 packets") {
    std::mt19937_64 rng{5};
    std::uniform_real_distribution<double> frac{0.01, 1.0};
    int runs = 0;
    for (double packet : {4096.0, 65536.0, 262144.0, 1048576.0}) {
        for (double rtt : {0.0, 0.2e-3, 3.5e-3, 0.05}) {
            for (double rate : {10 * MB, 80 * MB, 125 * MB}) {
                for (int packets = 1; packets <= 10; ++packets) {
                    const double size = packet * (packets - 1) + packet * frac(rng);
                    const auto run = simulate_pdata({size, packet, rtt, rate, false});
                    const SimTime want = SimTime::from_seconds(pdata_transfer_time(size, packet, rtt, rate));
                    REQUIRE(run.completed == want);
                    REQUIRE(run.packets == static_cast<std::uint64_t>(packets));
                    REQUIRE(run.bytes_delivered == doctest::Approx(size));
                    const auto piped = simulate_pdata({size, packet, rtt, rate, true});
                    REQUIRE(piped.completed == SimTime::from_seconds(pdata_pipelined_transfer_time(size, packet, rtt, rate)));
                    ++runs;
                }
            }
        }
    }
    CHECK(runs == 480);
}

TEST_CASE("event-driven pdata of a 2 GB file stays within one clock tick of the closed form") {
    for (double rtt : {lan_rtt, wan_rtt}) {
        const auto run = simulate_pdata({2e9, 262144, rtt, 80 * MB, false});
        const double want = pdata_transfer_time(2e9, 262144, rtt, 80 * MB);
        CHECK(std::abs(run.completed.seconds() - want) <= 1e-6);
        CHECK(run.bytes_delivered == doctest::Approx(2e9));
    }
}

TEST_CASE("pdata machine rejects nonsense parameters") {
    Engine e;
    CHECK_THROWS_AS(PdataMachine(e, {0, 1, 0, 1, false}), ConfigError);
    CHECK_THROWS_AS(PdataMachine(e, {1, 1, -1, 1, false}), ConfigError);
    CHECK_THROWS_AS(PdataMachine(e, {1, 1, 0, 0, false}), ConfigError);
    CHECK_THROWS_AS(validate(Pftp{0, 262144}), ConfigError);
    CHECK(protocol_name(PdataPush{}) == "pdata-push");
}

TEST_CASE("pftp read to /dev/null scales with files until the link saturates") {
    const Topology t = Topology::testbed();
    const auto spec = read_spec(t, "WAN", EndpointKind::null_device, Overlap::parallel);
    const double one_file = 262144 / (wan_rtt + 262144 / (90 * MB));
    double prev = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto r = run_pftp_session(t, spec, n);
        const double want = std::min(static_cast<double>(std::min<std::size_t>(n, 6)) * one_file, 125 * MB);
        INFO("files " << n);
        CHECK(r.aggregate_rate == doctest::Approx(want).epsilon(1e-5));
        CHECK(r.aggregate_rate >= prev * (1 - 1e-6));
        CHECK(r.bytes_delivered == doctest::Approx(2e9 * static_cast<double>(n)));
        CHECK(r.transfers.size() == n);
        prev = r.aggregate_rate;
    }
    // round-robin over movers, then disks
    const auto r = run_pftp_session(t, spec, 4);
    CHECK(r.transfers[0].source == "mover0.disk0");
    CHECK(r.transfers[1].source == "mover1.disk0");
    CHECK(r.transfers[2].source == "mover0.disk1");
    CHECK(r.transfers[3].source == "mover1.disk1");
}

TEST_CASE("pwidth does not help once the window covers a packet") {
    Topology t = Topology::testbed();
    for (auto &m : t.movers) {
        m.tcp_buffer = 1e6;
    }
    t.client.tcp_buffer = 1e6;
    auto spec = read_spec(t, "WAN", EndpointKind::null_device, Overlap::parallel);
    const double r1 = run_pftp_session(t, spec, 1).aggregate_rate;
    spec.protocol = Pftp{4, 262144};
    const double r4 = run_pftp_session(t, spec, 1).aggregate_rate;
    CHECK(r4 == doctest::Approx(r1).epsilon(0.05));
}

TEST_CASE("disk to disk over the LAN is serial and lands near 20 MB/s") {
    const Topology t = Topology::testbed();
    const auto r = run_pftp_session(t, read_spec(t, "LAN", EndpointKind::disk, Overlap::serial), 1);
    CHECK(r.aggregate_rate / MB == doctest::Approx(20).epsilon(0.1));
}

TEST_CASE("concurrent writes from the single client disk lose aggregate throughput") {
    const Topology t = Topology::testbed();
    TransferSpec s;
    s.path = t.path("LAN");
    s.source = {EndpointKind::disk, "client", std::nullopt};
    s.sink = {EndpointKind::disk, "", std::nullopt};
    s.overlap = Overlap::parallel;
    double prev = run_pftp_session(t, s, 1).aggregate_rate;
    for (std::size_t n = 2; n <= 4; ++n) {
        const double a = run_pftp_session(t, s, n).aggregate_rate;
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("relay through another mover halves throughput; through the source host it is direct") {
    Topology t = Topology::testbed();
    for (auto &m : t.movers) {
        m.tcp_buffer = 64e6;
    }
    TransferSpec s;
    s.protocol = PdataPush{};
    s.path = t.path("WAN");
    s.source = {EndpointKind::disk, "mover0", std::nullopt};
    s.sink = {EndpointKind::null_device, "client", std::nullopt};
    s.overlap = Overlap::parallel;
    for (std::size_t n = 1; n <= 4; ++n) {
        const double direct = run_pftp_session(t, s, n).aggregate_rate;
        auto r = s;
        r.data_path = Relay{"mover1"};
        const double relayed = run_relay_transfer(t, r, n).aggregate_rate;
        CHECK(relayed <= direct);
        if (n >= 2) {
            CHECK(relayed <= 0.55 * direct);
        }
        r.data_path = Relay{"mover0"};
        CHECK(run_relay_transfer(t, r, n).aggregate_rate == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("a relay with an unbounded interface matches the direct rate") {
    Topology t = Topology::testbed();
    t.movers[1].nic_capacity = net::unlimited;
    t.movers[1].cpu_throughput_cap = net::unlimited;
    TransferSpec s;
    s.protocol = PdataPush{};
    s.path = t.path("WAN");
    s.source = {EndpointKind::disk, "mover0", std::nullopt};
    s.sink = {EndpointKind::null_device, "client", std::nullopt};
    const double direct = run_pftp_session(t, s, 1).aggregate_rate;
    s.data_path = Relay{"mover1"};
    CHECK(run_relay_transfer(t, s, 1).aggregate_rate == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("transfer validation") {
    const Topology t = Topology::testbed();
    TransferSpec s;
    s.path = t.path("WAN");
    s.size = 0;
    CHECK_THROWS_AS(s.validate(t), ConfigError);
    s.size = 1;
    s.sink = {EndpointKind::disk, "ghost", std::nullopt};
    CHECK_THROWS_WITH_AS(s.validate(t), doctest::Contains("ghost"), ScenarioError);
    s.sink = {EndpointKind::tape_file, "client", std::nullopt};
    CHECK_THROWS_AS(s.validate(t), ConfigError);
    s.sink = {EndpointKind::null_device, "client", std::nullopt};
    s.data_path = Relay{"core"};
    CHECK_THROWS_AS(s.validate(t), ScenarioError);
    s.data_path = Direct{};
    CHECK_THROWS_AS((void)run_pftp_session(t, s, 0), ConfigError);
    CHECK_THROWS_AS((void)run_relay_transfer(t, s, 1), ConfigError);
    CHECK_THROWS_AS((void)t.host("nobody"), ScenarioError);
}

TEST_CASE("client API: WAN about half of LAN at every large buffer, write mirrors read") {
    const Topology t = Topology::testbed();
    const double buffers[] = {65536, 262144, 1048576, 4194304, 16777216};
    const std::string paths[] = {"LAN", "WAN"};
    const auto pts = client_api_sweep(t, buffers, paths);
    REQUIRE(pts.size() == 20);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto &lan = pts[i];
        const auto &wan = pts[i + 10];
        CHECK(lan.rate > wan.rate);
        if (lan.buffer >= 1048576) {
            CHECK(wan.rate / lan.rate >= 0.45);
            CHECK(wan.rate / lan.rate <= 0.55);
        }
    }
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(pts[i].rate == pts[i + 5].rate);
    }
    CHECK(pts[4].rate / MB == doctest::Approx(75.40).epsilon(0.001));
}

TEST_CASE("sessions are deterministic") {
    const Topology t = Topology::testbed();
    const auto spec = read_spec(t, "WAN", EndpointKind::disk, Overlap::serial);
    const auto a = run_pftp_session(t, spec, 3);
    const auto b = run_pftp_session(t, spec, 3);
    CHECK(a.makespan == b.makespan);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.transfers[i].completed == b.transfers[i].completed);
    }
}
