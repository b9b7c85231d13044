#include "hsmsim/dialect.hpp"
#include "hsmsim/error.hpp"

#include <doctest.h>

using namespace hsmsim;
using namespace hsmsim::ftp;

namespace {

SpeakerProfile client(Dialect d) { return SpeakerProfile::standard(Role::client, d); }
SpeakerProfile server(Dialect d) { return SpeakerProfile::standard(Role::server, d); }

}  // namespace

TEST_CASE("every feature belongs to exactly one group and round-trips through its name") {
    int grid = 0;
    int gsi = 0;
    int common = 0;
    for (Feature f : all_features) {
        switch (group_of(f)) {
            case FeatureGroup::gridftp: ++grid; break;
            case FeatureGroup::gsi_pftp: ++gsi; break;
            case FeatureGroup::common: ++common; break;
        }
        CHECK(parse_feature(to_string(f)) == f);
    }
    CHECK(grid == 6);
    CHECK(gsi == 7);
    CHECK(common == 3);
    CHECK_THROWS_AS((void)parse_feature("MLSD"), ConfigError);
    CHECK(parse_dialect("gsipftp") == Dialect::gsi_pftp);
    CHECK_THROWS_AS((void)parse_dialect("sftp"), ConfigError);
}

TEST_CASE("GridFTP client without DCAU talks to a GSI pftp server") {
    const auto a = negotiate(client(Dialect::gridftp), server(Dialect::gsi_pftp));
    CHECK(a.agreed == FeatureSet{Feature::AUTH, Feature::ADAT, Feature::RFC959});
    CHECK_FALSE(a.parallel);
    CHECK(a.streams == 1);
    CHECK_FALSE(a.tcp_buffer.has_value());
    CHECK(auth_handshake(a) == AuthResult::authenticated);
}

TEST_CASE("a GridFTP client that requires DCAU is refused by a GSI pftp server") {
    auto c = client(Dialect::gridftp);
    c.required.insert(Feature::DCAU);
    try {
        (void)negotiate(c, server(Dialect::gsi_pftp));
        FAIL("negotiation should fail");
    } catch (const RequiredFeatureUnsupported &e) {
        CHECK(e.feature() == Feature::DCAU);
    }
}

TEST_CASE("GSI pftp on both sides agrees on the full GSI pftp feature set") {
    const auto a = negotiate(client(Dialect::gsi_pftp), server(Dialect::gsi_pftp), 4);
    FeatureSet want;
    for (Feature f : all_features) {
        if (group_of(f) != FeatureGroup::gridftp) {
            want.insert(f);
        }
    }
    CHECK(a.agreed == want);
    CHECK(a.parallel);
    CHECK(a.streams == 4);
}

TEST_CASE("GridFTP on both sides gets parallel streams and SBUF") {
    auto c = client(Dialect::gridftp);
    auto s = server(Dialect::gridftp);
    c.sbuf_bytes = 1e6;
    s.sbuf_bytes = 4e6;
    const auto a = negotiate(c, s, 3);
    CHECK(a.parallel);
    CHECK(a.streams == 3);
    REQUIRE(a.tcp_buffer.has_value());
    CHECK(*a.tcp_buffer == 1e6);
}

TEST_CASE("server requirements are enforced too") {
    auto s = server(Dialect::gsi_pftp);
    s.required.insert(Feature::PROT);
    CHECK_THROWS_AS((void)negotiate(client(Dialect::gridftp), s), RequiredFeatureUnsupported);
    CHECK_NOTHROW((void)negotiate(client(Dialect::gsi_pftp), s));
}

TEST_CASE("negotiation is commutative in the agreed set for every dialect pair") {
    const Dialect ds[] = {Dialect::gridftp, Dialect::gsi_pftp, Dialect::plain};
    for (Dialect x : ds) {
        for (Dialect y : ds) {
            const auto a = negotiate(client(x), server(y), 2);
            const auto b = negotiate(client(y), server(x), 2);
            CHECK(a.agreed == b.agreed);
            CHECK(a.parallel == b.parallel);
            CHECK(a.agreed.count(Feature::RFC959) == 1);
            // the agreement never contains what either side lacks
            for (Feature f : a.agreed) {
                CHECK((f == Feature::RFC959 || (client(x).offered.count(f) && server(y).offered.count(f))));
            }
        }
    }
}

TEST_CASE("authentication needs AUTH and ADAT and matching realms") {
    const auto plain = negotiate(client(Dialect::plain), server(Dialect::gsi_pftp));
    CHECK(plain.agreed == FeatureSet{Feature::RFC959});
    CHECK_THROWS_AS((void)auth_handshake(plain), ProtocolError);
    auto c = client(Dialect::gridftp);
    c.realm = "CERN.CH";
    CHECK(auth_handshake(negotiate(c, server(Dialect::gsi_pftp))) == AuthResult::rejected);
}

TEST_CASE("profiles cannot offer foreign features or require what they do not offer") {
    auto c = client(Dialect::gsi_pftp);
    c.offered.insert(Feature::DCAU);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    auto d = client(Dialect::plain);
    d.required.insert(Feature::AUTH);
    CHECK_THROWS_AS(d.validate(), ConfigError);
    CHECK_THROWS_AS((void)negotiate(client(Dialect::gridftp), server(Dialect::gridftp), 0), ConfigError);
}

TEST_CASE("daemon placement selects the data path") {
    CHECK(select_data_path(KerberosPftpdOnCore{}, "mover0") == DataPath{Direct{}});
    CHECK(select_data_path(GsiPftpdOnHost{"mover0"}, "mover0") == DataPath{Direct{}});
    CHECK(select_data_path(GsiPftpdOnHost{"mover0"}, "mover1") == DataPath{Relay{"mover0"}});
}
