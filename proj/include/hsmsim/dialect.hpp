#pragma once

#include "hsmsim/data_path.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace hsmsim::ftp {

// FTP command features. Each belongs to exactly one group (see group_of).
enum class Feature : std::uint8_t {
    // GridFTP only
    SPAS,
    SPOR,
    ETET,
    ESTO,
    SBUF,
    DCAU,
    // GSI-enabled pftp only
    PBSZ,
    PCLO,
    PORPN,
    PPOR,
    PROT,
    PRTR,
    PSTO,
    // common
    AUTH,
    ADAT,
    RFC959,
};

inline constexpr Feature all_features[] = {
    Feature::SPAS, Feature::SPOR, Feature::ETET, Feature::ESTO, Feature::SBUF,  Feature::DCAU,
    Feature::PBSZ, Feature::PCLO, Feature::PORPN, Feature::PPOR, Feature::PROT, Feature::PRTR,
    Feature::PSTO, Feature::AUTH, Feature::ADAT, Feature::RFC959,
};

enum class FeatureGroup { gridftp, gsi_pftp, common };

[[nodiscard]] FeatureGroup group_of(Feature f);
[[nodiscard]] std::string_view to_string(Feature f);
// Throws ConfigError for a name outside the table.
[[nodiscard]] Feature parse_feature(std::string_view name);

enum class Dialect { gridftp, gsi_pftp, plain };
enum class Role { client, server };

[[nodiscard]] std::string_view to_string(Dialect d);
[[nodiscard]] Dialect parse_dialect(std::string_view name);

using FeatureSet = std::set<Feature>;

struct SpeakerProfile {
    Role role = Role::client;
    Dialect dialect = Dialect::plain;
    FeatureSet offered;
    FeatureSet required;
    std::string realm;                  // credential realm presented during AUTH/ADAT
    std::optional<double> sbuf_bytes;   // buffer size proposed through SBUF

    // Full feature set of the dialect, nothing required.
    static SpeakerProfile standard(Role role, Dialect dialect, std::string realm = "KEK.JP");

    // Throws ConfigError when a profile offers features outside its dialect or
    // requires something it does not offer.
    void validate() const;
};

struct SessionAgreement {
    FeatureSet agreed;
    bool parallel = false;              // both sides share a parallel-port mechanism
    std::size_t streams = 1;
    std::optional<double> tcp_buffer;   // set when SBUF was agreed
    DataPath data_path = Direct{};
    std::string client_realm;
    std::string server_realm;
};

class RequiredFeatureUnsupported : public std::runtime_error {
public:
    explicit RequiredFeatureUnsupported(Feature f);
    [[nodiscard]] Feature feature() const { return feature_; }

private:
    Feature feature_;
};

// Intersection of offers plus the RFC959 base. Fails when either side requires
// a feature outside the intersection. `streams` is honoured only when the
// agreement is parallel.
[[nodiscard]] SessionAgreement negotiate(const SpeakerProfile &client, const SpeakerProfile &server,
                                         std::size_t streams = 1);

enum class AuthResult { authenticated, rejected };

// Abstract credential exchange: realms must match. ProtocolError if the
// agreement lacks AUTH or ADAT.
[[nodiscard]] AuthResult auth_handshake(const SessionAgreement &agreement);

// Where the control daemon runs decides the data route.
struct KerberosPftpdOnCore {};
struct GsiPftpdOnHost {
    std::string host;
};
using Deployment = std::variant<KerberosPftpdOnCore, GsiPftpdOnHost>;

[[nodiscard]] DataPath select_data_path(const Deployment &deployment, const std::string &data_mover);

}  // namespace hsmsim::ftp
