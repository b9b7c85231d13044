#include "hsmsim/dialect.hpp"

#include "hsmsim/error.hpp"

#include <algorithm>
#include <iterator>

namespace hsmsim::ftp {

FeatureGroup group_of(Feature f) {
    // no default: an unclassified enumerator is a -Werror=switch failure
    switch (f) {
        case Feature::SPAS:
        case Feature::SPOR:
        case Feature::ETET:
        case Feature::ESTO:
        case Feature::SBUF:
        case Feature::DCAU:
            return FeatureGroup::gridftp;
        case Feature::PBSZ:
        case Feature::PCLO:
        case Feature::PORPN:
        case Feature::PPOR:
        case Feature::PROT:
        case Feature::PRTR:
        case Feature::PSTO:
            return FeatureGroup::gsi_pftp;
        case Feature::AUTH:
        case Feature::ADAT:
        case Feature::RFC959:
            return FeatureGroup::common;
    }
    throw InternalError{"unclassified FTP feature"};
}

std::string_view to_string(Feature f) {
    switch (f) {
        case Feature::SPAS: return "SPAS";
        case Feature::SPOR: return "SPOR";
        case Feature::ETET: return "ETET";
        case Feature::ESTO: return "ESTO";
        case Feature::SBUF: return "SBUF";
        case Feature::DCAU: return "DCAU";
        case Feature::PBSZ: return "PBSZ";
        case Feature::PCLO: return "PCLO";
        case Feature::PORPN: return "PORPN";
        case Feature::PPOR: return "PPOR";
        case Feature::PROT: return "PROT";
        case Feature::PRTR: return "PRTR";
        case Feature::PSTO: return "PSTO";
        case Feature::AUTH: return "AUTH";
        case Feature::ADAT: return "ADAT";
        case Feature::RFC959: return "RFC959";
    }
    throw InternalError{"unnamed FTP feature"};
}

Feature parse_feature(std::string_view name) {
    for (Feature f : all_features) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ConfigError{"unknown FTP feature '" + std::string{name} + "'"};
}

std::string_view to_string(Dialect d) {
    switch (d) {
        case Dialect::gridftp: return "gridftp";
        case Dialect::gsi_pftp: return "gsipftp";
        case Dialect::plain: return "plain";
    }
    throw InternalError{"unnamed dialect"};
}

Dialect parse_dialect(std::string_view name) {
    for (Dialect d : {Dialect::gridftp, Dialect::gsi_pftp, Dialect::plain}) {
        if (to_string(d) == name) {
            return d;
        }
    }
    throw ConfigError{"unknown FTP dialect '" + std::string{name} + "'"};
}

namespace {

bool native_to(Dialect d, Feature f) {
    const FeatureGroup g = group_of(f);
    switch (d) {
        case Dialect::gridftp:
            return g != FeatureGroup::gsi_pftp;
        case Dialect::gsi_pftp:
            return g != FeatureGroup::gridftp;
        case Dialect::plain:
            return f == Feature::RFC959;
    }
    return false;
}

bool has_all(const FeatureSet &s, std::initializer_list<Feature> fs) {
    return std::all_of(fs.begin(), fs.end(), [&](Feature f) { return s.count(f) != 0; });
}

}  // namespace

SpeakerProfile SpeakerProfile::standard(Role role, Dialect dialect, std::string realm) {
    SpeakerProfile p;
    p.role = role;
    p.dialect = dialect;
    p.realm = std::move(realm);
    for (Feature f : all_features) {
        if (native_to(dialect, f)) {
            p.offered.insert(f);
        }
    }
    return p;
}

void SpeakerProfile::validate() const {
    for (Feature f : offered) {
        if (!native_to(dialect, f)) {
            throw ConfigError{std::string{to_string(dialect)} + " speaker cannot offer " + std::string{to_string(f)}};
        }
    }
    for (Feature f : required) {
        if (offered.count(f) == 0) {
            throw ConfigError{"profile requires " + std::string{to_string(f)} + " without offering it"};
        }
    }
    if (offered.count(Feature::RFC959) == 0) {
        throw ConfigError{"every FTP speaker offers the RFC959 base"};
    }
    if (sbuf_bytes && !(*sbuf_bytes > 0)) {
        throw ConfigError{"SBUF size must be > 0"};
    }
}

RequiredFeatureUnsupported::RequiredFeatureUnsupported(Feature f)
    : std::runtime_error{"required feature " + std::string{to_string(f)} + " is not supported by the peer"},
      feature_{f} {}

SessionAgreement negotiate(const SpeakerProfile &client, const SpeakerProfile &server, std::size_t streams) {
    client.validate();
    server.validate();
    if (streams == 0) {
        throw ConfigError{"negotiate: stream count must be >= 1"};
    }

    SessionAgreement a;
    std::set_intersection(client.offered.begin(), client.offered.end(), server.offered.begin(),
                          server.offered.end(), std::inserter(a.agreed, a.agreed.end()));
    a.agreed.insert(Feature::RFC959);

    for (const SpeakerProfile *p : {&client, &server}) {
        for (Feature f : p->required) {
            if (a.agreed.count(f) == 0) {
                throw RequiredFeatureUnsupported{f};
            }
        }
    }

    // SPAS/SPOR is GridFTP's striped/parallel port pair; PPOR/PORPN is our
    // mapping of the GSI-pftp equivalent.
    a.parallel = has_all(a.agreed, {Feature::SPAS, Feature::SPOR}) || has_all(a.agreed, {Feature::PPOR, Feature::PORPN});
    a.streams = a.parallel ? streams : 1;

    if (a.agreed.count(Feature::SBUF) != 0) {
        if (client.sbuf_bytes && server.sbuf_bytes) {
            a.tcp_buffer = std::min(*client.sbuf_bytes, *server.sbuf_bytes);
        } else if (client.sbuf_bytes) {
            a.tcp_buffer = client.sbuf_bytes;
        } else {
            a.tcp_buffer = server.sbuf_bytes;
        }
    }
    a.client_realm = client.realm;
    a.server_realm = server.realm;
    return a;
}

AuthResult auth_handshake(const SessionAgreement &agreement) {
    for (Feature f : {Feature::AUTH, Feature::ADAT}) {
        if (agreement.agreed.count(f) == 0) {
            throw ProtocolError{"agreement lacks " + std::string{to_string(f)}};
        }
    }
    return agreement.client_realm == agreement.server_realm ? AuthResult::authenticated : AuthResult::rejected;
}

DataPath select_data_path(const Deployment &deployment, const std::string &data_mover) {
    if (std::holds_alternative<KerberosPftpdOnCore>(deployment)) {
        return Direct{};  // control on the core server, data straight from the mover
    }
    const auto &gsi = std::get<GsiPftpdOnHost>(deployment);
    if (gsi.host == data_mover) {
        return Direct{};
    }
    return Relay{gsi.host};
}

}  // namespace hsmsim::ftp
