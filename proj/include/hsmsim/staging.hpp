#pragma once

#include "hsmsim/protocols.hpp"
#include "hsmsim/topology.hpp"
#include "hsmsim/xrsl.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace hsmsim::xrsl {

// How stage-in URLs map onto the simulated test bed.
struct StagingContext {
    const Topology *topology = nullptr;
    std::map<std::string, std::string> host_aliases;  // URL host -> topology host
    std::map<std::string, std::string> placement;     // URL path -> mover holding the file
    std::string path_label = "WAN";
    proto::ProtocolKind protocol = proto::PdataPush{};
    double file_size = 2e9;

    // Alias lookup, then the name itself. Throws ScenarioError.
    [[nodiscard]] std::string resolve_host(const std::string &url_host) const;
};

// Each request becomes a read from the mover holding the file to the client
// (compute element) disk. A gsiftp URL names a GSI-pftpd; when that daemon is
// not on the data mover the transfer is relayed through it.
[[nodiscard]] std::vector<proto::TransferSpec> stage_in_to_transfers(std::span<const StageInRequest> requests,
                                                                     const StagingContext &ctx);

}  // namespace hsmsim::xrsl
