#include "hsmsim/staging.hpp"

#include "hsmsim/dialect.hpp"
#include "hsmsim/error.hpp"

namespace hsmsim::xrsl {

std::string StagingContext::resolve_host(const std::string &url_host) const {
    if (auto it = host_aliases.find(url_host); it != host_aliases.end()) {
        if (!topology->has_host(it->second)) {
            throw ScenarioError{"alias '" + url_host + "' points at unknown host '" + it->second + "'"};
        }
        return it->second;
    }
    if (topology->has_host(url_host)) {
        return url_host;
    }
    throw ScenarioError{"stage-in host '" + url_host + "' is not in the topology"};
}

std::vector<proto::TransferSpec> stage_in_to_transfers(std::span<const StageInRequest> requests,
                                                       const StagingContext &ctx) {
    if (ctx.topology == nullptr) {
        throw ConfigError{"staging context without topology"};
    }
    std::vector<proto::TransferSpec> out;
    for (const auto &req : requests) {
        const std::string server = ctx.resolve_host(req.url.host);
        std::string data_host = server;
        if (auto it = ctx.placement.find(req.url.path); it != ctx.placement.end()) {
            data_host = it->second;
        }
        if (!ctx.topology->is_mover(data_host)) {
            throw ScenarioError{"file " + req.url.path + " is placed on '" + data_host + "', which is not a mover"};
        }
        const ftp::Deployment deployment = server == ctx.topology->core_host
                                               ? ftp::Deployment{ftp::KerberosPftpdOnCore{}}
                                               : ftp::Deployment{ftp::GsiPftpdOnHost{server}};

        proto::TransferSpec spec;
        spec.size = ctx.file_size;
        spec.source = {proto::EndpointKind::disk, data_host, std::nullopt};
        spec.sink = {proto::EndpointKind::disk, ctx.topology->client.name, 0};
        spec.protocol = ctx.protocol;
        spec.path = ctx.topology->path(ctx.path_label);
        spec.data_path = ftp::select_data_path(deployment, data_host);
        spec.overlap = proto::Overlap::parallel;
        spec.label = req.name;
        out.push_back(std::move(spec));
    }
    return out;
}

}  // namespace hsmsim::xrsl
