#include "hsmsim/topology.hpp"

#include "hsmsim/error.hpp"

#include <algorithm>
#include <set>

namespace hsmsim {

double HostSpec::io_capacity() const { return std::min(nic_capacity, cpu_throughput_cap); }

Topology Topology::testbed() {
    Topology t;
    for (int m = 0; m < 2; ++m) {
        HostSpec mover;
        mover.name = "mover" + std::to_string(m);
        mover.cpu_throughput_cap = 90e6;
        mover.tcp_buffer = 262144;
        mover.nic_capacity = 125e6;
        for (int d = 0; d < 2; ++d) {
            mover.disks.push_back({mover.name + ".disk" + std::to_string(d), 80e6, 0.2});
        }
        t.movers.push_back(std::move(mover));
    }
    t.client.name = "client";
    t.client.cpu_throughput_cap = 125e6;
    t.client.tcp_buffer = 64e6;
    t.client.nic_capacity = 125e6;
    t.client.disks.push_back({"client.disk0", 40e6, 0.2});
    t.paths["LAN"] = net::NetPath{"LAN", 0.2e-3, 125e6, 0.0, 0.0};
    t.paths["WAN"] = net::NetPath{"WAN", 3.5e-3, 125e6, 0.0, 0.0};
    return t;
}

bool Topology::has_host(const std::string &name) const {
    if (name == client.name || name == core_host) {
        return true;
    }
    return std::any_of(movers.begin(), movers.end(), [&](const HostSpec &h) { return h.name == name; });
}

const HostSpec &Topology::host(const std::string &name) const {
    if (name == client.name) {
        return client;
    }
    for (const auto &m : movers) {
        if (m.name == name) {
            return m;
        }
    }
    throw ScenarioError{"unknown host '" + name + "'"};
}

bool Topology::is_mover(const std::string &name) const {
    return std::any_of(movers.begin(), movers.end(), [&](const HostSpec &h) { return h.name == name; });
}

std::size_t Topology::mover_index(const std::string &name) const {
    for (std::size_t i = 0; i < movers.size(); ++i) {
        if (movers[i].name == name) {
            return i;
        }
    }
    throw ScenarioError{"'" + name + "' is not a disk mover"};
}

const net::NetPath &Topology::path(const std::string &label) const {
    const auto it = paths.find(label);
    if (it == paths.end()) {
        throw ScenarioError{"unknown network path '" + label + "'"};
    }
    return it->second;
}

void Topology::validate() const {
    if (movers.empty()) {
        throw ConfigError{"topology: at least one mover required"};
    }
    std::set<std::string> names{client.name, core_host};
    if (names.size() != 2) {
        throw ConfigError{"topology: client and core host share a name"};
    }
    for (const auto &h : movers) {
        if (!names.insert(h.name).second) {
            throw ConfigError{"topology: duplicate host name '" + h.name + "'"};
        }
        if (h.disks.empty()) {
            throw ConfigError{"topology: mover " + h.name + " has no disks"};
        }
    }
    client.endpoint().validate();
    for (const auto &h : movers) {
        h.endpoint().validate();
        if (!(h.nic_capacity > 0)) {
            throw ConfigError{"topology: " + h.name + " nic_capacity must be > 0"};
        }
        for (const auto &d : h.disks) {
            d.validate();
        }
    }
    for (const auto &d : client.disks) {
        d.validate();
    }
    for (const auto &[label, p] : paths) {
        p.validate();
    }
    library.validate();
}

}  // namespace hsmsim
