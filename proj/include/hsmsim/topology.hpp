#pragma once

#include "hsmsim/netmodel.hpp"
#include "hsmsim/storage.hpp"

#include <map>
#include <string>
#include <vector>

namespace hsmsim {

struct HostSpec {
    std::string name;
    double cpu_throughput_cap = 90e6;  // bytes/s the host can push through TCP
    double tcp_buffer = 256e3;         // bytes
    double nic_capacity = 125e6;       // bytes/s, inbound and outbound combined
    std::vector<storage::Disk> disks;

    // Throughput of the host's network interface path (NIC bounded by cpu).
    [[nodiscard]] double io_capacity() const;
    [[nodiscard]] net::Endpoint endpoint() const { return {name, tcp_buffer, cpu_throughput_cap}; }
};

// The storage test bed: disk movers, the core server, one client host, named
// network paths and the tape library.
struct Topology {
    std::vector<HostSpec> movers;
    HostSpec client;
    std::string core_host = "core";
    std::map<std::string, net::NetPath> paths;
    storage::TapeLibraryConfig library;

    // Two movers with two 80 MB/s RAID disks each, a client with one 40 MB/s disk,
    // LAN (0.2 ms) and WAN (3.5 ms) gigabit paths.
    static Topology testbed();

    // Throws ScenarioError naming the host.
    [[nodiscard]] const HostSpec &host(const std::string &name) const;
    [[nodiscard]] bool has_host(const std::string &name) const;
    [[nodiscard]] bool is_mover(const std::string &name) const;
    [[nodiscard]] std::size_t mover_index(const std::string &name) const;
    [[nodiscard]] const net::NetPath &path(const std::string &label) const;

    void validate() const;
};

}  // namespace hsmsim
