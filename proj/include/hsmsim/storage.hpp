#pragma once

#include "hsmsim/engine.hpp"
#include "hsmsim/sim_time.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hsmsim::storage {

struct Disk {
    std::string id;
    double seq_rate = 80e6;         // bytes/s
    double contention_alpha = 0.2;  // head-contention penalty per extra stream

    void validate() const;

    // seq_rate / (1 + alpha*(n-1)); throws std::invalid_argument for n == 0.
    [[nodiscard]] double aggregate_rate(std::size_t concurrent) const;
};

// Per-stream share of the contended aggregate.
[[nodiscard]] double disk_stream_rate(const Disk &d, std::size_t concurrent);

struct TapeLibraryConfig {
    std::size_t drives = 4;
    std::size_t accessors = 2;
    double exchange_time = 90.0;  // seconds per mount or dismount
    double read_rate = 14e6;      // bytes/s per drive

    void validate() const;
};

struct TapeReadResult {
    std::string file;
    std::size_t drive = 0;
    double bytes = 0;
    SimTime requested_at;
    SimTime transfer_started;
    SimTime completed_at;
    bool needed_mount = false;
};

// Robotic library: cartridges move between slots and drives via a bounded set
// of accessors. Mount jobs are served strictly FIFO; each drive reads one file
// at a time, FIFO, without interleaving.
class TapeLibrary {
public:
    using Callback = std::function<void(const TapeReadResult &)>;

    TapeLibrary(Engine &engine, TapeLibraryConfig config);
    TapeLibrary(const TapeLibrary &) = delete;
    TapeLibrary &operator=(const TapeLibrary &) = delete;

    void add_file(const std::string &file, const std::string &cartridge, double bytes);
    // Initial state only: place a cartridge in an empty drive without robot time.
    void premount(const std::string &cartridge, std::size_t drive);

    // Throws ScenarioError for an unknown file.
    void request_read(const std::string &file, Callback done);

    [[nodiscard]] const TapeLibraryConfig &config() const { return config_; }
    [[nodiscard]] std::size_t peak_exchanges() const { return peak_exchanges_; }
    [[nodiscard]] std::size_t peak_mounted() const { return peak_mounted_; }
    [[nodiscard]] std::size_t mounts_performed() const { return mounts_; }
    [[nodiscard]] std::size_t evictions() const { return evictions_; }
    [[nodiscard]] std::optional<std::size_t> drive_of(const std::string &cartridge) const;

private:
    struct Pending {
        std::string file;
        SimTime requested_at;
        bool needed_mount = false;
        Callback done;
        SimTime started{};
    };
    struct Drive {
        std::optional<std::string> mounted;
        bool exchanging = false;
        std::optional<Pending> active;
        std::deque<Pending> queue;
        SimTime last_used{};
    };
    struct MountJob {
        std::string cartridge;
        std::vector<Pending> reads;
    };
    struct FileInfo {
        std::string cartridge;
        double bytes = 0;
    };

    enum Kind : std::uint32_t { mount_done = 1, transfer_done = 2 };

    void on_event(const Event &ev);
    void dispatch();
    void start_next(std::size_t drive);
    [[nodiscard]] std::optional<std::size_t> pick_drive(bool &evict) const;
    [[nodiscard]] std::size_t mounted_count() const;

    Engine &engine_;
    TapeLibraryConfig config_;
    EntityId self_;
    std::vector<Drive> drives_;
    std::size_t busy_accessors_ = 0;
    std::deque<MountJob> waiting_;
    std::map<std::size_t, MountJob> in_flight_;  // keyed by destination drive
    std::map<std::string, FileInfo> files_;
    std::map<std::string, std::size_t> location_;  // cartridge -> drive, absent when shelved
    std::size_t peak_exchanges_ = 0;
    std::size_t peak_mounted_ = 0;
    std::size_t mounts_ = 0;
    std::size_t evictions_ = 0;
};

struct TapeRunResult {
    std::vector<TapeReadResult> reads;
    SimTime makespan;
    double aggregate_rate = 0;  // bytes / makespan
};

// n files of `bytes` each, one per cartridge, all requested at t=0. With
// `premounted`, cartridges start in drives 0..min(n, drives)-1.
[[nodiscard]] TapeRunResult run_concurrent_tape_reads(const TapeLibraryConfig &config, std::size_t n, double bytes,
                                                      bool premounted);

// Aggregate throughput of n concurrent reads from pre-mounted cartridges.
[[nodiscard]] double aggregate_tape_throughput(const TapeLibraryConfig &config, std::size_t n, double bytes = 2e9);

}  // namespace hsmsim::storage
