#include "hsmsim/storage.hpp"

#include "hsmsim/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace hsmsim::storage {

void Disk::validate() const {
    if (!(seq_rate > 0)) {
        throw ConfigError{"disk " + id + ": seq_rate must be > 0"};
    }
    if (!(contention_alpha >= 0)) {
        throw ConfigError{"disk " + id + ": contention_alpha must be >= 0"};
    }
}

double Disk::aggregate_rate(std::size_t concurrent) const {
    if (concurrent == 0) {
        throw std::invalid_argument{"disk " + id + ": stream count must be >= 1"};
    }
    return seq_rate / (1.0 + contention_alpha * static_cast<double>(concurrent - 1));
}

double disk_stream_rate(const Disk &d, std::size_t concurrent) {
    return d.aggregate_rate(concurrent) / static_cast<double>(concurrent);
}

void TapeLibraryConfig::validate() const {
    if (drives == 0) {
        throw ConfigError{"tape library: drives must be >= 1"};
    }
    if (accessors == 0) {
        throw ConfigError{"tape library: accessors must be >= 1"};
    }
    if (!(exchange_time >= 0)) {
        throw ConfigError{"tape library: exchange_time must be >= 0"};
    }
    if (!(read_rate > 0)) {
        throw ConfigError{"tape library: read_rate must be > 0"};
    }
}

TapeLibrary::TapeLibrary(Engine &engine, TapeLibraryConfig config)
    : engine_{engine}, config_{config}, drives_(config.drives) {
    config_.validate();
    self_ = engine_.add_entity([this](Engine &, const Event &ev) { on_event(ev); });
}

void TapeLibrary::add_file(const std::string &file, const std::string &cartridge, double bytes) {
    if (!(bytes > 0)) {
        throw ConfigError{"tape file " + file + ": size must be > 0"};
    }
    if (!files_.emplace(file, FileInfo{cartridge, bytes}).second) {
        throw ConfigError{"tape file " + file + " defined twice"};
    }
}

void TapeLibrary::premount(const std::string &cartridge, std::size_t drive) {
    if (drive >= drives_.size()) {
        throw ConfigError{"premount: no drive " + std::to_string(drive)};
    }
    if (drives_[drive].mounted || location_.count(cartridge) != 0) {
        throw ConfigError{"premount: drive or cartridge already in use"};
    }
    drives_[drive].mounted = cartridge;
    location_[cartridge] = drive;
    peak_mounted_ = std::max(peak_mounted_, mounted_count());
}

std::optional<std::size_t> TapeLibrary::drive_of(const std::string &cartridge) const {
    if (auto it = location_.find(cartridge); it != location_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::size_t TapeLibrary::mounted_count() const {
    return static_cast<std::size_t>(
        std::count_if(drives_.begin(), drives_.end(), [](const Drive &d) { return d.mounted.has_value(); }));
}

void TapeLibrary::request_read(const std::string &file, Callback done) {
    const auto it = files_.find(file);
    if (it == files_.end()) {
        throw ScenarioError{"tape read: unknown file " + file};
    }
    const std::string &cart = it->second.cartridge;
    Pending req{file, engine_.now(), false, std::move(done), {}};

    if (auto loc = location_.find(cart); loc != location_.end()) {
        Drive &d = drives_[loc->second];
        d.queue.push_back(std::move(req));
        if (!d.active) {
            start_next(loc->second);
        }
        return;
    }
    req.needed_mount = true;
    for (auto &[drive, job] : in_flight_) {
        if (job.cartridge == cart) {
            job.reads.push_back(std::move(req));
            return;
        }
    }
    for (auto &job : waiting_) {
        if (job.cartridge == cart) {
            job.reads.push_back(std::move(req));
            return;
        }
    }
    MountJob job{cart, {}};
    job.reads.push_back(std::move(req));
    waiting_.push_back(std::move(job));
    dispatch();
}

std::optional<std::size_t> TapeLibrary::pick_drive(bool &evict) const {
    for (std::size_t i = 0; i < drives_.size(); ++i) {
        if (!drives_[i].mounted && !drives_[i].exchanging) {
            evict = false;
            return i;
        }
    }
    std::optional<std::size_t> lru;
    for (std::size_t i = 0; i < drives_.size(); ++i) {
        const Drive &d = drives_[i];
        if (d.exchanging || d.active || !d.queue.empty()) {
            continue;
        }
        if (!lru || d.last_used < drives_[*lru].last_used) {
            lru = i;
        }
    }
    evict = lru.has_value();
    return lru;
}

void TapeLibrary::dispatch() {
    while (!waiting_.empty() && busy_accessors_ < config_.accessors) {
        bool evict = false;
        const auto drive = pick_drive(evict);
        if (!drive) {
            break;  // head of line waits for a drive; later jobs may not overtake it
        }
        Drive &d = drives_[*drive];
        double cost = config_.exchange_time;
        if (evict) {
            location_.erase(*d.mounted);
            d.mounted.reset();
            cost += config_.exchange_time;
            ++evictions_;
        }
        d.exchanging = true;
        ++busy_accessors_;
        peak_exchanges_ = std::max(peak_exchanges_, busy_accessors_);
        in_flight_.emplace(*drive, std::move(waiting_.front()));
        waiting_.pop_front();
        engine_.schedule(SimTime::from_seconds(cost), self_, {mount_done, *drive});
    }
}

void TapeLibrary::start_next(std::size_t drive) {
    Drive &d = drives_[drive];
    if (d.active || d.queue.empty()) {
        return;
    }
    d.active = std::move(d.queue.front());
    d.queue.pop_front();
    d.active->started = engine_.now();
    const double bytes = files_.at(d.active->file).bytes;
    engine_.schedule(SimTime::from_seconds(bytes / config_.read_rate), self_, {transfer_done, drive});
    d.last_used = engine_.now();
}

void TapeLibrary::on_event(const Event &ev) {
    const auto drive = static_cast<std::size_t>(ev.payload.arg);
    Drive &d = drives_[drive];
    switch (ev.payload.kind) {
        case mount_done: {
            auto node = in_flight_.extract(drive);
            if (node.empty()) {
                throw InternalError{"tape library: mount completion for idle drive"};
            }
            MountJob &job = node.mapped();
            --busy_accessors_;
            d.exchanging = false;
            d.mounted = job.cartridge;
            location_[job.cartridge] = drive;
            peak_mounted_ = std::max(peak_mounted_, mounted_count());
            ++mounts_;
            for (auto &r : job.reads) {
                d.queue.push_back(std::move(r));
            }
            start_next(drive);
            dispatch();
            break;
        }
        case transfer_done: {
            if (!d.active) {
                throw InternalError{"tape library: transfer completion without active read"};
            }
            Pending done = std::move(*d.active);
            d.active.reset();
            const double bytes = files_.at(done.file).bytes;
            TapeReadResult res{done.file,
                               drive,
                               bytes,
                               done.requested_at,
                               done.started,
                               engine_.now(),
                               done.needed_mount};
            d.last_used = engine_.now();
            if (done.done) {
                done.done(res);
            }
            start_next(drive);
            dispatch();
            break;
        }
        default:
            throw InternalError{"tape library: unknown event kind"};
    }
}

TapeRunResult run_concurrent_tape_reads(const TapeLibraryConfig &config, std::size_t n, double bytes,
                                        bool premounted) {
    if (n == 0) {
        throw ConfigError{"tape run: at least one file required"};
    }
    Engine engine;
    TapeLibrary lib{engine, config};
    for (std::size_t i = 0; i < n; ++i) {
        const std::string cart = "C" + std::to_string(i);
        lib.add_file("F" + std::to_string(i), cart, bytes);
        if (premounted && i < config.drives) {
            lib.premount(cart, i);
        }
    }
    TapeRunResult out;
    for (std::size_t i = 0; i < n; ++i) {
        lib.request_read("F" + std::to_string(i), [&out](const TapeReadResult &r) { out.reads.push_back(r); });
    }
    out.makespan = engine.run_until_idle();
    if (out.reads.size() != n) {
        throw InternalError{"tape run: not every read completed"};
    }
    out.aggregate_rate = static_cast<double>(n) * bytes / out.makespan.seconds();
    return out;
}

double aggregate_tape_throughput(const TapeLibraryConfig &config, std::size_t n, double bytes) {
    return run_concurrent_tape_reads(config, n, bytes, true).aggregate_rate;
}

}  // namespace hsmsim::storage
