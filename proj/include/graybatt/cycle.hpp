#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace graybatt {

// Current profile sampled on a uniform grid. Positive current = discharge.
struct DriveCycle {
    std::vector<double> timestamps;  // seconds, strictly increasing, uniform
    std::vector<double> current;     // amperes
    std::string name;

    double dt() const { return timestamps[1] - timestamps[0]; }
    std::size_t size() const { return timestamps.size(); }

    // >= 2 samples, spacing uniform within 1e-9 s.
    void validate() const;
};

DriveCycle load_cycle_csv(const std::filesystem::path& path);
void save_cycle_csv(const std::filesystem::path& path, const DriveCycle& cycle);

// One segment of a synthetic cycle. Parsed from compact specs:
//   "cc:<crate>:<seconds>"                      constant current
//   "pulse:<crate>:<on_s>:<off_s>:<seconds>"    discharge/rest pulse train
//   "randwalk:<max_crate>:<seconds>"            seeded bounded C-rate walk
//   "randwalk:<max_crate>:<seconds>:<bias>"     with mean C-rate offset
//   "file:<path>"                               ingest an existing cycle CSV
struct CycleSegment {
    enum class Kind { ConstantCurrent, PulseTrain, RandomWalk, File };
    Kind kind;
    double crate = 0.0;
    double seconds = 0.0;
    double on_s = 0.0;
    double off_s = 0.0;
    double bias_crate = 0.0;
    std::filesystem::path path;

    static CycleSegment parse(const std::string& text);
};

struct CycleBuildSpec {
    std::vector<CycleSegment> segments;
    double capacity_ah = 2.3;   // converts C-rate to amperes
    double dt = 1.0;
    double charge_crate = 0.5;  // constant-current charge inserted between segments
    double charge_s = 0.0;      // 0 disables the inter-segment charge
    std::string name = "cycle";
    std::uint64_t seed = 0;
};

DriveCycle build_cycle(const CycleBuildSpec& spec);

// Concatenates b after a; b's timestamps are shifted to continue a's grid.
DriveCycle concat_cycles(const DriveCycle& a, const DriveCycle& b);

}  // namespace graybatt
