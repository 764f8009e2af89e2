#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "graybatt/cell.hpp"
#include "graybatt/cycle.hpp"
#include "graybatt/features.hpp"
#include "graybatt/lfm.hpp"

namespace graybatt {

// Reference voltage aligned 1:1 with a drive cycle.
struct ReferenceTrace {
    enum class Source { ingested, surrogate };

    std::vector<double> timestamps;
    std::vector<double> current;
    std::vector<double> v_ref;
    Source source_tag = Source::ingested;
    std::string cycle_name;

    std::size_t size() const { return timestamps.size(); }
};

// Stand-in for an external high-fidelity data source: a perturbed-parameter
// copy of the cell plus an optional planted sparse error recursion and
// additive Gaussian measurement noise on the reference voltage.
struct SurrogateSpec {
    CellParameters perturbed;
    std::vector<std::pair<int, double>> planted_terms;  // (library descriptor id, coefficient)
    double noise_std = 0.0;  // volts
    std::uint64_t seed = 0;

    void validate(const FeatureLibrary& lib) const;
};

// e_r[k] = v_ref[k] - v_lfm[k], exact elementwise. Throws AlignmentError with
// the first mismatching index when timestamps disagree.
std::vector<double> compute_error_series(const ReferenceTrace& ref, const VoltageTrace& lfm);

// Generates reference traces whose planted error dynamics share one
// normalization with the training data a downstream fit will see.
//
// The planted recursion runs on z-scored signals. The error-signal statistics
// are solved as a fixed point over the training cycles: the statistics of the
// produced error series equal (to ~1e-13 relative) the statistics used inside
// the recursion, which is what makes a planted model recoverable by a
// regression that z-scores with training statistics.
class SurrogateGenerator {
public:
    SurrogateGenerator(SurrogateSpec spec, CellParameters base, const FeatureLibrary& lib,
                       const std::vector<DriveCycle>& training_cycles);

    // Works for any cycle; noise is seeded per (spec seed, cycle name) so
    // repeated generation is reproducible. noise_std == 0 draws nothing.
    ReferenceTrace generate(const DriveCycle& cycle) const;

    // Planted recursion state for a base-model trace (no noise, no model
    // discrepancy); useful as a ground-truth rollout.
    std::vector<double> planted_rollout(const VoltageTrace& base_trace) const;

    const SignalStats& shared_stats() const { return stats_; }
    bool has_planted() const { return !spec_.planted_terms.empty(); }

private:
    std::vector<double> rollout_with(const VoltageTrace& base_trace, const SignalStats& st) const;

    SurrogateSpec spec_;
    CellParameters base_;
    const FeatureLibrary* lib_;
    SignalStats stats_;  // meaningful only when planted terms exist
};

// Single-cycle convenience: the cycle itself is the training block.
ReferenceTrace generate_surrogate_trace(const SurrogateSpec& spec, const DriveCycle& cycle,
                                        const CellParameters& p_base, const FeatureLibrary& lib);

ReferenceTrace load_reference_csv(const std::filesystem::path& path);
void save_reference_csv(const std::filesystem::path& path, const ReferenceTrace& ref);

}  // namespace graybatt
