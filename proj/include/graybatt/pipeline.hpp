#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graybatt/analysis.hpp"
#include "graybatt/config.hpp"
#include "graybatt/ga.hpp"
#include "graybatt/reference.hpp"

namespace graybatt {

// One cycle with everything derived from it.
struct PreparedCycle {
    DriveCycle cycle;
    VoltageTrace lfm;
    ReferenceTrace ref;
    std::vector<double> er;
};

// Training-ready bundle. The library (with fitted normalization) is owned
// here; dataset.lib points at it.
struct TrainingBundle {
    std::shared_ptr<FeatureLibrary> lib;
    GaDataset dataset;
    std::vector<PreparedCycle> train_cycles;
    PreparedCycle valid_cycle;
};

// Builds reference traces for the given cycles. In surrogate mode the
// generator's planted dynamics are normalized against `stats_cycles` (the
// training cycles); in files mode `ref_files` must pair with `cycles`.
std::vector<ReferenceTrace> make_references(const RunConfig& cfg, std::uint64_t seed,
                                            const FeatureLibrary& lib,
                                            const std::vector<DriveCycle>& cycles,
                                            const std::vector<DriveCycle>& stats_cycles,
                                            const std::vector<std::filesystem::path>& ref_files);

// Simulate + reference + error + normalization fit + full-library design
// matrices for a train/valid split.
TrainingBundle prepare_training(const RunConfig& cfg, std::uint64_t seed,
                                const std::vector<DriveCycle>& train,
                                const DriveCycle& valid,
                                const std::vector<std::filesystem::path>& train_ref_files = {},
                                const std::optional<std::filesystem::path>& valid_ref_file = {});

struct TrainOutcome {
    GaResult ga;
    SparseErrorModel model;  // best model with run metadata attached
};

// Full training flow: prepare, run the search, stamp metadata.
TrainOutcome train_model(const RunConfig& cfg, std::uint64_t seed,
                         const std::vector<DriveCycle>& train, const DriveCycle& valid,
                         const std::vector<std::filesystem::path>& train_ref_files = {},
                         const std::optional<std::filesystem::path>& valid_ref_file = {});

// Evaluation against a reference (surrogate regenerated with the same seed,
// or an ingested file).
HybridEvaluation evaluate_on_cycle(const RunConfig& cfg, std::uint64_t seed,
                                   const SparseErrorModel& model, const DriveCycle& cycle,
                                   const std::vector<DriveCycle>& stats_cycles,
                                   const std::optional<std::filesystem::path>& ref_file = {},
                                   bool teacher_forced = false);

}  // namespace graybatt
