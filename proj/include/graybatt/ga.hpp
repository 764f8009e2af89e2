#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graybatt/features.hpp"
#include "graybatt/rng.hpp"
#include "graybatt/stridge.hpp"

namespace graybatt {

// Search unit: inclusion mask over the candidate library plus both
// regularization parameters in log10 space.
struct Genome {
    std::vector<std::uint8_t> mask;
    double log_lambda1 = -6.0;
    double log_lambda2 = -3.0;

    double lambda1() const;
    double lambda2() const;
};

struct GaConfig {
    int population_size = 64;
    int generations = 100;
    int tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate_mask = 0.0;   // 0 = auto 1/|library|
    double mutation_sigma_lambda = 0.25;
    double alpha = 0.45;               // training-MSE weight
    double beta = 0.45;                // validation-MSE weight
    double epsilon = 1e-4;             // max admissible training MSE (V^2)
    int stagnation_patience = 20;
    std::uint64_t seed = 0;

    double log_lambda1_min = -12.0, log_lambda1_max = 2.0;
    double log_lambda2_min = -8.0, log_lambda2_max = 1.0;
    double init_mask_density = 0.5;
    int stridge_max_iters = 10;

    // complexity term: active count normalized by |library| (default) or raw
    bool raw_count_complexity = false;
    // score validation by free-running rollout instead of one-step residuals
    bool free_running_fitness = false;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

// One split of prepared regression data. theta_full/gram cover the full
// candidate library so any mask evaluates via submatrices.
struct RegressionDataset {
    SignalSeries signals;        // regressor rows
    std::vector<double> target;  // one-step-ahead error values
    Matrix theta_full;
    GramSystem gram_full;
    std::vector<std::uint8_t> poisoned;  // descriptors non-finite on this data
    std::string cycle_names;

    // first cycle's trace + measured error, retained for free-running scoring
    // (validation splits are single cycles)
    VoltageTrace lfm_trace;
    std::vector<double> er_full;  // length = trace length

    // Pools regression rows per cycle; pairs never cross cycle boundaries.
    static RegressionDataset prepare(const FeatureLibrary& lib,
                                     const std::vector<const VoltageTrace*>& traces,
                                     const std::vector<const std::vector<double>*>& errors);
    static RegressionDataset prepare(const FeatureLibrary& lib, const VoltageTrace& trace,
                                     const std::vector<double>& er);
};

struct GaDataset {
    const FeatureLibrary* lib = nullptr;
    RegressionDataset train;
    RegressionDataset valid;
};

struct EvaluatedCandidate {
    Genome genome;
    SparseErrorModel model;
    double mse_train = 0.0;
    double mse_valid = 0.0;
    int n_active = 0;
    double loss = 0.0;
    double fitness = 0.0;  // always exactly 1 - loss
    bool feasible = false;
    bool eval_failed = false;
};

struct GenerationStats {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;  // over feasible candidates; NaN when none
    int best_n_active = 0;
    double best_mse_train = 0.0;
    double best_mse_valid = 0.0;
};

struct GaResult {
    EvaluatedCandidate best;
    std::vector<GenerationStats> history;
    bool no_feasible_warning = false;
    int generations_run = 0;
};

// loss = alpha MSE_train + beta MSE_valid + (1-alpha-beta) complexity.
// Feature-evaluation failures mark the candidate infeasible with +inf loss
// instead of aborting the search.
EvaluatedCandidate evaluate_candidate(const Genome& genome, const GaDataset& data,
                                      const GaConfig& cfg);

// Max-fitness genome among k uniform draws; any feasible candidate beats any
// infeasible one.
const EvaluatedCandidate& tournament_select(const std::vector<EvaluatedCandidate>& population,
                                            int k, Rng& rng);

// Uniform crossover per mask bit; lambdas blend arithmetically in log space
// with one shared uniform weight. Children with empty masks get one random
// bit set.
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng,
                                    const GaConfig& cfg);

// Independent per-bit flips plus clipped Gaussian perturbation of the log
// lambdas.
Genome mutate(const Genome& g, Rng& rng, const GaConfig& cfg, double mask_rate);

Genome random_genome(std::size_t library_size, Rng& rng, const GaConfig& cfg);

// Fixed-size (mu + lambda) evolution with elitism of one. Only feasible
// children are admitted unless fewer than two feasible candidates exist that
// generation. Deterministic for a fixed seed regardless of thread count.
GaResult run_ga(const GaConfig& cfg, const GaDataset& data);

void save_history_csv(const std::filesystem::path& path, const std::vector<GenerationStats>& history);

}  // namespace graybatt
