#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "graybatt/linalg.hpp"
#include "graybatt/reference.hpp"
#include "graybatt/stridge.hpp"

namespace graybatt {

// Sample Pearson correlation. undefined == true when either series is
// constant (rho is then meaningless, value set to 0).
struct PearsonResult {
    double rho = 0.0;
    bool undefined = false;
};
PearsonResult pearson(const std::vector<double>& a, const std::vector<double>& b);

// Relative RMSE reduction in percent: 100 (lfm - hybrid) / lfm.
struct RrrResult {
    double percent = 0.0;
    bool undefined = false;  // rmse_lfm == 0
};
RrrResult rrr(double rmse_lfm, double rmse_hybrid);

struct MetricsReport {
    double mse = 0.0;   // V^2
    double rmse = 0.0;  // V, always sqrt(mse)
    double pearson_rho = 0.0;
    bool pearson_undefined = false;
    double rrr_percent = 0.0;
    bool rrr_undefined = false;
    std::string cycle_name;
    std::string mode;  // "one_step" | "free_running"
};

struct HybridEvaluation {
    MetricsReport lfm;      // reference vs bare low-fidelity voltage
    MetricsReport hybrid;   // reference vs v_lfm + e_hat
    double mse_er = 0.0;    // MSE(e_r, e_hat)
    std::vector<double> e_hat;
    std::vector<double> v_hybrid;
};

// Free-running by default: e_hat is the model's recursive rollout from
// e_r0 = 0. teacher_forced = true instead predicts each step from the
// measured error (diagnostic mode).
HybridEvaluation evaluate_hybrid(const SparseErrorModel& model, const VoltageTrace& lfm_trace,
                                 const ReferenceTrace& ref, bool teacher_forced = false);

struct RankedFeature {
    int rank = 0;           // 1-based
    int descriptor_id = 0;
    std::string name;
    std::string family;
    std::string exponents;  // "e0;e1;e2;e3"
    double xbar = 0.0;      // singular-value-weighted coefficient
    double cumulative_info = 0.0;
};

struct RankingReport {
    std::vector<RankedFeature> features;     // sorted by rank
    std::vector<double> singular_values;     // descending
    bool all_zero = false;                   // weighted feature matrix was zero
};

// Ranking core on an explicit weighted feature matrix S (columns already
// scaled by their coefficients). Coefficients expressing each column of S in
// the left singular basis come from a least-squares solve, cross-checked
// against the orthonormal projection U^T S (must agree to 1e-9). Features
// are ordered by |xbar| descending, ties by descriptor id; cumulative_info
// accumulates |xbar| normalized to end at 1.
RankingReport svd_rank_matrix(const Matrix& s, const std::vector<BasisDescriptor>& descriptors);

// Builds S from the model's active features over a free-running rollout on
// the trace (the error signal is the model's own prediction) and ranks it.
RankingReport svd_rank(const SparseErrorModel& model, const VoltageTrace& lfm_trace);

struct TimingReport {
    std::string component;  // lfm | hybrid | surrogate
    std::string cycle_name;
    double median_s = 0.0;
    int runs = 0;
};

// Median wall-clock seconds of >= 5 runs of the given callable.
TimingReport time_component(const std::string& component, const std::string& cycle_name,
                            const std::function<void()>& body, int runs = 5);

// cycle,mode,rmse_lfm_v,rmse_hybrid_v,rrr_pct,mse_er_v2,pearson_rho
void save_metrics_csv(const std::filesystem::path& path, const std::vector<HybridEvaluation>& rows);

// rank,descriptor_id,family,exponents,xbar,cumulative_info
void save_ranking_csv(const std::filesystem::path& path, const RankingReport& report);

void save_timing_csv(const std::filesystem::path& path, const std::vector<TimingReport>& rows);

}  // namespace graybatt
