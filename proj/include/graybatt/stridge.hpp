#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "graybatt/features.hpp"
#include "graybatt/lfm.hpp"
#include "graybatt/linalg.hpp"

namespace graybatt {

// One ridge problem: n x m design against one-step-ahead error targets.
struct RidgeProblem {
    Matrix theta;
    std::vector<double> target;
    double lambda1 = 0.0;  // L2 weight
    double lambda2 = 0.0;  // hard threshold
    int max_iters = 10;

    void validate() const;
};

// Normal-equation form Theta^T Theta / Theta^T y plus the target energy;
// enough to run ridge and STRidge without touching the n-row data again.
// Column subsets are exact submatrices, so masked fits reuse one full-library
// precompute.
struct GramSystem {
    Matrix gram;              // m x m
    std::vector<double> rhs;  // m
    double target_sq_sum = 0.0;
    std::size_t rows = 0;

    static GramSystem from(const Matrix& theta, const std::vector<double>& y);
    GramSystem subset(const std::vector<std::size_t>& idx) const;
};

// Solves (G + lambda1 I) xi = rhs with an SPD Cholesky factorization; on a
// singular system (lambda1 = 0, rank-deficient design) returns the
// minimum-norm least-squares solution instead of failing.
std::vector<double> ridge_solve_gram(const GramSystem& sys, double lambda1);
std::vector<double> ridge_solve(const Matrix& theta, const std::vector<double>& y, double lambda1);

struct StridgeResult {
    std::vector<double> xi;            // full length of the input system
    std::vector<std::size_t> support;  // indices with nonzero coefficients
    bool all_thresholded = false;
    int iterations = 0;
    double training_mse = 0.0;
    // active set entering each iteration, then the final survivors
    std::vector<std::vector<std::size_t>> support_trace;
};

// Sequentially thresholded ridge: initial ridge solve, then up to max_iters
// rounds of {zero |xi| < lambda2, refit on the survivors}. Support never
// regrows; exits early once the support is stable. All coefficients
// thresholded returns the zero model flagged, not an error.
StridgeResult stridge_solve(const GramSystem& sys, double lambda1, double lambda2, int max_iters);
StridgeResult stridge_solve(const RidgeProblem& p);

// Learned sparse error dynamics, self-contained for inference.
struct SparseErrorModel {
    std::vector<BasisDescriptor> descriptors;  // selected set, parent ids kept
    std::vector<double> xi;                    // aligned with descriptors
    SignalStats normalization;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double training_mse = 0.0;
    bool all_thresholded = false;
    std::size_t library_size = 0;  // |Theta_lib| the selection came from
    std::map<std::string, std::string> metadata;

    int active_count() const;
    std::vector<int> active_ids() const;
};

// Fits on the masked library columns and assembles the self-contained model
// (normalization is taken from the parent library).
SparseErrorModel stridge_fit(const RidgeProblem& p, const SelectedLibrary& sel);

// Inner product of the selected features at one step with xi. raw_signals in
// library order [er, i, csp, csn].
double predict_one_step(const SparseErrorModel& m,
                        const std::array<double, kNumSignals>& raw_signals);

// Free-running rollout: e_hat[0] = e_r0, e_hat[k+1] predicted from the
// model's own state. Throws DivergenceError past |e_hat| > 10 V.
std::vector<double> simulate_recursive(const SparseErrorModel& m, const VoltageTrace& lfm_trace,
                                       double e_r0 = 0.0);

// JSON round trip is bit-exact: doubles are emitted with shortest
// round-trip precision.
void save_model_json(const std::filesystem::path& path, const SparseErrorModel& m);
SparseErrorModel load_model_json(const std::filesystem::path& path);

}  // namespace graybatt
