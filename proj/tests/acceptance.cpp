// Acceptance suite: one criterion per check, one PASS/FAIL line each.
// Usage: acceptance [path-to-cli-binary]
// The CLI path is needed by the determinism and end-to-end criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "graybatt/analysis.hpp"
#include "graybatt/cycle.hpp"
#include "graybatt/errors.hpp"
#include "graybatt/ga.hpp"
#include "graybatt/lfm.hpp"
#include "graybatt/linalg.hpp"
#include "graybatt/pipeline.hpp"
#include "graybatt/reference.hpp"
#include "graybatt/rng.hpp"
#include "graybatt/state_space.hpp"
#include "graybatt/stridge.hpp"

using namespace graybatt;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_work;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DriveCycle walk_cycle(std::size_t n, std::uint64_t seed, const std::string& name,
                      double max_crate = 1.0) {
    CycleBuildSpec spec;
    spec.seed = seed;
    spec.capacity_ah = 2.3;
    spec.name = name;
    spec.segments = {CycleSegment::parse("randwalk:" + std::to_string(max_crate) + ":" +
                                         std::to_string(n))};
    return build_cycle(spec);
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = g_cli + " " + args + " >> " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// criterion 1: ridge vs an independent normal-equations oracle

std::vector<double> ridge_oracle(const Matrix& theta, const std::vector<double>& y, double lambda1) {
    const std::size_t n = theta.rows, m = theta.cols;
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < n; ++k) a[i][j] += theta.at(k, i) * theta.at(k, j);
        a[i][i] += lambda1;
        for (std::size_t k = 0; k < n; ++k) b[i] += theta.at(k, i) * y[k];
    }
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(m, 0.0);
    for (std::size_t ii = m; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t c = ii + 1; c < m; ++c) s -= a[ii][c] * x[c];
        x[ii] = s / a[ii][ii];
    }
    return x;
}

void criterion_ridge_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    const double lambdas[] = {0.0, 1e-6, 1e-2, 1.0};
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 10 + rng.uniform_index(91);
        const std::size_t m = 2 + rng.uniform_index(9);
        Matrix theta(n, m);
        for (auto& v : theta.data) v = 2.0 * rng.uniform() - 1.0;
        std::vector<double> y(n);
        for (auto& v : y) v = 2.0 * rng.uniform() - 1.0;
        const double lambda1 = lambdas[trial % 4];

        const auto got = ridge_solve(theta, y, lambda1);
        const auto want = ridge_oracle(theta, y, lambda1);
        for (std::size_t i = 0; i < m; ++i)
            expect(std::abs(got[i] - want[i]) < 1e-8,
                   "trial " + std::to_string(trial) + ": coefficient " + std::to_string(i) +
                       " differs by " + std::to_string(std::abs(got[i] - want[i])));
    }
    expect(seconds_since(t0) < 5.0, "runtime exceeded 5 s");
}

// ---------------------------------------------------------------------------
// criteria 2-3: planted-model recovery through the full search

constexpr int kPlantedIds[3] = {1, 2, 3};          // er, i, csp
constexpr double kPlantedCoeffs[3] = {0.55, 0.35, 0.2};

RunConfig planted_run_config(double noise_std) {
    RunConfig cfg = RunConfig::defaults();
    cfg.surrogate.planted_ids = {kPlantedIds[0], kPlantedIds[1], kPlantedIds[2]};
    cfg.surrogate.planted_coeffs = {kPlantedCoeffs[0], kPlantedCoeffs[1], kPlantedCoeffs[2]};
    cfg.surrogate.noise_std = noise_std;
    return cfg;
}

void criterion_planted_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = planted_run_config(0.0);
    const auto train = walk_cycle(2000, 201, "train201");
    const auto valid = walk_cycle(1200, 202, "valid202");

    const TrainingBundle bundle = prepare_training(cfg, 7, {train}, valid);
    GaConfig ga = cfg.ga;
    ga.seed = 7;
    const GaResult r = run_ga(ga, bundle.dataset);

    expect(r.best.feasible, "best candidate is not feasible");
    const auto ids = r.best.model.active_ids();
    expect(ids == std::vector<int>{1, 2, 3},
           "recovered support has " + std::to_string(ids.size()) + " terms");
    for (std::size_t j = 0; j < r.best.model.xi.size(); ++j) {
        const int id = r.best.model.descriptors[j].id;
        for (int p = 0; p < 3; ++p)
            if (id == kPlantedIds[p])
                expect(std::abs(r.best.model.xi[j] - kPlantedCoeffs[p]) < 1e-6,
                       "coefficient for descriptor " + std::to_string(id) + " off by " +
                           std::to_string(std::abs(r.best.model.xi[j] - kPlantedCoeffs[p])));
    }

    // free-running rollout vs the generator's ground-truth recursion
    const SurrogateGenerator gen(cfg.surrogate.make_spec(cfg.cell, 7), cfg.cell, *bundle.lib,
                                 {train});
    const auto& lfm = bundle.train_cycles.front().lfm;
    const auto truth = gen.planted_rollout(lfm);
    const auto rolled = simulate_recursive(r.best.model, lfm, 0.0);
    expect(rolled.size() == 2000 && truth.size() == 2000, "rollout length mismatch");
    double worst = 0.0;
    for (std::size_t k = 0; k < rolled.size(); ++k)
        worst = std::max(worst, std::abs(rolled[k] - truth[k]));
    expect(worst < 1e-9, "free-running rollout deviates by " + std::to_string(worst));

    expect(r.best.mse_valid < 1e-10,
           "validation mse " + std::to_string(r.best.mse_valid) + " not < 1e-10");
    expect(seconds_since(t0) < 180.0, "runtime exceeded 3 min");
}

void criterion_noise_robustness() {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = planted_run_config(1e-3);
    const auto train = walk_cycle(2000, 201, "train201");
    const auto valid = walk_cycle(1200, 202, "valid202");

    const TrainingBundle bundle = prepare_training(cfg, 7, {train}, valid);
    GaConfig ga = cfg.ga;
    ga.seed = 7;
    const GaResult r = run_ga(ga, bundle.dataset);

    const auto ids = r.best.model.active_ids();
    for (int p : kPlantedIds)
        expect(std::find(ids.begin(), ids.end(), p) != ids.end(),
               "planted descriptor " + std::to_string(p) + " missing from the support");
    expect(ids.size() <= 3 + 2, "support has " + std::to_string(ids.size() - 3) +
                                    " spurious terms (> 2 allowed)");

    // free-running correlation between measured and predicted error on the
    // validation cycle
    const auto& vc = bundle.valid_cycle;
    const auto e_hat = simulate_recursive(r.best.model, vc.lfm, 0.0);
    const auto rho = pearson(vc.er, e_hat);
    expect(!rho.undefined && rho.rho >= 0.90,
           "validation correlation " + std::to_string(rho.rho) + " below 0.90");
    expect(seconds_since(t0) < 180.0, "runtime exceeded 3 min");
}

// ---------------------------------------------------------------------------
// criterion 4: hybrid improvement on a perturbed-parameter surrogate

void criterion_hybrid_improvement() {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = RunConfig::defaults();
    cfg.surrogate.d_pos_scale = 1.05;
    cfg.surrogate.d_neg_scale = 0.95;
    cfg.surrogate.k_pos_scale = 1.05;
    cfg.surrogate.k_neg_scale = 0.95;
    cfg.surrogate.kappa_scale = 0.95;
    // Sub-millivolt targets with near-unit-root persistence: one-step
    // residuals barely see the drive terms the rollout depends on, so score
    // candidates by their free-running validation error and keep the
    // complexity weight below the per-term rollout gains.
    cfg.ga.alpha = 0.2;
    cfg.ga.beta = 0.799999;
    cfg.ga.free_running_fitness = true;

    const auto train_a = walk_cycle(2400, 301, "train301");
    const auto train_b = walk_cycle(1800, 302, "train302", 1.2);
    const auto valid = walk_cycle(1500, 303, "valid303");
    const auto held_out = walk_cycle(1800, 304, "test304");

    const TrainOutcome outcome = train_model(cfg, 11, {train_a, train_b}, valid);
    expect(outcome.ga.best.feasible, "best candidate infeasible");
    expect(outcome.model.active_count() >= 1, "search returned the zero model");

    const HybridEvaluation ev = evaluate_on_cycle(cfg, 11, outcome.model, held_out, {train_a, train_b});
    expect(!ev.hybrid.rrr_undefined, "RRR undefined");
    expect(ev.hybrid.rrr_percent >= 50.0,
           "held-out RRR " + std::to_string(ev.hybrid.rrr_percent) + "% below 50%");
    expect(seconds_since(t0) < 300.0, "runtime exceeded 5 min");
}

// ---------------------------------------------------------------------------
// criterion 5: structural properties of the thresholded fit

bool is_subset(const std::vector<std::size_t>& inner, const std::vector<std::size_t>& outer) {
    for (auto v : inner)
        if (std::find(outer.begin(), outer.end(), v) == outer.end()) return false;
    return true;
}

void criterion_stridge_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(505);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 15 + rng.uniform_index(60);
        const std::size_t m = 2 + rng.uniform_index(8);
        Matrix theta(n, m);
        for (auto& v : theta.data) v = 2.0 * rng.uniform() - 1.0;
        std::vector<double> y(n);
        for (auto& v : y) v = 2.0 * rng.uniform() - 1.0;
        const double lambda1 = std::pow(10.0, rng.uniform(-9.0, -1.0));
        const double lambda2 = std::pow(10.0, rng.uniform(-4.0, 0.0));

        RidgeProblem p;
        p.theta = theta;
        p.target = y;
        p.lambda1 = lambda1;
        p.lambda2 = lambda2;
        const auto fit = stridge_solve(p);

        for (std::size_t t = 1; t < fit.support_trace.size(); ++t)
            expect(is_subset(fit.support_trace[t], fit.support_trace[t - 1]),
                   "support grew across iterations (trial " + std::to_string(trial) + ")");

        RidgeProblem hi = p;
        hi.lambda2 = lambda2 * 10.0;
        const auto fit_hi = stridge_solve(hi);
        const auto first = [](const StridgeResult& r) {
            return r.support_trace.size() > 1 ? r.support_trace[1] : r.support_trace[0];
        };
        expect(is_subset(first(fit_hi), first(fit)),
               "raising lambda2 enlarged the first surviving support (trial " +
                   std::to_string(trial) + ")");

        const auto xi_a = ridge_solve(theta, y, lambda1);
        const auto xi_b = ridge_solve(theta, y, lambda1 * 50.0);
        double na = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            na += xi_a[i] * xi_a[i];
            nb += xi_b[i] * xi_b[i];
        }
        expect(na >= nb - 1e-15, "larger lambda1 grew the coefficient norm (trial " +
                                     std::to_string(trial) + ")");
    }
    expect(seconds_since(t0) < 10.0, "runtime exceeded 10 s");
}

// ---------------------------------------------------------------------------
// criterion 6: analytic checks on the cell model

void criterion_lfm_analytic() {
    const auto p = default_cell_parameters();

    // diffusion-lag dc gain R/(5D)
    {
        const auto& e = p.positive;
        const double gain = e.particle_radius / (5.0 * e.diffusion_coefficient);
        const double tau = e.particle_radius * e.particle_radius / (35.0 * e.diffusion_coefficient);
        const auto lag = DiscreteStateSpace::first_order_lag(gain, tau, 1.0);
        std::vector<double> x(lag.n, 0.0);
        double y = 0.0;
        for (int k = 0; k < 5000; ++k) {
            y = lag.output(x.data(), 1.0);
            lag.advance(x.data(), 1.0);
        }
        expect(std::abs(y - gain) < 1e-6 * gain, "diffusion dc gain off");
    }

    // electrolyte dc gain (0.124 gp + 0.117 gn) C1/De
    {
        const double want = (0.124 * p.gamma_pos + 0.117 * p.gamma_neg) * electrolyte_c1(p) /
                            p.electrolyte_diffusivity;
        const auto block = realize_electrolyte(p, 1.0);
        std::vector<double> x(block.n, 0.0);
        double y = 0.0;
        for (int k = 0; k < 4000; ++k) {
            y = block.output(x.data(), 1.0);
            block.advance(x.data(), 1.0);
        }
        expect(std::abs(y - want) < 1e-6 * std::abs(want), "electrolyte dc gain off");
    }

    // constant-current bulk slope -I/(F eps L A)
    {
        const double i0 = 2.27;
        DriveCycle cyc;
        cyc.name = "cc";
        for (int k = 0; k < 3600; ++k) {
            cyc.timestamps.push_back(k);
            cyc.current.push_back(i0);
        }
        const auto sim = simulate_cycle(p, cyc);
        const double slope = (sim.trace.c_sp[3599] - sim.trace.c_sp[3000]) / 599.0;
        const double want = -i0 / (p.faraday_constant * p.positive.active_material_fraction *
                                   p.positive.thickness * p.area);
        expect(std::abs(slope - want) < 1e-4 * std::abs(want), "bulk concentration slope off");
    }

    // zero-current voltage constancy
    {
        DriveCycle cyc;
        cyc.name = "rest";
        for (int k = 0; k < 600; ++k) {
            cyc.timestamps.push_back(k);
            cyc.current.push_back(0.0);
        }
        const auto sim = simulate_cycle(p, cyc);
        for (double v : sim.trace.v_lfm)
            expect(std::abs(v - sim.trace.v_lfm.front()) < 1e-12, "rest voltage drifted");
    }
}

// ---------------------------------------------------------------------------
// criterion 7: metric identities

void criterion_metric_identities() {
    Rng rng(707);
    std::vector<double> a(64);
    for (auto& v : a) v = rng.normal();
    std::vector<double> neg = a;
    for (auto& v : neg) v = -v;

    expect(std::abs(pearson(a, a).rho - 1.0) < 1e-12, "rho(a,a) != 1");
    expect(std::abs(pearson(a, neg).rho + 1.0) < 1e-12, "rho(a,-a) != -1");

    const auto r = rrr(0.0160, 0.0070);
    expect(std::abs(r.percent - 56.25) < 1e-9, "RRR(0.0160, 0.0070) != 56.25");
    expect(std::abs(r.percent - 56.28) < 0.1, "RRR not within 0.1 pp of the reported value");
    expect(rrr(0.5, 0.5).percent == 0.0, "RRR of equal inputs != 0");
    expect(rrr(0.5, 0.0).percent == 100.0, "RRR with zero hybrid != 100");

    // rmse^2 == mse on real evaluation reports
    const auto p = default_cell_parameters();
    const auto cycle = walk_cycle(400, 708, "m708");
    const auto lib = FeatureLibrary::build(LibraryConfig{});
    SurrogateSpec spec;
    spec.perturbed = p;
    spec.perturbed.conductivity *= 0.9;
    const auto ref = generate_surrogate_trace(spec, cycle, p, lib);
    const auto lfm = simulate_cycle(p, cycle).trace;
    SparseErrorModel zero;
    zero.descriptors = {BasisDescriptor{0, BasisFamily::pol, {0, 0, 0, 0}}};
    zero.xi = {0.0};
    const auto ev = evaluate_hybrid(zero, lfm, ref);
    for (const auto* rep : {&ev.lfm, &ev.hybrid})
        expect(std::abs(rep->rmse * rep->rmse - rep->mse) <= 1e-12 * rep->mse,
               "rmse^2 != mse beyond 1e-12 relative");
}

// ---------------------------------------------------------------------------
// criterion 8: svd ranking checks

void criterion_svd_ranking() {
    Rng rng(808);
    Matrix s(50, 6);
    for (auto& v : s.data) v = rng.normal();

    const auto svd = linalg::svd_thin(s);
    for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t c = 0; c < s.cols; ++c) {
            double rec = 0.0;
            for (std::size_t k = 0; k < s.cols; ++k)
                rec += svd.u.at(r, k) * svd.sigma[k] * svd.v.at(c, k);
            expect(std::abs(rec - s.at(r, c)) < 1e-9, "U Sigma V^T reconstruction off");
        }

    // least-squares coefficients against the orthonormal projection
    for (std::size_t j = 0; j < s.cols; ++j) {
        std::vector<double> proj(s.cols, 0.0);
        for (std::size_t i = 0; i < s.cols; ++i)
            for (std::size_t k = 0; k < s.rows; ++k) proj[i] += svd.u.at(k, i) * s.at(k, j);
        Matrix utu(s.cols, s.cols);
        std::vector<double> uts = proj;
        for (std::size_t i = 0; i < s.cols; ++i)
            for (std::size_t k = 0; k < s.cols; ++k) {
                double acc = 0.0;
                for (std::size_t r = 0; r < s.rows; ++r) acc += svd.u.at(r, i) * svd.u.at(r, k);
                utu.at(i, k) = acc;
            }
        const auto ls = linalg::pinv_solve_sym(utu, uts, 1e-9);
        for (std::size_t i = 0; i < s.cols; ++i)
            expect(std::abs(ls[i] - proj[i]) < 1e-9, "least-squares vs projection mismatch");
    }

    std::vector<BasisDescriptor> ds;
    for (int i = 0; i < 6; ++i) ds.push_back(BasisDescriptor{i, BasisFamily::pol, {1, 0, 0, 0}});
    const auto rep = svd_rank_matrix(s, ds);
    double prev = 0.0;
    for (const auto& f : rep.features) {
        expect(f.cumulative_info >= prev - 1e-15, "cumulative information decreased");
        prev = f.cumulative_info;
    }
    expect(std::abs(prev - 1.0) < 1e-9, "cumulative information does not end at 1");

    Matrix dominant(20, 3);
    for (std::size_t k = 0; k < 20; ++k) {
        dominant.at(k, 0) = 0.01 * rng.normal();
        dominant.at(k, 1) = 5.0 + rng.normal();
        dominant.at(k, 2) = 0.01 * rng.normal();
    }
    const auto rep2 = svd_rank_matrix(
        dominant, {BasisDescriptor{0, BasisFamily::pol, {1, 0, 0, 0}},
                   BasisDescriptor{1, BasisFamily::pol, {0, 1, 0, 0}},
                   BasisDescriptor{2, BasisFamily::pol, {0, 0, 1, 0}}});
    expect(rep2.features.front().descriptor_id == 1, "dominant column not ranked first");
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical training outputs for a fixed seed

void write_planted_config(const fs::path& path) {
    std::ofstream out(path);
    out << "[surrogate]\n"
           "planted_ids = [1, 2, 3]\n"
           "planted_coeffs = [0.55, 0.35, 0.2]\n"
           "[ga]\n"
           "population_size = 16\n"
           "generations = 12\n"
           "stagnation_patience = 12\n";
}

void criterion_determinism() {
    const fs::path dir = g_work / "determinism";
    fs::create_directories(dir);
    const fs::path log = dir / "cli.log";

    save_cycle_csv(dir / "train.csv", walk_cycle(600, 901, "train"));
    save_cycle_csv(dir / "valid.csv", walk_cycle(400, 902, "valid"));
    write_planted_config(dir / "run.toml");

    for (const char* run : {"a", "b"}) {
        const int rc = run_cli("--config " + (dir / "run.toml").string() + " --seed 7 --out " +
                                   (dir / run).string() + " train --train " +
                                   (dir / "train.csv").string() + " --valid " +
                                   (dir / "valid.csv").string(),
                               log);
        expect(rc == 0, std::string("train run '") + run + "' exited with code " +
                            std::to_string(rc));
    }
    expect(slurp(dir / "a" / "model.json") == slurp(dir / "b" / "model.json"),
           "model.json differs between identical runs");
    expect(!slurp(dir / "a" / "model.json").empty(), "model.json is empty");
    expect(slurp(dir / "a" / "history.csv") == slurp(dir / "b" / "history.csv"),
           "history.csv differs between identical runs");
}

// ---------------------------------------------------------------------------
// criterion 10: desk-scale end-to-end through the CLI

void criterion_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = g_work / "endtoend";
    fs::create_directories(dir);
    const fs::path log = dir / "cli.log";

    // 3600-sample training cycle: constant current, pulses, and a random
    // walk with charge segments in between
    {
        std::ofstream out(dir / "train.toml");
        out << "[surrogate]\n"
               "d_pos_scale = 1.05\nd_neg_scale = 0.95\n"
               "k_pos_scale = 1.05\nk_neg_scale = 0.95\nkappa_scale = 0.95\n"
               "[ga]\n"
               "generations = 40\n"
               "alpha = 0.2\nbeta = 0.799999\n"
               "free_running_fitness = true\n"
               "[cycle]\n"
               "name = \"desk_train\"\n"
               "capacity_ah = 2.3\n"
               "charge_crate = 0.5\n"
               "charge_s = 300\n"
               "segments = [\"cc:0.8:600\", \"pulse:1.2:30:60:900\", \"randwalk:1.0:1500\"]\n";
    }
    {
        std::ofstream out(dir / "valid.toml");
        out << "[cycle]\n"
               "name = \"desk_valid\"\n"
               "capacity_ah = 2.3\n"
               "charge_s = 0\n"
               "segments = [\"randwalk:1.0:1200\"]\n";
    }

    const std::string cfg = " --config " + (dir / "train.toml").string();
    const std::string vcfg = " --config " + (dir / "valid.toml").string();
    const std::string out = " --out " + dir.string();

    expect(run_cli("--seed 31" + cfg + out + " build-cycle", log) == 0, "build-cycle failed");
    expect(run_cli("--seed 32" + vcfg + out + " build-cycle", log) == 0,
           "build-cycle (valid) failed");
    const auto train_csv = (dir / "desk_train.csv").string();
    const auto valid_csv = (dir / "desk_valid.csv").string();
    {
        const auto c = load_cycle_csv(dir / "desk_train.csv");
        expect(c.size() >= 3600, "training cycle shorter than 3600 samples");
    }

    expect(run_cli("--seed 33" + cfg + out + " gen-data --cycles " + train_csv + "," + valid_csv,
                   log) == 0,
           "gen-data failed");
    for (const char* stem : {"desk_train", "desk_valid"})
        for (const char* suffix : {"_lfm.csv", "_ref.csv", "_error.csv"})
            expect(fs::exists(dir / (std::string(stem) + suffix)),
                   std::string(stem) + suffix + " missing");

    expect(run_cli("--seed 33" + cfg + out + " train --train " + train_csv + " --valid " +
                       valid_csv,
                   log) == 0,
           "train failed");
    const auto model_path = (dir / "model.json").string();
    expect(fs::exists(dir / "model.json") && fs::exists(dir / "history.csv"),
           "train outputs missing");
    const auto model = load_model_json(dir / "model.json");
    expect(model.active_count() >= 1, "trained model is empty");

    expect(run_cli("--seed 33" + cfg + out + " evaluate --model " + model_path + " --cycles " +
                       valid_csv + " --timing",
                   log) == 0,
           "evaluate failed");
    expect(fs::exists(dir / "metrics.csv") && fs::exists(dir / "timing.csv"),
           "evaluate outputs missing");

    expect(run_cli("--seed 33" + cfg + out + " rank --model " + model_path + " --cycle " +
                       train_csv,
                   log) == 0,
           "rank failed");
    expect(fs::exists(dir / "ranking.csv"), "ranking.csv missing");

    expect(seconds_since(t0) < 600.0, "pipeline exceeded 10 minutes");
}

}  // namespace

int main(int argc, char** argv) {
    g_cli = argc > 1 ? argv[1] : "./tools/graybatt";
    g_work = fs::temp_directory_path() / "graybatt_acceptance";
    std::error_code ec;
    fs::remove_all(g_work, ec);
    fs::create_directories(g_work);

    struct Criterion {
        int id;
        const char* title;
        std::function<void()> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "ridge solve matches the independent normal-equations oracle", criterion_ridge_oracle},
        {2, "noiseless planted 3-term model is recovered exactly by the search",
         criterion_planted_recovery},
        {3, "noisy recovery keeps the planted support with high correlation",
         criterion_noise_robustness},
        {4, "hybrid model halves the voltage error on a held-out cycle",
         criterion_hybrid_improvement},
        {5, "thresholded-ridge structural properties hold on 200 random problems",
         criterion_stridge_properties},
        {6, "cell-model blocks match their analytic gains and slopes", criterion_lfm_analytic},
        {7, "metric identities (pearson, RRR, rmse^2 = mse)", criterion_metric_identities},
        {8, "svd ranking: reconstruction, projection agreement, ordering", criterion_svd_ranking},
        {9, "identical seed and config give byte-identical training outputs",
         criterion_determinism},
        {10, "desk-scale pipeline finishes end to end through the CLI", criterion_end_to_end},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body();
            std::printf("[PASS] criterion %2d: %s (%.1f s)\n", c.id, c.title, seconds_since(t0));
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %2d: %s -- %s\n", c.id, c.title, e.what());
        }
        std::fflush(stdout);
    }

    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
