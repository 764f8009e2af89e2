#include "graybatt/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "graybatt/csv.hpp"
#include "graybatt/errors.hpp"

namespace graybatt {

PearsonResult pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw ParameterDomainError("pearson needs two equal-length series of >= 2 samples");
    const auto n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cab = 0.0, caa = 0.0, cbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        cab += da * db;
        caa += da * da;
        cbb += db * db;
    }
    PearsonResult r;
    if (caa == 0.0 || cbb == 0.0) {
        r.undefined = true;
        return r;
    }
    r.rho = cab / std::sqrt(caa * cbb);
    return r;
}

RrrResult rrr(double rmse_lfm, double rmse_hybrid) {
    RrrResult r;
    if (!(rmse_lfm > 0.0)) {
        r.undefined = true;
        return r;
    }
    r.percent = 100.0 * (rmse_lfm - rmse_hybrid) / rmse_lfm;
    return r;
}

namespace {

double mse_of(const std::vector<double>& a, const std::vector<double>& b) {
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sse += d * d;
    }
    return sse / static_cast<double>(a.size());
}

}  // namespace

HybridEvaluation evaluate_hybrid(const SparseErrorModel& model, const VoltageTrace& lfm_trace,
                                 const ReferenceTrace& ref, bool teacher_forced) {
    const std::vector<double> er = compute_error_series(ref, lfm_trace);
    const std::size_t n = lfm_trace.size();

    HybridEvaluation ev;
    if (teacher_forced) {
        ev.e_hat.assign(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k)
            ev.e_hat[k + 1] = predict_one_step(
                model, {er[k], lfm_trace.current[k], lfm_trace.c_sp[k], lfm_trace.c_sn[k]});
    } else {
        ev.e_hat = simulate_recursive(model, lfm_trace, 0.0);
    }

    ev.v_hybrid.resize(n);
    for (std::size_t k = 0; k < n; ++k) ev.v_hybrid[k] = lfm_trace.v_lfm[k] + ev.e_hat[k];

    const char* mode = teacher_forced ? "one_step" : "free_running";

    ev.lfm.mse = mse_of(ref.v_ref, lfm_trace.v_lfm);
    ev.lfm.rmse = std::sqrt(ev.lfm.mse);
    ev.lfm.cycle_name = lfm_trace.cycle_name;
    ev.lfm.mode = mode;
    ev.lfm.pearson_undefined = true;  // correlation reported on the hybrid row
    ev.lfm.rrr_percent = 0.0;

    ev.hybrid.mse = mse_of(ref.v_ref, ev.v_hybrid);
    ev.hybrid.rmse = std::sqrt(ev.hybrid.mse);
    ev.hybrid.cycle_name = lfm_trace.cycle_name;
    ev.hybrid.mode = mode;
    const PearsonResult rho = pearson(er, ev.e_hat);
    ev.hybrid.pearson_rho = rho.rho;
    ev.hybrid.pearson_undefined = rho.undefined;
    const RrrResult rr = rrr(ev.lfm.rmse, ev.hybrid.rmse);
    ev.hybrid.rrr_percent = rr.percent;
    ev.hybrid.rrr_undefined = rr.undefined;

    ev.mse_er = mse_of(er, ev.e_hat);
    return ev;
}

RankingReport svd_rank_matrix(const Matrix& s, const std::vector<BasisDescriptor>& descriptors) {
    const std::size_t n = s.rows;
    const std::size_t m = s.cols;
    if (m == 0 || descriptors.size() != m)
        throw ParameterDomainError("svd_rank_matrix needs one descriptor per column");
    if (n <= m) throw ParameterDomainError("svd_rank_matrix needs more rows than columns");

    const linalg::ThinSvd svd = linalg::svd_thin(s);

    RankingReport report;
    report.singular_values = svd.sigma;
    const double sigma_sum = std::accumulate(svd.sigma.begin(), svd.sigma.end(), 0.0);
    report.all_zero = !(sigma_sum > 0.0);

    // Coefficients u_{j,k} of each weighted-feature column in the left
    // singular basis: least-squares solve, cross-checked against U^T S.
    Matrix utu(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += svd.u.at(k, i) * svd.u.at(k, j);
            utu.at(i, j) = acc;
        }
    std::vector<double> xbar(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> uts(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += svd.u.at(k, i) * s.at(k, j);
            uts[i] = acc;
        }
        const std::vector<double> coeffs = linalg::pinv_solve_sym(utu, uts, 1e-9);
        for (std::size_t i = 0; i < m; ++i) {
            const double projected = (utu.at(i, i) > 0.5) ? uts[i] : 0.0;
            if (std::abs(coeffs[i] - projected) > 1e-9)
                throw std::runtime_error("svd_rank: least-squares coefficients disagree with "
                                         "orthonormal projection beyond 1e-9");
        }
        if (sigma_sum > 0.0) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += coeffs[k] * svd.sigma[k];
            xbar[j] = acc / sigma_sum;
        }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double xa = std::abs(xbar[a]);
        const double xb = std::abs(xbar[b]);
        if (xa != xb) return xa > xb;
        return descriptors[a].id < descriptors[b].id;
    });

    double total = 0.0;
    for (double v : xbar) total += std::abs(v);
    double running = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t j = order[r];
        const BasisDescriptor& d = descriptors[j];
        RankedFeature f;
        f.rank = static_cast<int>(r + 1);
        f.descriptor_id = d.id;
        f.name = d.name();
        f.family = family_name(d.family);
        f.exponents = std::to_string(d.exponents[0]) + ";" + std::to_string(d.exponents[1]) + ";" +
                      std::to_string(d.exponents[2]) + ";" + std::to_string(d.exponents[3]);
        f.xbar = xbar[j];
        if (total > 0.0) {
            running += std::abs(xbar[j]) / total;
            f.cumulative_info = running;
        }
        report.features.push_back(std::move(f));
    }
    return report;
}

RankingReport svd_rank(const SparseErrorModel& model, const VoltageTrace& lfm_trace) {
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < model.xi.size(); ++j)
        if (model.xi[j] != 0.0) active.push_back(j);
    if (active.empty()) throw ParameterDomainError("svd_rank needs >= 1 active feature");

    const std::size_t n_trace = lfm_trace.size();
    const std::size_t m = active.size();
    if (n_trace < 2 || n_trace - 1 <= m)
        throw ParameterDomainError("svd_rank needs more trace rows than active features");

    // signals as seen in free-running operation: the error input is the
    // model's own prediction
    const std::vector<double> e_hat = simulate_recursive(model, lfm_trace, 0.0);
    const std::size_t n = n_trace - 1;

    Matrix s(n, m);
    std::vector<BasisDescriptor> descs;
    descs.reserve(m);
    for (std::size_t j = 0; j < m; ++j) descs.push_back(model.descriptors[active[j]]);

    std::array<double, kNumSignals> raw{}, z{};
    for (std::size_t k = 0; k < n; ++k) {
        raw = {e_hat[k], lfm_trace.current[k], lfm_trace.c_sp[k], lfm_trace.c_sn[k]};
        for (std::size_t sig = 0; sig < kNumSignals; ++sig)
            z[sig] = (raw[sig] - model.normalization.mean[sig]) / model.normalization.stddev[sig];
        for (std::size_t j = 0; j < m; ++j)
            s.at(k, j) = eval_descriptor(descs[j], z) * model.xi[active[j]];
    }
    return svd_rank_matrix(s, descs);
}

TimingReport time_component(const std::string& component, const std::string& cycle_name,
                            const std::function<void()>& body, int runs) {
    runs = std::max(runs, 5);
    std::vector<double> secs;
    secs.reserve(runs);
    for (int i = 0; i < runs; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        secs.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(secs.begin(), secs.end());
    const std::size_t mid = secs.size() / 2;
    const double median =
        (secs.size() % 2 == 1) ? secs[mid] : 0.5 * (secs[mid - 1] + secs[mid]);

    TimingReport r;
    r.component = component;
    r.cycle_name = cycle_name;
    r.median_s = median;
    r.runs = runs;
    return r;
}

void save_metrics_csv(const std::filesystem::path& path, const std::vector<HybridEvaluation>& rows) {
    std::vector<std::vector<std::string>> out;
    for (const auto& ev : rows) {
        out.push_back({ev.hybrid.cycle_name, ev.hybrid.mode, csvio::format_double(ev.lfm.rmse),
                       csvio::format_double(ev.hybrid.rmse),
                       csvio::format_double(ev.hybrid.rrr_percent), csvio::format_double(ev.mse_er),
                       ev.hybrid.pearson_undefined ? "nan"
                                                   : csvio::format_double(ev.hybrid.pearson_rho)});
    }
    csvio::write_csv_text(path,
                          {"cycle", "mode", "rmse_lfm_v", "rmse_hybrid_v", "rrr_pct", "mse_er_v2",
                           "pearson_rho"},
                          out);
}

void save_ranking_csv(const std::filesystem::path& path, const RankingReport& report) {
    std::vector<std::vector<std::string>> out;
    for (const auto& f : report.features) {
        out.push_back({std::to_string(f.rank), std::to_string(f.descriptor_id), f.family,
                       f.exponents, csvio::format_double(f.xbar),
                       csvio::format_double(f.cumulative_info)});
    }
    csvio::write_csv_text(path,
                          {"rank", "descriptor_id", "family", "exponents", "xbar", "cumulative_info"},
                          out);
}

void save_timing_csv(const std::filesystem::path& path, const std::vector<TimingReport>& rows) {
    std::vector<std::vector<std::string>> out;
    for (const auto& t : rows)
        out.push_back({t.component, t.cycle_name, csvio::format_double(t.median_s),
                       std::to_string(t.runs)});
    csvio::write_csv_text(path, {"component", "cycle", "median_s", "runs"}, out);
}

}  // namespace graybatt
