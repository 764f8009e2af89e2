#include "graybatt/stridge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "graybatt/errors.hpp"
#include "graybatt/kernels.hpp"

namespace graybatt {

void RidgeProblem::validate() const {
    const std::size_t n = theta.rows;
    const std::size_t m = theta.cols;
    if (n == 0 || m == 0) throw ParameterDomainError("ridge problem must be non-empty");
    if (target.size() != n) throw ParameterDomainError("ridge target length mismatch");
    if (lambda1 < 0.0 || lambda2 < 0.0) throw ParameterDomainError("lambda1/lambda2 must be >= 0");
    if (max_iters < 1) throw ParameterDomainError("max_iters must be >= 1");
    for (double v : theta.data)
        if (!std::isfinite(v)) throw ParameterDomainError("ridge design contains non-finite entries");
    for (double v : target)
        if (!std::isfinite(v)) throw ParameterDomainError("ridge target contains non-finite entries");
    if (n <= m) std::fprintf(stderr, "warning: ridge problem has n=%zu <= m=%zu\n", n, m);
}

GramSystem GramSystem::from(const Matrix& theta, const std::vector<double>& y) {
    GramSystem sys;
    sys.rows = theta.rows;
    sys.gram = Matrix(theta.cols, theta.cols);
    kern::syrk(theta.data.data(), theta.rows, theta.cols, sys.gram.data.data());
    sys.rhs.resize(theta.cols);
    kern::gemv_t(theta.data.data(), theta.rows, theta.cols, y.data(), sys.rhs.data());
    sys.target_sq_sum = kern::dot(y.data(), y.data(), y.size());
    return sys;
}

GramSystem GramSystem::subset(const std::vector<std::size_t>& idx) const {
    GramSystem sub;
    sub.rows = rows;
    sub.target_sq_sum = target_sq_sum;
    const std::size_t m = idx.size();
    sub.gram = Matrix(m, m);
    sub.rhs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        sub.rhs[i] = rhs[idx[i]];
        for (std::size_t j = 0; j < m; ++j) sub.gram.at(i, j) = gram.at(idx[i], idx[j]);
    }
    return sub;
}

std::vector<double> ridge_solve_gram(const GramSystem& sys, double lambda1) {
    std::vector<double> xi;
    if (linalg::cholesky_solve(sys.gram, lambda1, sys.rhs, xi)) return xi;
    // singular normal equations: minimum-norm solution
    Matrix damped = sys.gram;
    for (std::size_t i = 0; i < damped.rows; ++i) damped.at(i, i) += lambda1;
    return linalg::pinv_solve_sym(damped, sys.rhs);
}

std::vector<double> ridge_solve(const Matrix& theta, const std::vector<double>& y, double lambda1) {
    return ridge_solve_gram(GramSystem::from(theta, y), lambda1);
}

namespace {

// mse = (y'y - 2 xi'b + xi'G xi) / n, clamped at zero against cancellation.
double gram_mse(const GramSystem& sys, const std::vector<std::size_t>& idx,
                const std::vector<double>& xi_active) {
    const std::size_t m = idx.size();
    double cross = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        cross += xi_active[i] * sys.rhs[idx[i]];
        double gi = 0.0;
        for (std::size_t j = 0; j < m; ++j) gi += sys.gram.at(idx[i], idx[j]) * xi_active[j];
        quad += xi_active[i] * gi;
    }
    const double sse = sys.target_sq_sum - 2.0 * cross + quad;
    return std::max(sse, 0.0) / static_cast<double>(sys.rows);
}

}  // namespace

StridgeResult stridge_solve(const GramSystem& sys, double lambda1, double lambda2, int max_iters) {
    const std::size_t m = sys.gram.rows;
    StridgeResult out;
    out.xi.assign(m, 0.0);

    std::vector<std::size_t> active(m);
    std::iota(active.begin(), active.end(), 0);
    std::vector<double> xi_active = ridge_solve_gram(sys, lambda1);
    out.support_trace.push_back(active);

    for (int it = 0; it < max_iters; ++it) {
        out.iterations = it + 1;
        std::vector<std::size_t> keep;
        std::vector<double> kept_xi;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (std::abs(xi_active[i]) >= lambda2) {
                keep.push_back(active[i]);
                kept_xi.push_back(xi_active[i]);
            }
        }
        if (keep.size() == active.size()) break;  // support stable
        if (keep.empty()) {
            out.all_thresholded = true;
            out.support.clear();
            out.support_trace.push_back({});
            out.training_mse = sys.target_sq_sum / static_cast<double>(sys.rows);
            return out;
        }
        active = std::move(keep);
        out.support_trace.push_back(active);
        xi_active = ridge_solve_gram(sys.subset(active), lambda1);
    }

    // drop exact zeros from the reported support
    out.support.clear();
    for (std::size_t i = 0; i < active.size(); ++i) {
        out.xi[active[i]] = xi_active[i];
        if (xi_active[i] != 0.0) out.support.push_back(active[i]);
    }
    out.training_mse = gram_mse(sys, active, xi_active);
    return out;
}

StridgeResult stridge_solve(const RidgeProblem& p) {
    p.validate();
    return stridge_solve(GramSystem::from(p.theta, p.target), p.lambda1, p.lambda2, p.max_iters);
}

int SparseErrorModel::active_count() const {
    int c = 0;
    for (double v : xi) c += (v != 0.0);
    return c;
}

std::vector<int> SparseErrorModel::active_ids() const {
    std::vector<int> ids;
    for (std::size_t i = 0; i < xi.size(); ++i)
        if (xi[i] != 0.0) ids.push_back(descriptors[i].id);
    return ids;
}

SparseErrorModel stridge_fit(const RidgeProblem& p, const SelectedLibrary& sel) {
    sel.validate();
    if (sel.count() != p.theta.cols)
        throw ParameterDomainError("stridge_fit: selection count does not match theta columns");

    StridgeResult r = stridge_solve(p);

    SparseErrorModel model;
    const auto ids = sel.selected_ids();
    model.descriptors.reserve(ids.size());
    for (int id : ids) model.descriptors.push_back(sel.parent->descriptors()[static_cast<std::size_t>(id)]);
    model.xi = std::move(r.xi);
    model.normalization = sel.parent->normalization();
    model.lambda1 = p.lambda1;
    model.lambda2 = p.lambda2;
    model.training_mse = r.training_mse;
    model.all_thresholded = r.all_thresholded;
    model.library_size = sel.parent->size();
    return model;
}

double predict_one_step(const SparseErrorModel& m,
                        const std::array<double, kNumSignals>& raw_signals) {
    std::array<double, kNumSignals> z{};
    for (std::size_t s = 0; s < kNumSignals; ++s)
        z[s] = (raw_signals[s] - m.normalization.mean[s]) / m.normalization.stddev[s];
    double acc = 0.0;
    for (std::size_t j = 0; j < m.descriptors.size(); ++j) {
        if (m.xi[j] == 0.0) continue;
        acc += m.xi[j] * eval_descriptor(m.descriptors[j], z);
    }
    return acc;
}

std::vector<double> simulate_recursive(const SparseErrorModel& m, const VoltageTrace& lfm_trace,
                                       double e_r0) {
    const std::size_t n = lfm_trace.size();
    std::vector<double> e_hat(n, 0.0);
    if (n == 0) return e_hat;
    e_hat[0] = e_r0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double next = predict_one_step(
            m, {e_hat[k], lfm_trace.current[k], lfm_trace.c_sp[k], lfm_trace.c_sn[k]});
        if (!std::isfinite(next) || std::abs(next) > 10.0)
            throw DivergenceError(k + 1, "free-running error prediction diverged at step " +
                                             std::to_string(k + 1));
        e_hat[k + 1] = next;
    }
    return e_hat;
}

namespace {

nlohmann::json stats_to_json(const SignalStats& st) {
    return nlohmann::json{{"mean", st.mean}, {"std", st.stddev}};
}

SignalStats stats_from_json(const nlohmann::json& j) {
    SignalStats st;
    for (std::size_t s = 0; s < kNumSignals; ++s) {
        st.mean[s] = j.at("mean").at(s).get<double>();
        st.stddev[s] = j.at("std").at(s).get<double>();
    }
    return st;
}

}  // namespace

void save_model_json(const std::filesystem::path& path, const SparseErrorModel& m) {
    nlohmann::json j;
    j["format"] = "graybatt-model-v1";
    auto& ds = j["descriptors"] = nlohmann::json::array();
    for (const auto& d : m.descriptors)
        ds.push_back({{"id", d.id}, {"family", family_name(d.family)}, {"exponents", d.exponents}});
    j["xi"] = m.xi;
    j["normalization"] = stats_to_json(m.normalization);
    j["lambda1"] = m.lambda1;
    j["lambda2"] = m.lambda2;
    j["training_mse"] = m.training_mse;
    j["all_thresholded"] = m.all_thresholded;
    j["library_size"] = m.library_size;
    j["active_count"] = m.active_count();
    j["metadata"] = m.metadata;

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ParseError(tmp.string(), 0, "cannot open for write: " + tmp.string());
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

SparseErrorModel load_model_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, path.string() + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "graybatt-model-v1")
            throw ParseError(path.string(), 0, "unknown model format");
        SparseErrorModel m;
        for (const auto& dj : j.at("descriptors")) {
            BasisDescriptor d;
            d.id = dj.at("id").get<int>();
            const auto fam = family_from_name(dj.at("family").get<std::string>());
            if (!fam) throw ParseError(path.string(), 0, "unknown basis family in model");
            d.family = *fam;
            for (std::size_t s = 0; s < kNumSignals; ++s)
                d.exponents[s] = dj.at("exponents").at(s).get<int>();
            m.descriptors.push_back(d);
        }
        m.xi = j.at("xi").get<std::vector<double>>();
        if (m.xi.size() != m.descriptors.size())
            throw ParseError(path.string(), 0, "model xi/descriptor length mismatch");
        m.normalization = stats_from_json(j.at("normalization"));
        m.lambda1 = j.at("lambda1").get<double>();
        m.lambda2 = j.at("lambda2").get<double>();
        m.training_mse = j.at("training_mse").get<double>();
        m.all_thresholded = j.at("all_thresholded").get<bool>();
        m.library_size = j.at("library_size").get<std::size_t>();
        if (j.contains("metadata"))
            m.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, path.string() + ": " + e.what());
    }
}

}  // namespace graybatt
