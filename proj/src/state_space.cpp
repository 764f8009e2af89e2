#include "graybatt/state_space.hpp"

#include <cmath>

#include "graybatt/errors.hpp"
#include "graybatt/linalg.hpp"

namespace graybatt {

double DiscreteStateSpace::output(const double* state, double u) const {
    double y = d * u;
    for (std::size_t i = 0; i < n; ++i) y += c[i] * state[i];
    return y;
}

void DiscreteStateSpace::advance(double* state, double u) const {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i] * u;
        const double* row = a.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * state[j];
        next[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) state[i] = next[i];
}

double DiscreteStateSpace::dc_gain() const {
    Matrix ima(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            ima.at(i, j) = (i == j ? 1.0 : 0.0) - a[i * n + j];
    std::vector<double> x;
    if (!linalg::gauss_solve(ima, b, x))
        throw ParameterDomainError("dc_gain undefined: block contains an integrator");
    double y = d;
    for (std::size_t i = 0; i < n; ++i) y += c[i] * x[i];
    return y;
}

double DiscreteStateSpace::spectral_radius_bound() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double center = std::abs(a[i * n + i]);
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) off += std::abs(a[i * n + j]);
        best = std::max(best, center + off);
    }
    return best;
}

DiscreteStateSpace DiscreteStateSpace::parallel(const DiscreteStateSpace& p,
                                                const DiscreteStateSpace& q) {
    if (p.dt != q.dt) throw ParameterDomainError("parallel blocks must share dt");
    DiscreteStateSpace r;
    r.n = p.n + q.n;
    r.dt = p.dt;
    r.a.assign(r.n * r.n, 0.0);
    r.b.assign(r.n, 0.0);
    r.c.assign(r.n, 0.0);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j) r.a[i * r.n + j] = p.a[i * p.n + j];
    for (std::size_t i = 0; i < q.n; ++i)
        for (std::size_t j = 0; j < q.n; ++j) r.a[(p.n + i) * r.n + (p.n + j)] = q.a[i * q.n + j];
    for (std::size_t i = 0; i < p.n; ++i) {
        r.b[i] = p.b[i];
        r.c[i] = p.c[i];
    }
    for (std::size_t i = 0; i < q.n; ++i) {
        r.b[p.n + i] = q.b[i];
        r.c[p.n + i] = q.c[i];
    }
    r.d = p.d + q.d;
    return r;
}

DiscreteStateSpace DiscreteStateSpace::integrator(double gain, double dt) {
    if (!(dt > 0.0)) throw ParameterDomainError("dt must be > 0");
    DiscreteStateSpace s;
    s.n = 1;
    s.dt = dt;
    s.a = {1.0};
    s.b = {dt};
    s.c = {gain};
    s.d = gain * dt / 2.0;  // trapezoid feedthrough
    return s;
}

DiscreteStateSpace DiscreteStateSpace::first_order_lag(double gain, double tau, double dt) {
    if (!(dt > 0.0) || !(tau > 0.0)) throw ParameterDomainError("lag requires dt > 0 and tau > 0");
    const double w = 2.0 * tau / dt;
    const double pole = (w - 1.0) / (w + 1.0);
    DiscreteStateSpace s;
    s.n = 1;
    s.dt = dt;
    s.a = {pole};
    s.b = {1.0};
    s.c = {gain * (1.0 + pole) / (1.0 + w)};
    s.d = gain / (1.0 + w);
    return s;
}

DiscreteStateSpace realize_solid_diffusion(const ElectrodeParameters& e, double faraday_constant,
                                           double area, double dt) {
    e.validate("electrode");
    if (!(dt > 0.0)) throw ParameterDomainError("dt must be > 0");
    if (!(faraday_constant > 0.0) || !(area > 0.0))
        throw ParameterDomainError("faraday constant and area must be > 0");

    const double r = e.particle_radius;
    const double diff = e.diffusion_coefficient;
    const double tau = r * r / (35.0 * diff);
    const double lag_gain = r / (5.0 * diff);
    const double input_scale =
        -r / (3.0 * faraday_constant * e.active_material_fraction * e.thickness * area);

    auto bulk_int = DiscreteStateSpace::integrator(3.0 / r, dt);
    auto bulk_lag = DiscreteStateSpace::first_order_lag(lag_gain, tau, dt);
    auto diff_lag = DiscreteStateSpace::first_order_lag(lag_gain, tau, dt);
    auto block = DiscreteStateSpace::parallel(DiscreteStateSpace::parallel(bulk_int, bulk_lag),
                                              diff_lag);
    for (auto& v : block.b) v *= input_scale;
    block.d *= input_scale;
    return block;
}

double electrolyte_c1(const CellParameters& p) {
    if (!(p.initial_electrolyte_concentration > 0.0))
        throw ParameterDomainError("initial_electrolyte_concentration must be > 0");
    const double ce_ratio = p.initial_electrolyte_concentration / 1000.0;
    const double f2 = p.faraday_constant * p.faraday_constant;
    const double lead = 2.0 * p.gas_constant * p.temperature *
                        (-p.cell_thickness / p.surface_area) /
                        (f2 * p.initial_electrolyte_concentration);
    const double conc_term =
        0.601 - 0.24 * std::sqrt(ce_ratio) +
        0.982 * (1.0 - 0.0052 * (p.temperature - p.reference_temperature) * std::pow(ce_ratio, 1.5));
    return lead * (1.0 - p.transference_number) * (1.0 + p.beta) * conc_term;
}

DiscreteStateSpace realize_electrolyte(const CellParameters& p, double dt) {
    if (!(dt > 0.0)) throw ParameterDomainError("dt must be > 0");
    const double c1 = electrolyte_c1(p);
    const double l2 = p.cell_thickness * p.cell_thickness;
    const double tau_pos = 0.1052 * l2 / p.electrolyte_diffusivity;
    const double tau_neg = 0.0997 * l2 / p.electrolyte_diffusivity;

    auto pos = DiscreteStateSpace::first_order_lag(0.124 * p.gamma_pos, tau_pos, dt);
    auto neg = DiscreteStateSpace::first_order_lag(0.117 * p.gamma_neg, tau_neg, dt);
    auto block = DiscreteStateSpace::parallel(pos, neg);
    const double input_scale = c1 / p.electrolyte_diffusivity;
    for (auto& v : block.b) v *= input_scale;
    block.d *= input_scale;
    return block;
}

}  // namespace graybatt
