#pragma once

#include <cstddef>
#include <vector>

#include "graybatt/cell.hpp"

namespace graybatt {

// SISO discrete-time state space x[k+1] = A x[k] + B u[k], y = C x + D u.
// Blocks here come from bilinear (Tustin) discretization, which preserves the
// continuous DC gain exactly and keeps stable poles inside the unit circle;
// the bulk-concentration block carries a marginal pole at 1.
struct DiscreteStateSpace {
    std::size_t n = 0;
    std::vector<double> a;  // n x n row-major
    std::vector<double> b;  // n
    std::vector<double> c;  // n
    double d = 0.0;
    double dt = 0.0;

    double output(const double* state, double u) const;
    void advance(double* state, double u) const;

    // C (I - A)^-1 B + D; throws ParameterDomainError when I - A is singular
    // (blocks containing an integrator have no finite DC gain).
    double dc_gain() const;

    // Gershgorin bound on the spectral radius (exact for the diagonal A
    // matrices produced here).
    double spectral_radius_bound() const;

    // Parallel interconnection: shared input, summed output.
    static DiscreteStateSpace parallel(const DiscreteStateSpace& p, const DiscreteStateSpace& q);

    // y = gain/s discretized by the trapezoid rule.
    static DiscreteStateSpace integrator(double gain, double dt);

    // gain / (tau s + 1), Tustin.
    static DiscreteStateSpace first_order_lag(double gain, double tau, double dt);
};

// Surface-concentration deviation from the initial value in response to the
// applied current: integrator (gain 3/R) in parallel with two identical
// first-order lags (gain R/(5D), time constant R^2/(35 D)), all scaled by
// -R/(3 F eps_am L A). Output units mol/m^3 per ampere of input.
DiscreteStateSpace realize_solid_diffusion(const ElectrodeParameters& e, double faraday_constant,
                                           double area, double dt);

// Electrolyte potential loss: two first-order lags (gains 0.124*gamma_p and
// 0.117*gamma_n, time constants 0.1052 L^2/De and 0.0997 L^2/De) scaled by
// C1/De. Output volts per ampere of input.
DiscreteStateSpace realize_electrolyte(const CellParameters& p, double dt);

// Electrolyte gain constant C1. Bracket grouping: the trailing factor is
// 0.982 * (1 - 0.0052 (T0 - Tref) (ce0/1000)^1.5), added to the two leading
// concentration terms. Negative for nominal parameters via -L_cell/A_s.
double electrolyte_c1(const CellParameters& p);

}  // namespace graybatt
