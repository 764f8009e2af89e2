#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "graybatt/cell.hpp"
#include "graybatt/cycle.hpp"
#include "graybatt/state_space.hpp"

namespace graybatt {

// Discrete-time state of the reduced-order cell model.
struct LfmState {
    std::array<double, 3> solid_pos{};  // bulk integrator, bulk lag, diffusion lag
    std::array<double, 3> solid_neg{};
    std::array<double, 2> electrolyte{};  // positive / negative collector lags
    double clock = 0.0;
};

struct StepResult {
    LfmState state;
    double v_lfm = 0.0;   // volts
    double c_sp = 0.0;    // surface concentration, positive electrode (mol/m^3)
    double c_sn = 0.0;
};

struct VoltageTrace {
    std::vector<double> timestamps;
    std::vector<double> current;
    std::vector<double> v_lfm;
    std::vector<double> c_sp;
    std::vector<double> c_sn;
    std::string cycle_name;

    std::size_t size() const { return timestamps.size(); }
};

struct SimResult {
    VoltageTrace trace;
    LfmState final_state;
};

// eta_i = Rbar T0 (-J_i I) / (F i0_i) with the Arrhenius-corrected exchange
// current density i0_i = exp((1/Tref - 1/T) E/Rbar) F k sqrt(cs (cmax - cs) ce).
// Throws ParameterDomainError when cs leaves (0, cmax).
double kinetic_overpotential(double c_s, const ElectrodeParameters& e, double current,
                             double temperature, double reference_temperature,
                             double gas_constant, double faraday_constant);

double ohmic_potential(double current, const CellParameters& p);

// Realizes all blocks once; step() is then a pure state transition.
class LfmSimulator {
public:
    LfmSimulator(CellParameters params, double dt);

    StepResult step(const LfmState& state, double current, std::size_t sample_index = 0) const;
    LfmState initial_state() const { return LfmState{}; }

    const CellParameters& params() const { return params_; }
    double dt() const { return dt_; }

private:
    CellParameters params_;
    double dt_;
    DiscreteStateSpace solid_pos_;
    DiscreteStateSpace solid_neg_;
    DiscreteStateSpace electrolyte_;
};

// Single-step convenience matching the simulator path exactly.
StepResult step_lfm(const LfmState& state, double current, const CellParameters& p, double dt);

// Deterministic full-cycle simulation from the given state (default: fresh).
SimResult simulate_cycle(const CellParameters& p, const DriveCycle& cycle,
                         const LfmState* initial = nullptr);

VoltageTrace load_trace_csv(const std::filesystem::path& path);
void save_trace_csv(const std::filesystem::path& path, const VoltageTrace& trace);

}  // namespace graybatt
