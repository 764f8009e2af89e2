#include "graybatt/lfm.hpp"

#include <cmath>
#include <string>

#include "graybatt/csv.hpp"
#include "graybatt/errors.hpp"

namespace graybatt {

double kinetic_overpotential(double c_s, const ElectrodeParameters& e, double current,
                             double temperature, double reference_temperature,
                             double gas_constant, double faraday_constant) {
    if (!(c_s > 0.0) || !(c_s < e.max_concentration))
        throw ParameterDomainError("surface concentration outside (0, c_max)");
    if (!(temperature > 0.0)) throw ParameterDomainError("temperature must be > 0");
    if (!(e.electrolyte_concentration > 0.0))
        throw ParameterDomainError("electrolyte concentration must be > 0");

    const double arrhenius =
        std::exp((1.0 / reference_temperature - 1.0 / temperature) * e.activation_energy / gas_constant);
    const double i0 = arrhenius * faraday_constant * e.reaction_rate *
                      std::sqrt(c_s * (e.max_concentration - c_s) * e.electrolyte_concentration);
    return gas_constant * temperature * (-e.current_density_scaling * current) /
           (faraday_constant * i0);
}

double ohmic_potential(double current, const CellParameters& p) {
    return -current * p.cell_thickness / (p.conductivity * p.area);
}

LfmSimulator::LfmSimulator(CellParameters params, double dt)
    : params_(std::move(params)),
      dt_(dt),
      solid_pos_(realize_solid_diffusion(params_.positive, params_.faraday_constant, params_.area, dt)),
      solid_neg_(realize_solid_diffusion(params_.negative, params_.faraday_constant, params_.area, dt)),
      electrolyte_(realize_electrolyte(params_, dt)) {
    params_.validate();
}

StepResult LfmSimulator::step(const LfmState& state, double current, std::size_t sample_index) const {
    const auto& p = params_;

    const double c_sp = p.positive.initial_concentration + solid_pos_.output(state.solid_pos.data(), current);
    const double c_sn = p.negative.initial_concentration + solid_neg_.output(state.solid_neg.data(), current);

    auto check = [&](double c, const ElectrodeParameters& e, char tag) {
        if (!(c > 0.0) || !(c < e.max_concentration) || !std::isfinite(c))
            throw SaturationError(tag, state.clock, sample_index,
                                  std::string("surface concentration saturated on electrode '") + tag +
                                      "' at t=" + std::to_string(state.clock) + " s (sample " +
                                      std::to_string(sample_index) + ")");
    };
    check(c_sp, p.positive, 'p');
    check(c_sn, p.negative, 'n');

    const double phi_e = electrolyte_.output(state.electrolyte.data(), current);

    const double theta_p = c_sp / p.positive.max_concentration;
    const double theta_n = c_sn / p.negative.max_concentration;
    const double u_p = p.ocv_positive(theta_p);
    const double u_n = p.ocv_negative(theta_n);

    const double eta_p = kinetic_overpotential(c_sp, p.positive, current, p.temperature,
                                               p.reference_temperature, p.gas_constant,
                                               p.faraday_constant);
    const double eta_n = kinetic_overpotential(c_sn, p.negative, current, p.temperature,
                                               p.reference_temperature, p.gas_constant,
                                               p.faraday_constant);

    const double v = u_p - u_n - (eta_p - eta_n) + ohmic_potential(current, p) -
                     current * p.contact_resistance + phi_e;

    StepResult out;
    out.state = state;
    solid_pos_.advance(out.state.solid_pos.data(), current);
    solid_neg_.advance(out.state.solid_neg.data(), current);
    electrolyte_.advance(out.state.electrolyte.data(), current);
    out.state.clock = state.clock + dt_;
    out.v_lfm = v;
    out.c_sp = c_sp;
    out.c_sn = c_sn;
    return out;
}

StepResult step_lfm(const LfmState& state, double current, const CellParameters& p, double dt) {
    return LfmSimulator(p, dt).step(state, current);
}

SimResult simulate_cycle(const CellParameters& p, const DriveCycle& cycle, const LfmState* initial) {
    cycle.validate();
    LfmSimulator sim(p, cycle.dt());

    SimResult result;
    result.trace.cycle_name = cycle.name;
    const std::size_t n = cycle.size();
    result.trace.timestamps = cycle.timestamps;
    result.trace.current = cycle.current;
    result.trace.v_lfm.resize(n);
    result.trace.c_sp.resize(n);
    result.trace.c_sn.resize(n);

    LfmState state = initial != nullptr ? *initial : sim.initial_state();
    for (std::size_t k = 0; k < n; ++k) {
        StepResult r = sim.step(state, cycle.current[k], k);
        result.trace.v_lfm[k] = r.v_lfm;
        result.trace.c_sp[k] = r.c_sp;
        result.trace.c_sn[k] = r.c_sn;
        state = r.state;
    }
    result.final_state = state;
    return result;
}

VoltageTrace load_trace_csv(const std::filesystem::path& path) {
    auto t = csvio::read_csv(path, {"t_s", "current_a", "v_lfm_v", "c_sp_molm3", "c_sn_molm3"});
    VoltageTrace v;
    v.timestamps = std::move(t.columns[0]);
    v.current = std::move(t.columns[1]);
    v.v_lfm = std::move(t.columns[2]);
    v.c_sp = std::move(t.columns[3]);
    v.c_sn = std::move(t.columns[4]);
    v.cycle_name = path.stem().string();
    return v;
}

void save_trace_csv(const std::filesystem::path& path, const VoltageTrace& trace) {
    csvio::write_csv(path, {"t_s", "current_a", "v_lfm_v", "c_sp_molm3", "c_sn_molm3"},
                     {&trace.timestamps, &trace.current, &trace.v_lfm, &trace.c_sp, &trace.c_sn});
}

}  // namespace graybatt
