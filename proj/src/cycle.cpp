#include "graybatt/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graybatt/csv.hpp"
#include "graybatt/errors.hpp"
#include "graybatt/rng.hpp"

namespace graybatt {

void DriveCycle::validate() const {
    if (timestamps.size() < 2) throw ParameterDomainError("cycle needs >= 2 samples");
    if (timestamps.size() != current.size())
        throw ParameterDomainError("cycle timestamp/current length mismatch");
    const double step = timestamps[1] - timestamps[0];
    if (!(step > 0.0)) throw ParameterDomainError("cycle timestamps must be strictly increasing");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        const double d = timestamps[i] - timestamps[i - 1];
        if (!(d > 0.0)) throw ParameterDomainError("cycle timestamps must be strictly increasing");
        if (std::abs(d - step) > 1e-9)
            throw ParameterDomainError("cycle spacing must be uniform within 1e-9 s (sample " +
                                       std::to_string(i) + ")");
    }
    for (double v : current)
        if (!std::isfinite(v)) throw ParameterDomainError("cycle current must be finite");
}

DriveCycle load_cycle_csv(const std::filesystem::path& path) {
    auto t = csvio::read_csv(path, {"t_s", "current_a"});
    DriveCycle c;
    c.timestamps = std::move(t.columns[0]);
    c.current = std::move(t.columns[1]);
    c.name = path.stem().string();
    try {
        c.validate();
    } catch (const ParameterDomainError& e) {
        throw ParseError(path.string(), 0, path.string() + ": " + e.what());
    }
    return c;
}

void save_cycle_csv(const std::filesystem::path& path, const DriveCycle& cycle) {
    csvio::write_csv(path, {"t_s", "current_a"}, {&cycle.timestamps, &cycle.current});
}

CycleSegment CycleSegment::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);

    auto num = [&](std::size_t i) {
        try {
            return std::stod(parts.at(i));
        } catch (const std::exception&) {
            throw ConfigError("bad cycle segment '" + text + "'");
        }
    };

    CycleSegment s;
    if (parts[0] == "cc" && parts.size() == 3) {
        s.kind = Kind::ConstantCurrent;
        s.crate = num(1);
        s.seconds = num(2);
    } else if (parts[0] == "pulse" && parts.size() == 5) {
        s.kind = Kind::PulseTrain;
        s.crate = num(1);
        s.on_s = num(2);
        s.off_s = num(3);
        s.seconds = num(4);
    } else if (parts[0] == "randwalk" && (parts.size() == 3 || parts.size() == 4)) {
        s.kind = Kind::RandomWalk;
        s.crate = num(1);
        s.seconds = num(2);
        s.bias_crate = parts.size() == 4 ? num(3) : 0.0;
    } else if (parts[0] == "file" && parts.size() >= 2) {
        s.kind = Kind::File;
        // path may itself contain ':'; rejoin
        std::string p = parts[1];
        for (std::size_t i = 2; i < parts.size(); ++i) p += ":" + parts[i];
        s.path = p;
    } else {
        throw ConfigError("unknown cycle segment '" + text + "'");
    }
    return s;
}

namespace {

void append_samples(std::vector<double>& current, double amps, std::size_t count) {
    current.insert(current.end(), count, amps);
}

std::size_t steps_for(double seconds, double dt) {
    const auto k = static_cast<std::size_t>(std::llround(seconds / dt));
    return std::max<std::size_t>(k, 1);
}

}  // namespace

DriveCycle build_cycle(const CycleBuildSpec& spec) {
    if (spec.segments.empty()) throw ConfigError("cycle build needs >= 1 segment");
    if (!(spec.dt > 0.0)) throw ConfigError("cycle dt must be > 0");
    if (!(spec.capacity_ah > 0.0)) throw ConfigError("cycle capacity_ah must be > 0");

    const double amps_per_c = spec.capacity_ah;
    std::vector<double> current;

    for (std::size_t si = 0; si < spec.segments.size(); ++si) {
        const auto& seg = spec.segments[si];
        if (si > 0 && spec.charge_s > 0.0)
            append_samples(current, -spec.charge_crate * amps_per_c, steps_for(spec.charge_s, spec.dt));

        switch (seg.kind) {
            case CycleSegment::Kind::ConstantCurrent:
                append_samples(current, seg.crate * amps_per_c, steps_for(seg.seconds, spec.dt));
                break;
            case CycleSegment::Kind::PulseTrain: {
                const std::size_t total = steps_for(seg.seconds, spec.dt);
                const std::size_t on = steps_for(seg.on_s, spec.dt);
                const std::size_t off = steps_for(seg.off_s, spec.dt);
                for (std::size_t k = 0; k < total; ++k) {
                    const std::size_t phase = k % (on + off);
                    current.push_back(phase < on ? seg.crate * amps_per_c : 0.0);
                }
                break;
            }
            case CycleSegment::Kind::RandomWalk: {
                // AR(1) walk in C-rate, clipped to +-max_crate around the bias.
                Rng rng = Rng::derive(spec.seed, 0x437953454757ULL, si);
                const std::size_t total = steps_for(seg.seconds, spec.dt);
                double c = 0.0;
                for (std::size_t k = 0; k < total; ++k) {
                    c = 0.98 * c + 0.08 * seg.crate * rng.normal();
                    c = std::clamp(c, -seg.crate, seg.crate);
                    current.push_back((c + seg.bias_crate) * amps_per_c);
                }
                break;
            }
            case CycleSegment::Kind::File: {
                DriveCycle ingested = load_cycle_csv(seg.path);
                if (std::abs(ingested.dt() - spec.dt) > 1e-9)
                    throw ConfigError("ingested cycle " + seg.path.string() + " has dt " +
                                      std::to_string(ingested.dt()) + ", expected " +
                                      std::to_string(spec.dt));
                current.insert(current.end(), ingested.current.begin(), ingested.current.end());
                break;
            }
        }
    }

    DriveCycle out;
    out.current = std::move(current);
    out.timestamps.resize(out.current.size());
    for (std::size_t i = 0; i < out.timestamps.size(); ++i)
        out.timestamps[i] = static_cast<double>(i) * spec.dt;
    out.name = spec.name;
    out.validate();
    return out;
}

DriveCycle concat_cycles(const DriveCycle& a, const DriveCycle& b) {
    a.validate();
    b.validate();
    if (std::abs(a.dt() - b.dt()) > 1e-9) throw ParameterDomainError("concat requires equal dt");
    DriveCycle out = a;
    const double base = a.timestamps.back() + a.dt();
    for (std::size_t i = 0; i < b.size(); ++i) {
        out.timestamps.push_back(base + static_cast<double>(i) * a.dt());
        out.current.push_back(b.current[i]);
    }
    out.name = a.name + "+" + b.name;
    out.validate();
    return out;
}

}  // namespace graybatt
