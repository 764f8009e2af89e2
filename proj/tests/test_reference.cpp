#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "graybatt/errors.hpp"
#include "graybatt/reference.hpp"
#include "graybatt/rng.hpp"
#include "graybatt/stridge.hpp"

using namespace graybatt;

namespace {

DriveCycle walk_cycle(std::size_t n, std::uint64_t seed, double max_crate = 1.0) {
    CycleBuildSpec spec;
    spec.seed = seed;
    spec.capacity_ah = 2.3;
    spec.name = "walk" + std::to_string(seed);
    spec.segments = {CycleSegment::parse("randwalk:" + std::to_string(max_crate) + ":" +
                                         std::to_string(n))};
    return build_cycle(spec);
}

SignalSeries regressor_rows_of(const VoltageTrace& trace, const std::vector<double>& er) {
    SignalSeries s;
    s.er.assign(er.begin(), er.end() - 1);
    s.current.assign(trace.current.begin(), trace.current.end() - 1);
    s.csp.assign(trace.c_sp.begin(), trace.c_sp.end() - 1);
    s.csn.assign(trace.c_sn.begin(), trace.c_sn.end() - 1);
    return s;
}

}  // namespace

TEST_CASE("error series is exact elementwise subtraction") {
    VoltageTrace lfm;
    ReferenceTrace ref;
    Rng rng(1);
    for (int k = 0; k < 5; ++k) {
        lfm.timestamps.push_back(k);
        lfm.current.push_back(0.0);
        lfm.v_lfm.push_back(3.8 + 0.1 * rng.uniform());
        lfm.c_sp.push_back(0.0);
        lfm.c_sn.push_back(0.0);
        ref.timestamps.push_back(k);
        ref.current.push_back(0.0);
        ref.v_ref.push_back(3.8 + 0.1 * rng.uniform());
    }

    SUBCASE("identical traces give zero error") {
        ref.v_ref = lfm.v_lfm;
        for (double e : compute_error_series(ref, lfm)) CHECK(e == 0.0);
    }

    SUBCASE("constant offset is recovered exactly") {
        for (std::size_t k = 0; k < 5; ++k) ref.v_ref[k] = lfm.v_lfm[k] + 0.01;
        for (double e : compute_error_series(ref, lfm))
            CHECK(e == doctest::Approx(0.01).epsilon(1e-12));
    }

    SUBCASE("random pair matches the elementwise oracle") {
        const auto er = compute_error_series(ref, lfm);
        for (std::size_t k = 0; k < 5; ++k) CHECK(er[k] == ref.v_ref[k] - lfm.v_lfm[k]);
    }

    SUBCASE("misaligned timestamps report the first mismatch") {
        ref.timestamps[3] += 0.5;
        try {
            compute_error_series(ref, lfm);
            FAIL("expected AlignmentError");
        } catch (const AlignmentError& e) {
            CHECK(e.first_mismatch() == 3);
        }
    }

    SUBCASE("length mismatch is an alignment error") {
        ref.timestamps.push_back(5);
        ref.current.push_back(0.0);
        ref.v_ref.push_back(3.8);
        CHECK_THROWS_AS(compute_error_series(ref, lfm), AlignmentError);
    }
}

TEST_CASE("plain surrogate with identical parameters produces zero error") {
    const auto p = default_cell_parameters();
    const auto lib = FeatureLibrary::build(LibraryConfig{});
    const auto cycle = walk_cycle(300, 2);

    SurrogateSpec spec;
    spec.perturbed = p;
    const auto ref = generate_surrogate_trace(spec, cycle, p, lib);
    const auto lfm = simulate_cycle(p, cycle).trace;
    for (double e : compute_error_series(ref, lfm)) CHECK(e == 0.0);
    CHECK(ref.source_tag == ReferenceTrace::Source::surrogate);
}

TEST_CASE("planted recursion matches an independent forward simulation") {
    const auto p = default_cell_parameters();
    const auto lib = FeatureLibrary::build(LibraryConfig{});
    const auto cycle = walk_cycle(600, 3);

    SurrogateSpec spec;
    spec.perturbed = p;
    spec.planted_terms = {{1, 0.6}, {2, 0.2}};  // er^1 and i^1

    const SurrogateGenerator gen(spec, p, lib, {cycle});
    const auto ref = gen.generate(cycle);
    const auto lfm = simulate_cycle(p, cycle).trace;
    const auto er = compute_error_series(ref, lfm);

    // independent rollout in the generator's normalized coordinates
    const SignalStats st = gen.shared_stats();
    std::vector<double> want(cycle.size(), 0.0);
    for (std::size_t k = 0; k + 1 < cycle.size(); ++k) {
        const double ze = (want[k] - st.mean[0]) / st.stddev[0];
        const double zi = (lfm.current[k] - st.mean[1]) / st.stddev[1];
        want[k + 1] = 0.6 * ze + 0.2 * zi;
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) CHECK(std::abs(er[k] - want[k]) < 1e-12);
}

TEST_CASE("generator statistics are the statistics of the data it generates") {
    const auto p = default_cell_parameters();
    const auto lib = FeatureLibrary::build(LibraryConfig{});
    const auto cycle = walk_cycle(500, 4);

    SurrogateSpec spec;
    spec.perturbed = p;
    spec.planted_terms = {{1, 0.55}, {2, 0.25}};
    const SurrogateGenerator gen(spec, p, lib, {cycle});

    const auto lfm = simulate_cycle(p, cycle).trace;
    const auto er = compute_error_series(gen.generate(cycle), lfm);
    const auto rows = regressor_rows_of(lfm, er);
    const SignalStats measured = fit_signal_stats({&rows});
    const SignalStats used = gen.shared_stats();

    CHECK(std::abs(measured.mean[0] - used.mean[0]) <= 1e-12 * used.stddev[0]);
    CHECK(std::abs(measured.stddev[0] - used.stddev[0]) <= 1e-12 * used.stddev[0]);
    // non-error signals come from the base trace and must match exactly
    for (std::size_t s = 1; s < kNumSignals; ++s) {
        CHECK(measured.mean[s] == used.mean[s]);
        CHECK(measured.stddev[s] == used.stddev[s]);
    }
}

TEST_CASE("planted model is recoverable by a thresholded fit on the exact library") {
    const auto p = default_cell_parameters();
    auto lib = FeatureLibrary::build(LibraryConfig{});
    const auto cycle = walk_cycle(800, 5);

    SurrogateSpec spec;
    spec.perturbed = p;
    spec.planted_terms = {{1, 0.6}, {2, 0.2}, {3, 0.05}};
    const SurrogateGenerator gen(spec, p, lib, {cycle});

    const auto lfm = simulate_cycle(p, cycle).trace;
    const auto er = compute_error_series(gen.generate(cycle), lfm);
    const auto rows = regressor_rows_of(lfm, er);
    lib.fit_normalization({&rows});

    const auto sel = SelectedLibrary::all(lib);
    RidgeProblem prob;
    prob.theta = evaluate_features(sel, rows);
    prob.target.assign(er.begin() + 1, er.end());
    prob.lambda1 = 1e-10;
    prob.lambda2 = 1e-4;
    const auto model = stridge_fit(prob, sel);

    CHECK(model.active_ids() == std::vector<int>{1, 2, 3});
    CHECK(std::abs(model.xi[1] - 0.6) < 1e-6);
    CHECK(std::abs(model.xi[2] - 0.2) < 1e-6);
    CHECK(std::abs(model.xi[3] - 0.05) < 1e-6);
}

TEST_CASE("noise is reproducible per seed and absent when std is zero") {
    const auto p = default_cell_parameters();
    const auto lib = FeatureLibrary::build(LibraryConfig{});
    const auto cycle = walk_cycle(200, 6);

    SurrogateSpec spec;
    spec.perturbed = p;
    spec.noise_std = 1e-3;
    spec.seed = 77;
    const auto a = generate_surrogate_trace(spec, cycle, p, lib);
    const auto b = generate_surrogate_trace(spec, cycle, p, lib);
    CHECK(a.v_ref == b.v_ref);

    spec.seed = 78;
    const auto c = generate_surrogate_trace(spec, cycle, p, lib);
    CHECK(a.v_ref != c.v_ref);

    SurrogateSpec clean;
    clean.perturbed = p;
    const auto d = generate_surrogate_trace(clean, cycle, p, lib);
    const auto e = generate_surrogate_trace(clean, cycle, p, lib);
    CHECK(d.v_ref == e.v_ref);
}

TEST_CASE("surrogate spec validation") {
    const auto lib = FeatureLibrary::build(LibraryConfig{});
    SurrogateSpec spec;
    spec.perturbed = default_cell_parameters();
    spec.noise_std = -1.0;
    CHECK_THROWS_AS(spec.validate(lib), ParameterDomainError);
    spec.noise_std = 0.0;
    spec.planted_terms = {{9999, 0.1}};
    CHECK_THROWS_AS(spec.validate(lib), ParameterDomainError);
}

TEST_CASE("reference csv loader enforces schema and uniform spacing") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "graybatt_test_ref";
    fs::create_directories(dir);

    const auto good = dir / "good.csv";
    std::ofstream(good) << "t_s,current_a,v_ref_v\n0,1,4.1\n1,1,4.0\n2,1,3.95\n";
    const auto r = load_reference_csv(good);
    CHECK(r.size() == 3);
    CHECK(r.source_tag == ReferenceTrace::Source::ingested);

    const auto bad_schema = dir / "bad_schema.csv";
    std::ofstream(bad_schema) << "t_s,v_ref_v\n0,4.1\n";
    CHECK_THROWS_AS(load_reference_csv(bad_schema), ParseError);

    const auto bad_dt = dir / "bad_dt.csv";
    std::ofstream(bad_dt) << "t_s,current_a,v_ref_v\n0,1,4.1\n1,1,4.0\n3,1,3.9\n";
    try {
        load_reference_csv(bad_dt);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }

    // round trip
    const auto rt = dir / "rt.csv";
    save_reference_csv(rt, r);
    const auto r2 = load_reference_csv(rt);
    CHECK(r2.v_ref == r.v_ref);
    CHECK(r2.timestamps == r.timestamps);
}
