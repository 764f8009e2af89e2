#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "graybatt/config.hpp"
#include "graybatt/csv.hpp"
#include "graybatt/cycle.hpp"
#include "graybatt/errors.hpp"

using namespace graybatt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "graybatt_test_cycle";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("segment spec parsing") {
    auto cc = CycleSegment::parse("cc:1.5:600");
    CHECK(cc.kind == CycleSegment::Kind::ConstantCurrent);
    CHECK(cc.crate == 1.5);
    CHECK(cc.seconds == 600);

    auto pulse = CycleSegment::parse("pulse:2:30:60:600");
    CHECK(pulse.kind == CycleSegment::Kind::PulseTrain);
    CHECK(pulse.on_s == 30);
    CHECK(pulse.off_s == 60);

    auto walk = CycleSegment::parse("randwalk:1.2:900:0.1");
    CHECK(walk.kind == CycleSegment::Kind::RandomWalk);
    CHECK(walk.bias_crate == 0.1);

    auto file = CycleSegment::parse("file:/tmp/a.csv");
    CHECK(file.kind == CycleSegment::Kind::File);
    CHECK(file.path == fs::path("/tmp/a.csv"));

    CHECK_THROWS_AS(CycleSegment::parse("nope:1:2"), ConfigError);
    CHECK_THROWS_AS(CycleSegment::parse("cc:abc:2"), ConfigError);
}

TEST_CASE("constant-current and pulse builders") {
    CycleBuildSpec spec;
    spec.capacity_ah = 2.0;
    spec.dt = 1.0;
    spec.charge_s = 0.0;
    spec.segments = {CycleSegment::parse("cc:1.0:10"), CycleSegment::parse("pulse:2.0:2:3:10")};
    const auto c = build_cycle(spec);
    c.validate();
    REQUIRE(c.size() == 20);
    for (std::size_t i = 0; i < 10; ++i) CHECK(c.current[i] == 2.0);
    // pulse: 2 on, 3 off
    CHECK(c.current[10] == 4.0);
    CHECK(c.current[11] == 4.0);
    CHECK(c.current[12] == 0.0);
    CHECK(c.current[14] == 0.0);
    CHECK(c.current[15] == 4.0);
}

TEST_CASE("inter-segment charge is inserted between segments") {
    CycleBuildSpec spec;
    spec.capacity_ah = 1.0;
    spec.charge_crate = 0.5;
    spec.charge_s = 5.0;
    spec.segments = {CycleSegment::parse("cc:1:4"), CycleSegment::parse("cc:2:4")};
    const auto c = build_cycle(spec);
    REQUIRE(c.size() == 13);
    for (std::size_t i = 4; i < 9; ++i) CHECK(c.current[i] == -0.5);
    CHECK(c.current[9] == 2.0);
}

TEST_CASE("random walk is bounded, seeded, and reproducible") {
    CycleBuildSpec spec;
    spec.capacity_ah = 2.0;
    spec.seed = 42;
    spec.segments = {CycleSegment::parse("randwalk:1.5:500")};
    const auto a = build_cycle(spec);
    const auto b = build_cycle(spec);
    CHECK(a.current == b.current);
    for (double i : a.current) CHECK(std::abs(i) <= 1.5 * 2.0 + 1e-12);

    spec.seed = 43;
    const auto c = build_cycle(spec);
    CHECK(a.current != c.current);
}

TEST_CASE("cycle csv round-trips bit-exactly") {
    CycleBuildSpec spec;
    spec.seed = 7;
    spec.segments = {CycleSegment::parse("randwalk:1.0:50")};
    const auto cycle = build_cycle(spec);

    const auto path = temp_dir() / "roundtrip.csv";
    save_cycle_csv(path, cycle);
    const auto loaded = load_cycle_csv(path);
    CHECK(loaded.timestamps == cycle.timestamps);
    CHECK(loaded.current == cycle.current);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("file ingestion concatenates into the build") {
    const auto ingest = temp_dir() / "ingest.csv";
    {
        DriveCycle c;
        c.timestamps = {0.0, 1.0, 2.0};
        c.current = {0.5, 0.6, 0.7};
        save_cycle_csv(ingest, c);
    }
    CycleBuildSpec spec;
    spec.charge_s = 0.0;
    spec.segments = {CycleSegment::parse("cc:1:2"), CycleSegment::parse("file:" + ingest.string())};
    const auto c = build_cycle(spec);
    REQUIRE(c.size() == 5);
    CHECK(c.current[2] == 0.5);
    CHECK(c.current[4] == 0.7);
}

TEST_CASE("cycle validation rejects non-uniform spacing with the sample index") {
    DriveCycle c;
    c.timestamps = {0.0, 1.0, 2.5};
    c.current = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(c.validate(), ParameterDomainError);

    const auto path = temp_dir() / "bad.csv";
    std::ofstream(path) << "t_s,current_a\n0,0\n1,0\n2.5,0\n";
    CHECK_THROWS_AS(load_cycle_csv(path), ParseError);
}

TEST_CASE("csv loader reports header mismatch and bad fields with line numbers") {
    const auto path = temp_dir() / "hdr.csv";
    std::ofstream(path) << "wrong,header\n1,2\n";
    try {
        csvio::read_csv(path, {"t_s", "current_a"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }

    std::ofstream(path) << "t_s,current_a\n0,0\n1,zzz\n";
    try {
        csvio::read_csv(path, {"t_s", "current_a"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("config parsing: sections, scalars, arrays, comments") {
    const auto cfg = ConfigFile::parse_string(R"(
# top comment
[cell]
area = 0.25        # trailing comment
name = "demo"
flag = true
knots = [0.0, 0.5, 1.0]
words = ["a", "b"]
)");
    CHECK(cfg.get_double("cell", "area", 0.0) == 0.25);
    CHECK(cfg.get_string("cell", "name", "") == "demo");
    CHECK(cfg.get_bool("cell", "flag", false));
    CHECK(cfg.get_double_array("cell", "knots") == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(cfg.get_string_array("cell", "words") == std::vector<std::string>{"a", "b"});
    CHECK(cfg.get_double("cell", "missing", 9.5) == 9.5);
    CHECK_THROWS_AS(cfg.get_double("cell", "name", 0.0), ConfigError);
}

TEST_CASE("config parse errors carry line numbers") {
    try {
        ConfigFile::parse_string("[cell]\noops\n", "inline");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("run config applies overrides on top of defaults") {
    const auto file = ConfigFile::parse_string(R"(
[cell]
area = 0.2
[positive]
initial_stoichiometry = 0.8
[ga]
population_size = 16
alpha = 0.4
beta = 0.4
[library]
max_degree = 3
families = ["pol", "tanh"]
[surrogate]
noise_std = 0.002
[cycle]
segments = ["cc:1:100"]
capacity_ah = 3.0
)");
    const auto cfg = RunConfig::from_config(file);
    CHECK(cfg.cell.area == 0.2);
    CHECK(cfg.cell.positive.initial_concentration ==
          doctest::Approx(0.8 * cfg.cell.positive.max_concentration));
    CHECK(cfg.ga.population_size == 16);
    CHECK(cfg.library.max_degree == 3);
    CHECK(cfg.library.families.size() == 2);
    CHECK(cfg.surrogate.noise_std == 0.002);
    CHECK(cfg.cycle.capacity_ah == 3.0);
    REQUIRE(cfg.cycle.segments.size() == 1);

    // defaults untouched elsewhere
    CHECK(cfg.ga.generations == 100);
    CHECK(cfg.cell.transference_number == doctest::Approx(0.363));
}

TEST_CASE("run config rejects unpaired planted arrays and bad families") {
    CHECK_THROWS_AS(RunConfig::from_config(ConfigFile::parse_string(
                        "[surrogate]\nplanted_ids = [1, 2]\nplanted_coeffs = [0.5]\n")),
                    ConfigError);
    CHECK_THROWS_AS(RunConfig::from_config(
                        ConfigFile::parse_string("[library]\nfamilies = [\"pol\", \"bogus\"]\n")),
                    ConfigError);
}

TEST_CASE("defaults pass cell validation and sit near 4.2 V at full charge") {
    const auto cfg = RunConfig::defaults();
    cfg.cell.validate();
    const double theta_p = cfg.cell.positive.initial_concentration / cfg.cell.positive.max_concentration;
    const double theta_n = cfg.cell.negative.initial_concentration / cfg.cell.negative.max_concentration;
    const double v0 = cfg.cell.ocv_positive(theta_p) - cfg.cell.ocv_negative(theta_n);
    CHECK(v0 == doctest::Approx(4.2).epsilon(0.01));
}
