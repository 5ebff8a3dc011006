#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <neurotac/dataset.hpp>
#include <neurotac/drum_sim.hpp>
#include <neurotac/error.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

using namespace neurotac;
using Catch::Matchers::WithinAbs;

namespace {

SimulatorConfig clean_config() {
    SimulatorConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.quantize = false;
    cfg.phase_range_mm = 0.0;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("texture set has one smooth control and three groups of five", "[drum_sim]") {
    const auto& set = texture_set();
    REQUIRE(set.size() == 16);
    std::array<int, 4> per_group{};
    for (const auto& t : set) ++per_group[group_index(t.group)];
    CHECK(per_group == std::array<int, 4>{1, 5, 5, 5});
    CHECK(set.front().id == 'A');
    CHECK(set.back().id == 'P');
    CHECK(texture_index('L') == 11);
    CHECK_THROWS_AS(texture_index('Z'), std::invalid_argument);
}

TEST_CASE("texture profiles follow their silhouettes", "[drum_sim]") {
    const auto& smooth = texture_by_id('A');
    const auto& waves = texture_by_id('L');
    const auto& waves_tall = texture_by_id('M');
    const auto& rect = texture_by_id('G');
    const auto& circ = texture_by_id('B');

    for (double x : {0.0, 1.3, 7.7, 100.0}) CHECK(texture_profile(smooth, x) == 0.0);

    // quarter period of the sine sits at its crest
    CHECK_THAT(texture_profile(waves, 1.5), WithinAbs(1.0, 1e-12));
    CHECK_THAT(texture_profile(waves, 0.0), WithinAbs(0.5, 1e-12));
    for (double x : {0.4, 2.2, 5.1, 33.3}) {
        CHECK_THAT(texture_profile(waves_tall, x), WithinAbs(2.0 * texture_profile(waves, x), 1e-12));
        CHECK_THAT(texture_profile(waves, x + 6.0), WithinAbs(texture_profile(waves, x), 1e-12));
    }
    CHECK(texture_profile(rect, 1.0) == 1.0);
    CHECK(texture_profile(rect, 4.0) == 0.0);
    CHECK_THAT(texture_profile(circ, 1.5), WithinAbs(1.0, 1e-12));
    CHECK(texture_profile(circ, 4.5) == 0.0);
    for (const auto& t : texture_set()) {
        for (double x = -10.0; x < 30.0; x += 0.37) CHECK(texture_profile(t, x) >= 0.0);
    }
}

TEST_CASE("trial length matches scan length over speed", "[drum_sim]") {
    const auto conds = standard_conditions();
    REQUIRE(conds.size() == 15);
    std::set<std::size_t> lengths;
    for (const auto& c : conds) {
        const double travelled = static_cast<double>(c.n_samples()) / kSampleRate * c.speed;
        CHECK(std::abs(travelled - c.scan_length) <= c.speed / kSampleRate);
        lengths.insert(c.n_samples());
    }
    CHECK(lengths == std::set<std::size_t>{2000, 2400, 3000, 4000, 6000});
}

TEST_CASE("simulator rejects invalid conditions", "[drum_sim]") {
    DrumSimulator sim;
    const auto& t = texture_by_id('L');
    CHECK_THROWS_AS(sim.simulate_trial(t, {0.0, 500.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sim.simulate_trial(t, {120.0, -1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sim.simulate_trial(t, {120.0, 500.0, 0.0}, 1), std::invalid_argument);
}

TEST_CASE("trials are deterministic and quantized", "[drum_sim]") {
    DrumSimulator sim;
    const auto& t = texture_by_id('H');
    const TrialCondition cond{80.0, 250.0};
    const auto a = sim.simulate_trial(t, cond, 42);
    const auto b = sim.simulate_trial(t, cond, 42);
    const auto c = sim.simulate_trial(t, cond, 43);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    REQUIRE(a.n_samples == 3000);
    REQUIRE(a.samples.size() == 3000u * kTaxelCount);
    for (double v : a.samples) {
        CHECK(v == std::round(v));
        CHECK(v >= 0.0);
        CHECK(v <= kFullScale);
    }
}

TEST_CASE("force gain is increasing and concave", "[drum_sim]") {
    DrumSimulator sim;
    for (int i = 0; i < kTaxelCount; ++i) {
        const double g250 = sim.force_gain(i, 250.0);
        const double g500 = sim.force_gain(i, 500.0);
        const double g1000 = sim.force_gain(i, 1000.0);
        CHECK(g250 < g500);
        CHECK(g500 < g1000);
        CHECK(g1000 - g500 < 2.0 * (g500 - g250));
        CHECK_THAT(g1000 / g500, WithinAbs(std::pow(2.0, 0.7), 1e-12));
    }
    DrumSimulator clean(clean_config());
    const auto& t = texture_by_id('G');
    const auto lo = clean.simulate_trial(t, {100.0, 250.0}, 5);
    const auto hi = clean.simulate_trial(t, {100.0, 1000.0}, 5);
    for (std::size_t i = 0; i < lo.samples.size(); ++i) CHECK(hi.samples[i] > lo.samples[i]);
}

TEST_CASE("smooth texture without noise gives flat channels", "[drum_sim]") {
    DrumSimulator sim(clean_config());
    const auto trace = sim.simulate_trial(texture_by_id('A'), {120.0, 500.0}, 3);
    for (int ch = 0; ch < kTaxelCount; ++ch) {
        const auto x = trace.channel(ch);
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        CHECK_THAT(*hi - *lo, WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("doubling spacing halves the dominant frequency", "[drum_sim]") {
    DrumSimulator sim(clean_config());
    // Bin k of an n-sample trial is k / duration Hz; a 6 mm period is 20 Hz at
    // 120 mm/s (bin 40 of 2 s) and 16.7 Hz at 100 mm/s (bin 40 of 2.4 s).
    // The bottom layer is checked at 100 mm/s because its 50 ms box has a
    // null at exactly 20 Hz.
    for (auto [base, wide] : {std::pair{'L', 'N'}, std::pair{'G', 'I'}, std::pair{'B', 'D'}}) {
        for (auto [speed, taxels] : {std::pair{120.0, std::vector<int>{0, 4, 8}},
                                     std::pair{100.0, std::vector<int>{9, 13}}}) {
            const TrialCondition cond{speed, 500.0};
            const auto tb = sim.simulate_trial(texture_by_id(base), cond, 9);
            const auto tw = sim.simulate_trial(texture_by_id(wide), cond, 9);
            for (int taxel : taxels) {
                CHECK(oracle::dominant_bin(tb.channel(taxel)) == 40);
                CHECK(oracle::dominant_bin(tw.channel(taxel)) == 20);
            }
        }
    }
}

TEST_CASE("normalization maps the range onto the unit interval", "[drum_sim]") {
    SensorTrace trace;
    trace.channels = 2;
    trace.n_samples = 3;
    trace.samples = {100.0, 7.0, 356.0, 7.0, 612.0, 7.0};
    TaxelRange range;
    range.min = {100.0, 7.0};
    range.max = {612.0, 7.0};
    finalize_range(range);
    CHECK_FALSE(range.degenerate[0]);
    CHECK(range.degenerate[1]);
    normalize_trace(trace, range);
    CHECK(trace.samples[0] == 0.0);
    CHECK(trace.samples[2] == 0.5);
    CHECK(trace.samples[4] == 1.0);
    for (int t = 0; t < 3; ++t) CHECK(trace.at(t, 1) == 0.0);
}

TEST_CASE("normalization is order preserving and idempotent", "[drum_sim]") {
    DrumSimulator sim;
    std::vector<SensorTrace> traces{sim.simulate_trial(texture_by_id('C'), {60.0, 1000.0}, 1),
                                    sim.simulate_trial(texture_by_id('O'), {120.0, 250.0}, 2)};
    const auto raw = traces;
    const auto range = compute_range(traces);
    for (auto& t : traces) normalize_trace(t, range);
    for (std::size_t k = 0; k < traces.size(); ++k) {
        for (int ch = 0; ch < kTaxelCount; ++ch) {
            const auto r = raw[k].channel(ch);
            const auto n = traces[k].channel(ch);
            for (std::size_t i = 1; i < r.size(); ++i) {
                if (r[i] < r[i - 1]) CHECK(n[i] < n[i - 1]);
                if (r[i] == r[i - 1]) CHECK(n[i] == n[i - 1]);
            }
        }
    }
    auto again = traces;
    const auto unit = compute_range(again);
    for (int ch = 0; ch < kTaxelCount; ++ch) {
        CHECK(unit.min[ch] == 0.0);
        CHECK(unit.max[ch] == 1.0);
    }
    for (auto& t : again) normalize_trace(t, unit);
    for (std::size_t k = 0; k < traces.size(); ++k) {
        for (std::size_t i = 0; i < traces[k].samples.size(); ++i) {
            CHECK_THAT(again[k].samples[i], WithinAbs(traces[k].samples[i], 1e-15));
        }
    }
}

TEST_CASE("dataset planning counts trials", "[drum_sim]") {
    DatasetRequest req;
    req.trials_per_cell = 20;
    CHECK(plan_dataset(req).traces.size() == 4800);
    req.trials_per_cell = 100;
    CHECK(plan_dataset(req).traces.size() == 24000);
    req.trials_per_cell = 0;
    CHECK_THROWS_AS(plan_dataset(req), std::invalid_argument);
}

TEST_CASE("dataset generation is reproducible and readable", "[drum_sim]") {
    oracle::TempDir tmp("drum");
    DatasetRequest req;
    req.trials_per_cell = 2;
    req.seed = 11;
    req.textures = {'A', 'L'};
    req.conditions = {{120.0, 500.0}, {60.0, 250.0}};
    req.root = tmp.path() / "first";
    const auto m1 = generate_dataset(req);
    req.root = tmp.path() / "second";
    const auto m2 = generate_dataset(req);

    REQUIRE(m1.traces.size() == 8);
    for (std::size_t i = 0; i < m1.traces.size(); ++i) {
        CHECK(m1.traces[i].path == m2.traces[i].path);
        CHECK(slurp(tmp.path() / "first" / m1.traces[i].path) ==
              slurp(tmp.path() / "second" / m2.traces[i].path));
    }
    CHECK(slurp(tmp.path() / "first" / "manifest.json") == slurp(tmp.path() / "second" / "manifest.json"));

    const auto ds = Dataset::open(tmp.path() / "first");
    CHECK(ds.size() == 8);
    const auto cell = ds.cell('L', 60.0, 250.0);
    REQUIRE(cell.size() == 2);
    const auto norm = ds.load(cell[0]);
    CHECK(norm.n_samples == 4000);
    CHECK(norm.texture == 'L');
    for (double v : norm.samples) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const auto raw = ds.load_raw(cell[0]);
    for (int ch = 0; ch < kTaxelCount; ++ch) {
        const auto x = raw.channel(ch);
        CHECK(*std::min_element(x.begin(), x.end()) >= ds.manifest().range.min[ch]);
        CHECK(*std::max_element(x.begin(), x.end()) <= ds.manifest().range.max[ch]);
    }
}

TEST_CASE("trace files round trip and reject corruption", "[drum_sim]") {
    oracle::TempDir tmp("trace");
    DrumSimulator sim;
    auto trace = sim.simulate_trial(texture_by_id('K'), {100.0, 500.0}, 8);
    const auto path = tmp.path() / "t.bin";
    write_trace_file(path, trace);
    const auto back = read_trace_file(path);
    CHECK(back.n_samples == trace.n_samples);
    CHECK(back.samples == trace.samples);

    auto bytes = slurp(path);
    {
        std::ofstream out(tmp.path() / "bad.bin", std::ios::binary);
        bytes[0] = 'X';
        out << bytes;
    }
    CHECK_THROWS_AS(read_trace_file(tmp.path() / "bad.bin"), FormatError);
    {
        std::ofstream out(tmp.path() / "short.bin", std::ios::binary);
        out << slurp(path).substr(0, 100);
    }
    CHECK_THROWS_AS(read_trace_file(tmp.path() / "short.bin"), FormatError);
    CHECK_THROWS_AS(read_trace_file(tmp.path() / "missing.bin"), IoError);
}

TEST_CASE("unwritable dataset root reports the path", "[drum_sim]") {
    oracle::TempDir tmp("io");
    {
        std::ofstream blocker(tmp.path() / "file");
        blocker << "x";
    }
    DatasetRequest req;
    req.trials_per_cell = 1;
    req.textures = {'A'};
    req.conditions = {{120.0, 500.0}};
    req.root = tmp.path() / "file" / "sub";
    try {
        generate_dataset(req);
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("file") != std::string::npos);
    }
}
