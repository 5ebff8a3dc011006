#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <neurotac/drum_sim.hpp>
#include <neurotac/error.hpp>
#include <neurotac/force_cal.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

using namespace neurotac;
using Catch::Matchers::WithinAbs;

namespace {

// Short normalized trials for every cell, cached so repeated loads are cheap.
class SyntheticCells {
public:
    explicit SyntheticCells(int trials) : sim_(config()) {
        std::vector<SensorTrace> all;
        for (const auto& tex : texture_set()) {
            for (const auto& cond : standard_conditions(kScan)) {
                for (int k = 0; k < trials; ++k) {
                    auto t = sim_.simulate_trial(tex, cond, 1000 + 31 * k + tex.id * 7 +
                                                               static_cast<int>(cond.speed + cond.force));
                    cells_[{tex.id, cond.speed, cond.force}].push_back(t);
                    all.push_back(t);
                }
            }
        }
        const auto range = compute_range(all);
        for (auto& [key, traces] : cells_)
            for (auto& t : traces) normalize_trace(t, range);
    }

    std::vector<SensorTrace> operator()(char tex, double speed, double force) const {
        auto it = cells_.find({tex, speed, force});
        return it == cells_.end() ? std::vector<SensorTrace>{} : it->second;
    }

    void drop(char tex, double speed, double force) { cells_.erase({tex, speed, force}); }

private:
    static constexpr double kScan = 36.0;
    static SimulatorConfig config() {
        SimulatorConfig c;
        c.sensor_seed = 5;
        return c;
    }
    DrumSimulator sim_;
    std::map<std::tuple<char, double, double>, std::vector<SensorTrace>> cells_;
};

}  // namespace

TEST_CASE("bisection finds the coefficient of a linear rate curve", "[force_cal]") {
    const auto sol = solve_coefficient([](double c) { return 40.0 * c; }, 40.0);
    CHECK(sol.converged);
    CHECK_THAT(sol.coefficient, WithinAbs(1.0, 0.1 / 40.0));
    CHECK(sol.residual < 0.1);
    CHECK(sol.evaluations <= 40);
}

TEST_CASE("search correctness on monotone curves", "[force_cal]") {
    // any non-decreasing curve with a solution inside the bracket is solved
    const std::vector<std::function<double(double)>> curves{
        [](double c) { return 3.0 * c * c; },
        [](double c) { return 20.0 * std::sqrt(c); },
        [](double c) { return std::floor(c * 40.0) / 4.0; },
        [](double c) { return c < 2.0 ? 0.0 : 50.0 * (c - 2.0); },
    };
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (double target : {0.5, 3.0, 9.0}) {
            INFO("curve " << i << " target " << target);
            const auto sol = solve_coefficient(curves[i], target);
            REQUIRE(sol.converged);
            CHECK(std::abs(curves[i](sol.coefficient) - target) < 0.1);
            CHECK(sol.coefficient > 0.0);
            CHECK(sol.coefficient <= 5.0);
        }
    }
}

TEST_CASE("unreachable targets clamp to exactly five", "[force_cal]") {
    const auto sol = solve_coefficient([](double c) { return 10.0 * c; }, 100.0);
    CHECK_FALSE(sol.converged);
    CHECK(sol.coefficient == 5.0);
    CHECK_THAT(sol.residual, WithinAbs(50.0, 1e-12));

    // a jump that skips over the target
    const auto jump = solve_coefficient([](double c) { return c < 1.7 ? 0.0 : 30.0; }, 10.0);
    CHECK_FALSE(jump.converged);
    CHECK(jump.coefficient == 5.0);

    // near-silent channel
    const std::vector<std::vector<double>> silent{std::vector<double>(1000, 0.0)};
    const auto s = solve_coefficient(silent, 20.0);
    CHECK_FALSE(s.converged);
    CHECK(s.coefficient == 5.0);

    CHECK_THROWS_AS(solve_coefficient([](double c) { return c; }, -1.0), std::invalid_argument);
}

TEST_CASE("solving on encoded channels recovers a known gain", "[force_cal]") {
    std::vector<std::vector<double>> ref, weak;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> a(2000), b(2000);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = 0.25 + 0.1 * std::sin(0.013 * i + k);
            b[i] = 0.5 * a[i];
        }
        ref.push_back(a);
        weak.push_back(b);
    }
    const double target = target_rate(ref);
    REQUIRE(target > 10.0);
    const auto sol = solve_coefficient(weak, target);
    REQUIRE(sol.converged);
    CHECK_THAT(sol.coefficient, WithinAbs(2.0, 0.05));
    double rate = 0.0;
    for (const auto& ch : weak) rate += spike_rate(encode_sa(ch, sol.coefficient));
    CHECK(std::abs(rate / weak.size() - target) < 0.1);
}

TEST_CASE("table layout and persistence", "[force_cal]") {
    ForceScalingTable t;
    CHECK(ForceScalingTable::kSize == 4320);
    CHECK(t.coefficients().size() == 4320);
    CHECK(ForceScalingTable::flat_index(15, 17, 4, 2) == 4319);
    CHECK_THROWS_AS(ForceScalingTable::flat_index(16, 0, 0, 0), std::out_of_range);
    t.set(3, 4, 2, 0, 1.75, true);
    t.set(3, 4, 2, 2, 5.0, false);
    t.set_target(3, 4, 2, 33.5);

    oracle::TempDir tmp("table");
    t.save(tmp.path() / "t.json");
    const auto back = ForceScalingTable::load(tmp.path() / "t.json");
    CHECK(back == t);
    CHECK(back.coefficient(3, 4, 2, 0) == 1.75);
    CHECK_FALSE(back.converged(3, 4, 2, 2));
    CHECK(back.target(3, 4, 2) == 33.5);

    {
        std::ofstream out(tmp.path() / "bad.json");
        out << "{\"format\": \"neurotac-force-table\"";
    }
    CHECK_THROWS_AS(ForceScalingTable::load(tmp.path() / "bad.json"), FormatError);
    CHECK_THROWS_AS(ForceScalingTable::load(tmp.path() / "none.json"), IoError);
}

TEST_CASE("calibration over every cell", "[force_cal]") {
    SyntheticCells cells(2);
    const CellLoader loader = [&](char t, double s, double f) { return cells(t, s, f); };
    const auto result = calibrate(loader);
    const auto& r = result.report;
    CHECK(r.fixed == 1440);
    CHECK(r.converged + r.clamped == 2880);
    CHECK(r.fixed + r.converged + r.clamped == 4320);
    CHECK(r.residuals.size() == 2880);
    CHECK(r.converged_fraction() >= 0.9);

    int invariant = 0;
    int solved = 0;
    for (int ti = 0; ti < 16; ++ti) {
        const char tex = texture_set()[ti].id;
        for (int taxel = 0; taxel < kTaxelCount; ++taxel) {
            for (int si = 0; si < 5; ++si) {
                CHECK(result.table.coefficient(ti, taxel, si, 1) == 1.0);
                for (int fi : {0, 2}) {
                    const double c = result.table.coefficient(ti, taxel, si, fi);
                    CHECK(c > 0.0);
                    CHECK(c <= 5.0);
                    if (!result.table.converged(ti, taxel, si, fi)) {
                        CHECK(c == 5.0);
                        continue;
                    }
                    // independent re-evaluation of the invariance on one sample of cells
                    if ((ti + taxel + si) % 37 != 0) continue;
                    ++solved;
                    double rate = 0.0;
                    const auto traces = cells(tex, kSpeeds[si], kForces[fi]);
                    for (const auto& t : traces) rate += spike_rate(encode_sa(t.channel(taxel), c));
                    rate /= traces.size();
                    if (std::abs(rate - result.table.target(ti, taxel, si)) < 0.1) ++invariant;
                }
            }
        }
    }
    REQUIRE(solved > 0);
    CHECK(invariant == solved);

    // apply_force_scaling looks up the trial's cell
    auto trial = cells('L', 80.0, 250.0).front();
    const auto coeffs = apply_force_scaling(trial, result.table);
    for (int taxel = 0; taxel < kTaxelCount; ++taxel) {
        CHECK(coeffs[taxel] == result.table.coefficient(texture_index('L'), taxel, 2, 0));
    }
    trial.condition.force = 500.0;
    for (double c : apply_force_scaling(trial, result.table)) CHECK(c == 1.0);
    trial.condition.force = 700.0;
    CHECK_THROWS(apply_force_scaling(trial, result.table));

    // determinism
    CHECK(calibrate(loader).table == result.table);
}

TEST_CASE("force-independent readings give unit coefficients", "[force_cal]") {
    // every force returns the 500 g trials
    SyntheticCells cells(1);
    const CellLoader loader = [&](char t, double s, double) { return cells(t, s, 500.0); };
    const auto result = calibrate(loader);
    CHECK(result.report.clamped == 0);
    for (int ti = 0; ti < 16; ti += 5) {
        for (int taxel = 0; taxel < kTaxelCount; ++taxel) {
            for (int si = 0; si < 5; ++si) {
                // low rates leave wide plateaus of equal spike count
                if (result.table.target(ti, taxel, si) < 40.0) continue;
                CHECK_THAT(result.table.coefficient(ti, taxel, si, 0), WithinAbs(1.0, 0.1));
                CHECK_THAT(result.table.coefficient(ti, taxel, si, 2), WithinAbs(1.0, 0.1));
            }
        }
    }
}

TEST_CASE("missing cells are listed together", "[force_cal]") {
    SyntheticCells cells(1);
    cells.drop('C', 60.0, 250.0);
    cells.drop('P', 120.0, 1000.0);
    const CellLoader loader = [&](char t, double s, double f) { return cells(t, s, f); };
    try {
        calibrate(loader);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("C/60") != std::string::npos);
        CHECK(msg.find("P/120") != std::string::npos);
    }
}
