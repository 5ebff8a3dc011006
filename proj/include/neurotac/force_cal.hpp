#pragma once

#include <neurotac/dataset.hpp>
#include <neurotac/spike_codec.hpp>

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace neurotac {

struct CalibrationConfig {
    double epsilon = 0.1;       ///< spikes/s
    double max_coeff = 5.0;     ///< search bracket is [0, max_coeff]
    int max_iterations = 40;
    double min_width = 1e-4;
    EncoderConfig encoder;
};

struct CoefficientSolution {
    double coefficient = 1.0;
    bool converged = false;
    double residual = 0.0;  ///< |rate(coefficient) - target|
    int evaluations = 0;
};

/// Bisection for c in (0, max_coeff] with |rate(c) - target| < epsilon, for a
/// non-decreasing rate function. When the bracket is exhausted without
/// meeting the tolerance the coefficient is clamped to max_coeff and flagged.
CoefficientSolution solve_coefficient(const std::function<double(double)>& rate_at, double target,
                                      const CalibrationConfig& config = {});

/// Same search where rate(c) is the mean SA spike rate of c * channel over
/// the given trials of one cell.
CoefficientSolution solve_coefficient(std::span<const std::vector<double>> trials, double target,
                                      const CalibrationConfig& config = {});

/// Mean unscaled SA spike rate over the reference-force trials of one cell.
double target_rate(std::span<const std::vector<double>> trials, const EncoderConfig& encoder = {});

/// Coefficients C indexed (texture, taxel, speed, force), 16x18x5x3.
class ForceScalingTable {
public:
    static constexpr std::array<int, 4> kDims{16, kTaxelCount, 5, 3};
    static constexpr int kSize = 16 * kTaxelCount * 5 * 3;

    ForceScalingTable();

    static int flat_index(int texture, int taxel, int speed, int force);

    double coefficient(int texture, int taxel, int speed, int force) const;
    bool converged(int texture, int taxel, int speed, int force) const;
    double target(int texture, int taxel, int speed) const;

    void set(int texture, int taxel, int speed, int force, double coefficient, bool converged);
    void set_target(int texture, int taxel, int speed, double rate);

    const std::vector<double>& coefficients() const { return coeffs_; }
    double epsilon = 0.1;

    void save(const std::filesystem::path& path) const;
    static ForceScalingTable load(const std::filesystem::path& path);

    bool operator==(const ForceScalingTable&) const = default;

private:
    std::vector<double> coeffs_;
    std::vector<bool> converged_;
    std::vector<double> targets_;  ///< (texture, taxel, speed)
};

struct CalibrationReport {
    int total = 0;
    int converged = 0;
    int clamped = 0;
    int fixed = 0;  ///< reference-force entries
    std::vector<double> residuals;  ///< solved entries, in table order

    double converged_fraction() const {
        const int solved = converged + clamped;
        return solved == 0 ? 1.0 : static_cast<double>(converged) / solved;
    }
};

/// Loads the normalized traces of one (texture, speed, force) cell.
using CellLoader = std::function<std::vector<SensorTrace>(char texture, double speed, double force)>;

struct CalibrationResult {
    ForceScalingTable table;
    CalibrationReport report;
};

/// Solves every 250 g and 1000 g entry against the 500 g target of its
/// (texture, taxel, speed); 500 g entries are fixed at 1.
CalibrationResult calibrate(const CellLoader& load_cell, const CalibrationConfig& config = {});
CalibrationResult calibrate(const Dataset& dataset, const CalibrationConfig& config = {});

/// Per-taxel SA coefficients for one trial.
std::array<double, kTaxelCount> apply_force_scaling(const SensorTrace& trace,
                                                    const ForceScalingTable& table);

}  // namespace neurotac
