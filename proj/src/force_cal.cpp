#include <neurotac/force_cal.hpp>

#include <neurotac/error.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace neurotac {

using nlohmann::json;

CoefficientSolution solve_coefficient(const std::function<double(double)>& rate_at, double target,
                                      const CalibrationConfig& config) {
    if (!(target >= 0.0)) throw std::invalid_argument("target rate must be non-negative");
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    CoefficientSolution sol;
    double lo = 0.0;
    double hi = config.max_coeff;
    for (int it = 0; it < config.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rate = rate_at(mid);
        ++sol.evaluations;
        const double residual = std::abs(rate - target);
        if (residual < config.epsilon) {
            sol.coefficient = mid;
            sol.converged = true;
            sol.residual = residual;
            return sol;
        }
        if (rate < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < config.min_width) break;
    }
    sol.coefficient = config.max_coeff;
    sol.converged = false;
    sol.residual = std::abs(rate_at(config.max_coeff) - target);
    ++sol.evaluations;
    return sol;
}

namespace {

double mean_sa_rate(std::span<const std::vector<double>> trials, double coeff,
                    const EncoderConfig& encoder) {
    if (trials.empty()) throw std::invalid_argument("cell has no trials");
    double acc = 0.0;
    for (const auto& ch : trials) acc += spike_rate(encode_sa(ch, coeff, encoder));
    return acc / static_cast<double>(trials.size());
}

}  // namespace

CoefficientSolution solve_coefficient(std::span<const std::vector<double>> trials, double target,
                                      const CalibrationConfig& config) {
    return solve_coefficient(
        [&](double c) { return mean_sa_rate(trials, c, config.encoder); }, target, config);
}

double target_rate(std::span<const std::vector<double>> trials, const EncoderConfig& encoder) {
    return mean_sa_rate(trials, 1.0, encoder);
}

ForceScalingTable::ForceScalingTable()
    : coeffs_(kSize, 1.0), converged_(kSize, true), targets_(16 * kTaxelCount * 5, 0.0) {}

int ForceScalingTable::flat_index(int texture, int taxel, int speed, int force) {
    if (texture < 0 || texture >= 16 || taxel < 0 || taxel >= kTaxelCount || speed < 0 ||
        speed >= 5 || force < 0 || force >= 3) {
        throw std::out_of_range("force scaling table index out of range");
    }
    return ((texture * kTaxelCount + taxel) * 5 + speed) * 3 + force;
}

double ForceScalingTable::coefficient(int texture, int taxel, int speed, int force) const {
    return coeffs_[flat_index(texture, taxel, speed, force)];
}

bool ForceScalingTable::converged(int texture, int taxel, int speed, int force) const {
    return converged_[flat_index(texture, taxel, speed, force)];
}

double ForceScalingTable::target(int texture, int taxel, int speed) const {
    return targets_[flat_index(texture, taxel, speed, 0) / 3];
}

void ForceScalingTable::set(int texture, int taxel, int speed, int force, double coefficient,
                            bool converged) {
    const int i = flat_index(texture, taxel, speed, force);
    coeffs_[i] = coefficient;
    converged_[i] = converged;
}

void ForceScalingTable::set_target(int texture, int taxel, int speed, double rate) {
    targets_[flat_index(texture, taxel, speed, 0) / 3] = rate;
}

void ForceScalingTable::save(const std::filesystem::path& path) const {
    json j;
    j["format"] = "neurotac-force-table";
    j["dimensions"] = kDims;
    j["order"] = "texture,taxel,speed,force";
    j["epsilon"] = epsilon;
    j["coefficients"] = coeffs_;
    std::string bits(kSize, '0');
    for (int i = 0; i < kSize; ++i) bits[i] = converged_[i] ? '1' : '0';
    j["converged"] = bits;
    j["targets"] = targets_;
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open force table for writing");
    out << j.dump() << '\n';
    if (!out) throw IoError(path, "failed writing force table");
}

ForceScalingTable ForceScalingTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open force table");
    ForceScalingTable t;
    try {
        const json j = json::parse(in);
        if (j.at("format") != "neurotac-force-table") throw FormatError(path, "not a force table");
        if (j.at("dimensions").get<std::array<int, 4>>() != kDims) {
            throw FormatError(path, "force table dimensions must be 16x18x5x3");
        }
        t.epsilon = j.at("epsilon").get<double>();
        t.coeffs_ = j.at("coefficients").get<std::vector<double>>();
        const auto bits = j.at("converged").get<std::string>();
        t.targets_ = j.at("targets").get<std::vector<double>>();
        if (t.coeffs_.size() != kSize || bits.size() != kSize || t.targets_.size() != 16u * kTaxelCount * 5) {
            throw FormatError(path, "force table arrays have the wrong length");
        }
        for (int i = 0; i < kSize; ++i) t.converged_[i] = bits[i] == '1';
    } catch (const json::exception& ex) {
        throw FormatError(path, std::string("malformed force table (") + ex.what() + ")");
    }
    return t;
}

CalibrationResult calibrate(const CellLoader& load_cell, const CalibrationConfig& config) {
    CalibrationResult result;
    result.table.epsilon = config.epsilon;
    auto& report = result.report;
    std::vector<std::string> missing;
    const auto& textures = texture_set();
    const int ref_force = force_index(kReferenceForce);

    auto channels_of = [](const std::vector<SensorTrace>& traces, int taxel) {
        std::vector<std::vector<double>> out;
        out.reserve(traces.size());
        for (const auto& t : traces) out.push_back(t.channel(taxel));
        return out;
    };
    auto note_missing = [&](char tex, double speed, double force) {
        std::ostringstream s;
        s << tex << '/' << speed << "mm/s/" << force << 'g';
        missing.push_back(s.str());
    };

    for (int ti = 0; ti < static_cast<int>(textures.size()); ++ti) {
        const char tex = textures[ti].id;
        for (int si = 0; si < static_cast<int>(kSpeeds.size()); ++si) {
            const double speed = kSpeeds[si];
            const auto reference = load_cell(tex, speed, kReferenceForce);
            if (reference.empty()) note_missing(tex, speed, kReferenceForce);
            std::array<double, kTaxelCount> targets{};
            for (int taxel = 0; taxel < kTaxelCount && !reference.empty(); ++taxel) {
                targets[taxel] = target_rate(channels_of(reference, taxel), config.encoder);
                result.table.set_target(ti, taxel, si, targets[taxel]);
            }
            for (int fi = 0; fi < static_cast<int>(kForces.size()); ++fi) {
                if (fi == ref_force) {
                    for (int taxel = 0; taxel < kTaxelCount; ++taxel) {
                        result.table.set(ti, taxel, si, fi, 1.0, true);
                        ++report.fixed;
                    }
                    continue;
                }
                const auto traces = load_cell(tex, speed, kForces[fi]);
                if (traces.empty()) note_missing(tex, speed, kForces[fi]);
                if (traces.empty() || reference.empty()) continue;
                for (int taxel = 0; taxel < kTaxelCount; ++taxel) {
                    const auto sol = solve_coefficient(channels_of(traces, taxel), targets[taxel], config);
                    result.table.set(ti, taxel, si, fi, sol.coefficient, sol.converged);
                    if (sol.converged) {
                        ++report.converged;
                    } else {
                        ++report.clamped;
                    }
                    report.residuals.push_back(sol.residual);
                }
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "dataset is missing " + std::to_string(missing.size()) + " calibration cell(s):";
        for (const auto& m : missing) msg += ' ' + m;
        throw std::invalid_argument(msg);
    }
    report.total = report.converged + report.clamped + report.fixed;
    return result;
}

CalibrationResult calibrate(const Dataset& dataset, const CalibrationConfig& config) {
    std::vector<std::string> missing;
    for (const auto& spec : texture_set()) {
        for (double speed : kSpeeds) {
            for (double force : kForces) {
                if (dataset.cell(spec.id, speed, force).empty()) {
                    std::ostringstream s;
                    s << spec.id << '/' << speed << "mm/s/" << force << 'g';
                    missing.push_back(s.str());
                }
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "dataset is missing " + std::to_string(missing.size()) + " calibration cell(s):";
        for (const auto& m : missing) msg += ' ' + m;
        throw std::invalid_argument(msg);
    }
    return calibrate(
        [&](char tex, double speed, double force) {
            std::vector<SensorTrace> traces;
            for (std::size_t i : dataset.cell(tex, speed, force)) traces.push_back(dataset.load(i));
            return traces;
        },
        config);
}

std::array<double, kTaxelCount> apply_force_scaling(const SensorTrace& trace,
                                                    const ForceScalingTable& table) {
    const int ti = texture_index(trace.texture);
    const int si = speed_index(trace.condition.speed);
    const int fi = force_index(trace.condition.force);
    std::array<double, kTaxelCount> out{};
    for (int taxel = 0; taxel < kTaxelCount; ++taxel) out[taxel] = table.coefficient(ti, taxel, si, fi);
    return out;
}

}  // namespace neurotac
