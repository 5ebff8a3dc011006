#pragma once

#include <neurotac/spike_codec.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neurotac {

inline constexpr double kFeatureWindow = 0.1;  ///< s
inline constexpr int kScaledWindows = 20;
inline constexpr int kUnscaledWindows = 60;
inline constexpr int kRealtimeWindows = 20;
inline constexpr int kRealtimeTrains = kGridTaxels;

/// speed_scaled: 36 trains x 20 windows; unscaled: 36 x 60 zero padded;
/// realtime: 9 SA trains x 20 windows.
enum class FeatureMode { speed_scaled, unscaled, realtime };

std::size_t feature_length(FeatureMode mode);
std::size_t train_count(FeatureMode mode);
std::size_t window_count(FeatureMode mode);

/// Layout is encoding-major (SA then RA), then taxel, then window.
struct FeatureVector {
    std::vector<double> values;
    FeatureMode mode = FeatureMode::speed_scaled;
};

/// Window index of a spike time, or -1 when it falls outside the windows.
int window_of(double t, double window, std::size_t n_windows);

/// count / window * norm per window.
std::vector<double> windowed_sr(const SpikeTrain& train, double window, std::size_t n_windows,
                                double norm = 1.0);
std::vector<double> windowed_sc(const SpikeTrain& train, double window, std::size_t n_windows);

/// Keeps the last `keep` entries, or pads with trailing zeros up to `keep`.
std::vector<double> last_or_pad(std::span<const double> values, std::size_t keep);

/// Builds one feature vector. For speed_scaled the trains must already be
/// warped and `norm` is speed / reference_speed for the SA rates. For
/// realtime the trains are in real time, one window per 100 ms of duration.
FeatureVector build_feature_vector(std::span<const SpikeTrain> trains, FeatureMode mode,
                                   double norm = 1.0);

/// Feature column names matching the layout, e.g. "sa_t01_w00".
std::vector<std::string> feature_names(FeatureMode mode);

struct TrialLabel {
    char texture = 'A';
    int group = 0;
    double speed = 0.0;
    double force = 0.0;
    int trial = 0;
    std::string profile;  ///< realtime scans only
    int session = 0;
};

struct FeatureMatrix {
    Eigen::MatrixXd values;  ///< rows = trials
    std::vector<TrialLabel> labels;
    std::vector<std::string> names;
    std::optional<Eigen::RowVectorXd> center;  ///< mean removed from `values`, if any

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

enum class Centering { none, fit };

/// Stacks vectors into a matrix; `fit` stores and subtracts the column mean.
FeatureMatrix assemble_and_center(std::span<const FeatureVector> vectors, std::vector<TrialLabel> labels,
                                  Centering centering = Centering::none);
/// Subtracts a supplied mean (e.g. a session recalibration mean).
FeatureMatrix assemble_and_center(std::span<const FeatureVector> vectors, std::vector<TrialLabel> labels,
                                  const Eigen::RowVectorXd& mean);

Eigen::RowVectorXd column_mean(const Eigen::MatrixXd& values);

/// CSV: texture,group,speed,force,trial,profile,session then one column per
/// feature; one row per trial.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& matrix);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace neurotac
