#pragma once

#include <neurotac/lda.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neurotac {

enum class Dispersion { sd, se };

struct ExperimentResult {
    std::string name;
    int pcs = 0;
    std::vector<double> accuracies;  ///< one per repeat
    double mean = 0.0;
    double dispersion = 0.0;
    Dispersion kind = Dispersion::sd;
    std::vector<int> classes;
    Eigen::MatrixXi confusion;  ///< rows truth, columns predicted, summed over repeats
    std::size_t tested = 0;     ///< test predictions per repeat

    std::size_t n() const { return accuracies.size(); }
};

/// Fills mean and dispersion from the accuracies.
void summarize(ExperimentResult& result);

/// Counts with rows = truth and columns = prediction, in the order of
/// `classes`. Throws on labels outside `classes`.
Eigen::MatrixXi confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                 std::span<const int> classes);

/// Predictions of one train/test split for several label tasks and a sweep
/// of PC counts, from a single PCA fit on the training rows.
struct SplitPredictions {
    std::vector<std::vector<std::vector<int>>> labels;  ///< [task][pc index][test row]
};

/// `test_mean` replaces the training mean when centering the test rows.
SplitPredictions evaluate_split(const Eigen::MatrixXd& train, const std::vector<std::vector<int>>& train_labels,
                                const Eigen::MatrixXd& test, std::span<const int> pcs,
                                const std::optional<Eigen::RowVectorXd>& test_mean = std::nullopt);

struct KFoldConfig {
    int k = 4;
    int repeats = 20;
    int per_class = 0;  ///< rows drawn per stratum each repeat, 0 for all
    std::uint64_t seed = 1;
    std::vector<int> pcs{50};
    Dispersion kind = Dispersion::sd;
};

/// Repeated stratified k-fold. Each repeat redraws the per-stratum subsample
/// and the folds; its accuracy pools all folds. Returns [task][pc index].
std::vector<std::vector<ExperimentResult>> kfold_eval(const Eigen::MatrixXd& x, std::span<const int> strata,
                                                      const std::vector<std::vector<int>>& tasks,
                                                      const KFoldConfig& config);

std::vector<ExperimentResult> kfold_eval(const Eigen::MatrixXd& x, std::span<const int> labels,
                                         const KFoldConfig& config);

struct SplitSizes {
    int train = 0;
    int test = 0;
};

/// Train/test sizes per fold for a balanced stratified k-fold.
SplitSizes kfold_split_sizes(int per_class, int classes, int k);

enum class Bucket { untrained_both, untrained_force, untrained_speed, trained_both };
inline constexpr std::array<Bucket, 4> kBuckets{Bucket::untrained_both, Bucket::untrained_force,
                                                Bucket::untrained_speed, Bucket::trained_both};

std::string bucket_name(Bucket b);

struct ExtrapolationConfig {
    std::vector<double> trained_speeds{40.0, 60.0, 80.0};
    std::vector<double> trained_forces{250.0, 500.0};
    double train_fraction = 0.75;
    int repeats = 20;
    std::uint64_t seed = 1;
    std::vector<int> pcs{50};
    Dispersion kind = Dispersion::sd;
};

Bucket bucket_of(double speed, double force, const ExtrapolationConfig& config);

/// Speed-force cells per bucket over the given speed and force grids.
std::array<int, 4> bucket_cell_counts(std::span<const double> speeds, std::span<const double> forces,
                                      const ExtrapolationConfig& config);

/// Training rows: per texture and trained cell, round(train_fraction * trials).
int extrapolation_train_size(int textures, int trials_per_cell, const ExtrapolationConfig& config);
/// Test rows per texture and cell.
int extrapolation_test_per_cell(int trials_per_cell, const ExtrapolationConfig& config);

struct TrialCell {
    int texture = 0;
    double speed = 0.0;
    double force = 0.0;
};

/// Trains on the trained cells only and scores each bucket separately.
/// Returns [bucket][pc index].
std::array<std::vector<ExperimentResult>, 4> extrapolation_eval(const Eigen::MatrixXd& x,
                                                                std::span<const TrialCell> cells,
                                                                const ExtrapolationConfig& config);

}  // namespace neurotac
