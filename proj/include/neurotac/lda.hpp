#pragma once

#include <neurotac/pca.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace neurotac {

/// Linear discriminant with a pooled within-class covariance and uniform
/// priors.
struct LdaModel {
    std::vector<int> classes;   ///< sorted ascending
    Eigen::MatrixXd means;      ///< classes x dims
    Eigen::MatrixXd covariance; ///< pooled, after any shrinkage
    Eigen::VectorXd priors;
    double shrinkage = 0.0;     ///< ridge added to the diagonal, 0 when none was needed

    // Discriminant d_c(x) = x . weights.col(c) + bias(c)
    Eigen::MatrixXd weights;
    Eigen::RowVectorXd bias;
};

/// Class means and pooled scatter of a score matrix. The leading m x m block
/// of `scatter` and the first m mean columns are exactly the statistics of
/// the first m score columns, so one pass serves a whole PC sweep.
struct LdaStatistics {
    std::vector<int> classes;
    Eigen::MatrixXd means;
    Eigen::MatrixXd scatter;  ///< sum over classes of centered outer products
    Eigen::Index n_samples = 0;
};

LdaStatistics lda_statistics(const Eigen::MatrixXd& scores, std::span<const int> labels);

/// Model on the first `dims` columns (all when negative).
LdaModel lda_from_statistics(const LdaStatistics& stats, int dims = -1);

LdaModel lda_fit(const Eigen::MatrixXd& scores, std::span<const int> labels);

/// Argmax of the discriminant; equal scores go to the lowest class.
std::vector<int> lda_predict(const LdaModel& model, const Eigen::MatrixXd& scores);
int lda_predict_one(const LdaModel& model, const Eigen::RowVectorXd& score);

/// PCA basis plus LDA model, with an optional centering mean applied to raw
/// features before projection.
struct ClassifierModel {
    PcaBasis pca;
    LdaModel lda;
    std::optional<Eigen::RowVectorXd> session_mean;
};

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace neurotac
