#pragma once

#include <Eigen/Dense>

namespace neurotac {

/// Leading principal axes of a fit set.
struct PcaBasis {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd components;  ///< features x n_components, orthonormal columns
    Eigen::VectorXd explained;   ///< variance along each component, non-increasing
    double total_variance = 0.0;

    Eigen::Index n_components() const { return components.cols(); }
};

/// Fits the top `n_components` eigenvectors of the sample covariance.
///
/// The covariance is formed in feature space when rows >= cols and through
/// the row Gram matrix otherwise. Each component is signed so that its
/// largest-magnitude entry is positive. Throws std::invalid_argument when
/// n_components exceeds min(rows - 1, cols) or the numerical rank.
PcaBasis pca_fit(const Eigen::MatrixXd& x, int n_components);

/// (row - mean) * components, optionally using only the leading `use` axes.
Eigen::MatrixXd pca_project(const PcaBasis& basis, const Eigen::MatrixXd& x, int use = -1);

}  // namespace neurotac
