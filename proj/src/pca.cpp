#include <neurotac/pca.hpp>

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace neurotac {
namespace {

struct TopEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // matching columns
};

// Top-k eigenpairs of a symmetric matrix (only the lower triangle is read).
TopEigen top_eigen(Eigen::MatrixXd& a, int k) {
    const auto n = static_cast<lapack_int>(a.rows());
    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::MatrixXd z(n, k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, n - k + 1, n, 0.0,
                       &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != k) {
        throw std::runtime_error("symmetric eigensolver failed (info " + std::to_string(info) + ")");
    }
    TopEigen out;
    out.values.resize(k);
    out.vectors.resize(n, k);
    for (int i = 0; i < k; ++i) {
        out.values(i) = w[static_cast<std::size_t>(k - 1 - i)];
        out.vectors.col(i) = z.col(k - 1 - i);
    }
    return out;
}

}  // namespace

PcaBasis pca_fit(const Eigen::MatrixXd& x, int n_components) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n_components < 1) throw std::invalid_argument("at least one principal component is required");
    if (n < 2 || n_components > std::min<Eigen::Index>(n - 1, p)) {
        throw std::invalid_argument("cannot fit " + std::to_string(n_components) + " components to a " +
                                    std::to_string(n) + "x" + std::to_string(p) + " matrix");
    }

    PcaBasis basis;
    basis.mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - basis.mean;
    const double denom = static_cast<double>(n - 1);
    basis.total_variance = centered.squaredNorm() / denom;

    TopEigen eig;
    if (n >= p) {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / denom);
        eig = top_eigen(cov, n_components);
    } else {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / denom);
        eig = top_eigen(gram, n_components);
    }

    const double floor = std::max(eig.values(0), 0.0) * static_cast<double>(std::max(n, p)) *
                         std::numeric_limits<double>::epsilon() * 16.0;
    if (!(eig.values(n_components - 1) > floor)) {
        throw std::invalid_argument("requested " + std::to_string(n_components) +
                                    " components but the data has lower numerical rank");
    }

    if (n >= p) {
        basis.components = std::move(eig.vectors);
    } else {
        basis.components = centered.transpose() * eig.vectors;
        for (int i = 0; i < n_components; ++i) basis.components.col(i).normalize();
    }
    basis.explained = eig.values;

    for (int i = 0; i < n_components; ++i) {
        Eigen::Index at = 0;
        basis.components.col(i).cwiseAbs().maxCoeff(&at);
        if (basis.components(at, i) < 0.0) basis.components.col(i) *= -1.0;
    }
    return basis;
}

Eigen::MatrixXd pca_project(const PcaBasis& basis, const Eigen::MatrixXd& x, int use) {
    if (x.cols() != basis.mean.size()) {
        throw std::invalid_argument("matrix has " + std::to_string(x.cols()) + " columns, basis expects " +
                                    std::to_string(basis.mean.size()));
    }
    const Eigen::Index k = use < 0 ? basis.n_components() : use;
    if (k > basis.n_components()) throw std::invalid_argument("basis has fewer components than requested");
    return (x.rowwise() - basis.mean) * basis.components.leftCols(k);
}

}  // namespace neurotac
