#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// Izhikevich neuron integrated with plain forward Euler at a fine fixed
/// step. Input is held constant across each 1 ms sample. Returns the sample
/// indices at which the neuron fired.
inline std::vector<std::size_t> izhikevich_reference(const std::vector<double>& current, double k,
                                                     double dt_ms = 0.01) {
    const double a = 0.02, b = 0.2, c = -65.0, d = 6.0;
    double v = c;
    double u = b * c;
    const int sub = static_cast<int>(std::lround(1.0 / dt_ms));
    std::vector<std::size_t> spikes;
    for (std::size_t i = 0; i < current.size(); ++i) {
        const double in = k * current[i];
        bool fired = false;
        for (int s = 0; s < sub; ++s) {
            const double dv = 0.04 * v * v + 5.0 * v + 140.0 - u + in;
            const double du = a * (b * v - u);
            v += dt_ms * dv;
            u += dt_ms * du;
            if (v >= 30.0) {
                v = c;
                u += d;
                fired = true;
            }
        }
        if (fired) spikes.push_back(i);
    }
    return spikes;
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations. Returns
/// eigenvalues in descending order with matching unit eigenvectors as
/// columns (row-major n x n in `vectors`).
struct Eigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // vectors[row][col]
};

inline Eigen jacobi_eigen(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
    Eigen out;
    out.vectors.assign(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        out.values.push_back(a[order[j]][order[j]]);
        for (std::size_t i = 0; i < n; ++i) out.vectors[i][j] = v[i][order[j]];
    }
    return out;
}

/// Sample covariance (n - 1 denominator) of row-major data.
inline std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t p = rows.front().size();
    std::vector<double> mean(p, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < p; ++j) mean[j] += r[j] / static_cast<double>(n);
    std::vector<std::vector<double>> cov(p, std::vector<double>(p, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / static_cast<double>(n - 1);
    return cov;
}

/// Index of the largest-magnitude DFT bin in 1..n/2 of a mean-removed signal.
inline std::size_t dominant_bin(const std::vector<double>& x) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v / static_cast<double>(n);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / n;
            acc += (x[t] - mean) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        if (std::abs(acc) > best_mag) {
            best_mag = std::abs(acc);
            best = k;
        }
    }
    return best;
}

inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Fresh scratch directory under the system temp dir, removed on exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("neurotac_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace oracle
