#pragma once

#include <span>
#include <string>

namespace neurotac {

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator).
double sample_variance(std::span<const double> x);
double sample_sd(std::span<const double> x);
double standard_error(std::span<const double> x);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with (possibly fractional) dof.
double student_t_two_tailed(double t, double dof);
/// P(|Z| >= |z|) for a standard normal.
double normal_two_tailed(double z);

struct TTest {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;
};

/// Welch's unequal-variance t test of mean(a) - mean(b). Needs two samples
/// per group and a positive variance in at least one group.
TTest welch_t(std::span<const double> a, std::span<const double> b);

/// (mean(a) - mean(b)) / pooled sd. Throws when the pooled sd is zero.
double cohen_d(std::span<const double> a, std::span<const double> b);

struct ZTest {
    double z = 0.0;
    double p = 1.0;
};

/// Two-proportion z test of x1/n1 - x2/n2 with the pooled proportion.
ZTest two_prop_z(double x1, double n1, double x2, double n2);

/// 2 asin(sqrt(p1)) - 2 asin(sqrt(p2)).
double cohen_h(double p1, double p2);

enum class EffectKind { cohen_d, cohen_h };

/// "**", "*" or "" for a p-value and effect magnitude.
std::string significance_marker(double p, double effect, EffectKind kind);

struct Comparison {
    double p = 1.0;
    double statistic = 0.0;
    double effect = 0.0;
    std::string marker;
};

/// Welch t plus Cohen's d, tolerating groups with zero spread: equal
/// constant groups give p = 1 and d = 0, unequal ones p = 0 and an infinite d.
Comparison compare_means(std::span<const double> a, std::span<const double> b);

/// Two-proportion z plus Cohen's h.
Comparison compare_proportions(double x1, double n1, double x2, double n2);

}  // namespace neurotac
