#include <neurotac/stats.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace neurotac {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("variance needs at least two samples");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

double standard_error(std::span<const double> x) {
    return sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_fraction(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta needs 0 <= x <= 1");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("t distribution needs positive dof");
    if (std::isnan(t)) throw std::invalid_argument("t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double normal_two_tailed(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

TTest welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("Welch's t test needs two samples per group");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na;
    const double vb = sample_variance(b) / nb;
    const double se2 = va + vb;
    if (!(se2 > 0.0)) throw std::invalid_argument("Welch's t test needs positive variance");
    TTest r;
    r.t = (mean(a) - mean(b)) / std::sqrt(se2);
    r.dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p = student_t_two_tailed(r.t, r.dof);
    return r;
}

double cohen_d(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("Cohen's d needs two samples per group");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled =
        ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if (!(pooled > 0.0)) throw std::invalid_argument("Cohen's d undefined for zero pooled variance");
    return (mean(a) - mean(b)) / std::sqrt(pooled);
}

ZTest two_prop_z(double x1, double n1, double x2, double n2) {
    if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::invalid_argument("two-proportion z test needs non-empty trials");
    if (x1 < 0.0 || x1 > n1 || x2 < 0.0 || x2 > n2) throw std::invalid_argument("successes exceed trials");
    const double p1 = x1 / n1;
    const double p2 = x2 / n2;
    const double pooled = (x1 + x2) / (n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    ZTest r;
    if (se == 0.0) return r;
    r.z = (p1 - p2) / se;
    r.p = normal_two_tailed(r.z);
    return r;
}

double cohen_h(double p1, double p2) {
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0) throw std::invalid_argument("proportions must lie in [0, 1]");
    return 2.0 * std::asin(std::sqrt(p1)) - 2.0 * std::asin(std::sqrt(p2));
}

std::string significance_marker(double p, double effect, EffectKind kind) {
    const double e = std::fabs(effect);
    const double medium = kind == EffectKind::cohen_d ? 0.5 : 0.2;
    const double large = kind == EffectKind::cohen_d ? 1.0 : 0.5;
    if (p < 0.01 && e > large) return "**";
    if (p < 0.05 && e > medium) return "*";
    return "";
}

Comparison compare_means(std::span<const double> a, std::span<const double> b) {
    Comparison c;
    const double diff = mean(a) - mean(b);
    const double spread = sample_variance(a) + sample_variance(b);
    if (spread > 0.0) {
        const TTest t = welch_t(a, b);
        c.p = t.p;
        c.statistic = t.t;
        c.effect = cohen_d(a, b);
    } else if (diff != 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        c.p = 0.0;
        c.statistic = std::copysign(inf, diff);
        c.effect = c.statistic;
    }
    c.marker = significance_marker(c.p, c.effect, EffectKind::cohen_d);
    return c;
}

Comparison compare_proportions(double x1, double n1, double x2, double n2) {
    const ZTest z = two_prop_z(x1, n1, x2, n2);
    Comparison c;
    c.p = z.p;
    c.statistic = z.z;
    c.effect = cohen_h(x1 / n1, x2 / n2);
    c.marker = significance_marker(c.p, c.effect, EffectKind::cohen_h);
    return c;
}

}  // namespace neurotac
