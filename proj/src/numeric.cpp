#include "margin/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "margin/error.hpp"

namespace margin {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
    x -= 1.0;
    double a = kLanczosCoeff[0];
    for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) {
        a += kLanczosCoeff[i] / (x + static_cast<double>(i));
    }
    const double t = x + kLanczosG + 0.5;
    return kLnSqrt2Pi + (x + 0.5) * std::log(t) - t + std::log(a);
}

double stirling_log_gamma(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 -
               inv2 * (1.0 / 360.0 -
                       inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    return (x - 0.5) * std::log(x) - x + kLnSqrt2Pi + series;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double log_gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError("log_gamma: argument must be positive and finite, got " + fmt(x));
    }
    if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
    if (x < 10.0) return lanczos_log_gamma(x);
    return stirling_log_gamma(x);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double log_binomial_coeff(long long N, long long n) {
    if (n < 0 || N < 0 || n > N) {
        throw DomainError("log_binomial_coeff: need 0 <= n <= N, got N=" + std::to_string(N) +
                          " n=" + std::to_string(n));
    }
    if (n == 0 || n == N) return 0.0;
    const auto dN = static_cast<double>(N);
    const auto dn = static_cast<double>(n);
    return log_gamma(dN + 1.0) - log_gamma(dn + 1.0) - log_gamma(dN - dn + 1.0);
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) throw UsageError("log_sum_exp: empty sequence");
    double top = kNegInf;
    for (double v : values) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            throw DomainError("log_sum_exp: +inf or NaN entry");
        }
        top = std::max(top, v);
    }
    if (top == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("regularized_gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("regularized_gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::fabs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

Maximum maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw UsageError("maximize_1d: need finite lo < hi");
    }
    if (!(tol > 0.0)) throw UsageError("maximize_1d: tol must be positive");

    auto eval = [&f](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw NumericError("maximize_1d: non-finite objective " + fmt(v) + " at x=" + fmt(x));
        }
        return v;
    };

    constexpr int kScan = 33;
    std::array<double, kScan> xs{};
    std::array<double, kScan> fs{};
    const double step = (hi - lo) / (kScan - 1);
    for (int i = 0; i < kScan; ++i) {
        xs[i] = (i == kScan - 1) ? hi : lo + i * step;
        fs[i] = eval(xs[i]);
    }
    const auto [min_it, max_it] = std::minmax_element(fs.begin(), fs.end());
    if (*min_it == *max_it) {
        const double mid = 0.5 * (lo + hi);
        return {mid, eval(mid)};
    }
    // first occurrence of the maximum
    const auto best = static_cast<int>(std::distance(fs.begin(), std::max_element(fs.begin(), fs.end())));

    double a = xs[std::max(best - 1, 0)];
    double b = xs[std::min(best + 1, kScan - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fmid = eval(mid);
    if (fmid < fs[best]) return {xs[best], fs[best]};
    return {mid, fmid};
}

QuadratureRule::QuadratureRule(std::size_t n, QuadratureScheme s) : node_count(n), scheme(s) {
    if (n < 3) throw UsageError("QuadratureRule: node count must be at least 3");
}

std::vector<double> QuadratureRule::nodes(double lo, double hi) const {
    if (!(lo < hi)) throw UsageError("QuadratureRule: need lo < hi");
    std::vector<double> x(node_count);
    if (scheme == QuadratureScheme::trapezoid) {
        const double h = (hi - lo) / static_cast<double>(node_count - 1);
        for (std::size_t i = 0; i < node_count; ++i) x[i] = lo + h * static_cast<double>(i);
        x.back() = hi;
    } else {
        const double h = (hi - lo) / static_cast<double>(node_count);
        for (std::size_t i = 0; i < node_count; ++i) x[i] = lo + h * (static_cast<double>(i) + 0.5);
    }
    return x;
}

std::vector<double> QuadratureRule::weights(double lo, double hi) const {
    if (!(lo < hi)) throw UsageError("QuadratureRule: need lo < hi");
    std::vector<double> w(node_count);
    if (scheme == QuadratureScheme::trapezoid) {
        const double h = (hi - lo) / static_cast<double>(node_count - 1);
        std::fill(w.begin(), w.end(), h);
        w.front() = w.back() = 0.5 * h;
    } else {
        std::fill(w.begin(), w.end(), (hi - lo) / static_cast<double>(node_count));
    }
    return w;
}

double log_integrate(const std::function<double(double)>& log_f, double lo, double hi,
                     const QuadratureRule& rule) {
    const auto x = rule.nodes(lo, hi);
    const auto w = rule.weights(lo, hi);
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = log_f(x[i]) + std::log(w[i]);
    return log_sum_exp(terms);
}

}  // namespace margin
