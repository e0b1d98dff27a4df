#pragma once

// Numeric kernel: special functions, log-domain reductions, derivative-free
// 1-D maximization and simple quadrature rules.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace margin {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLnSqrt2Pi = 0.91893853320467274178;

/// ln Gamma(x) for x > 0. Lanczos sum on (0.5, 10), Stirling series above,
/// upward recurrence below 0.5. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// ln B(a, b).
double log_beta(double a, double b);

/// ln C(N, n) for 0 <= n <= N.
double log_binomial_coeff(long long N, long long n);

/// ln sum_i exp(v_i). Entries may be -inf; an all -inf input returns -inf.
/// Throws UsageError on empty input and DomainError on +inf or NaN.
double log_sum_exp(std::span<const double> values);

/// ln(exp(a) + exp(b)) for a, b in [-inf, inf).
double log_add_exp(double a, double b);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Acklam's rational approximation refined by
/// one Halley step against normal_cdf).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Asymptotic Kolmogorov p-value for a two-sided one-sample KS statistic
/// d computed from n observations.
double ks_pvalue(double d, std::size_t n);

struct Maximum {
    double argmax;
    double value;
};

/// Maximizes f on [lo, hi]: a 33-point scan locates the best node, then
/// golden-section refinement on the neighbouring bracket narrows it to tol.
/// A plateau (all scan values equal) returns the midpoint.
/// Throws NumericError naming the abscissa if f is non-finite anywhere it
/// is evaluated.
Maximum maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol);

enum class QuadratureScheme { trapezoid, midpoint };

/// Nodes and weights of a composite rule on a uniform partition of [lo, hi].
struct QuadratureRule {
    std::size_t node_count = 3;
    QuadratureScheme scheme = QuadratureScheme::trapezoid;

    QuadratureRule() = default;
    QuadratureRule(std::size_t n, QuadratureScheme s);

    std::vector<double> nodes(double lo, double hi) const;
    std::vector<double> weights(double lo, double hi) const;
};

/// ln integral of exp(log_f) over [lo, hi] with the given rule.
double log_integrate(const std::function<double(double)>& log_f, double lo, double hi,
                     const QuadratureRule& rule);

}  // namespace margin
