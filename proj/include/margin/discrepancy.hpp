#pragma once

// Overdispersion and discrepancy models: Gaussian noise inflation with its
// alpha marginal, and gamma-multiplicative Poisson discrepancy with the
// negative binomial marginal.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "margin/grid.hpp"
#include "margin/profile.hpp"
#include "margin/rng.hpp"

namespace margin {

// ------------------------------------------------------------ Gaussian regression

using RegressionFn = std::function<double(double x, std::span<const double> psi)>;

struct GaussianRegressionData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
    RegressionFn model;

    /// Throws UsageError on length mismatch, DomainError on sigma <= 0 or non-finite y.
    void validate() const;
    std::size_t size() const { return x.size(); }
};

double chisq(const GaussianRegressionData& data, std::span<const double> psi);
/// -sum ln sigma_i - chi^2 / 2
double gaussian_loglike(const GaussianRegressionData& data, std::span<const double> psi);
/// -N ln alpha - sum ln sigma_i - chi^2 / (2 alpha^2)
double gaussian_overdispersed_loglike(const GaussianRegressionData& data, std::span<const double> psi, double alpha);

struct LogUniformAlpha {
    double lo = 0.2;
    double hi = 50.0;
};

/// Inverse-gamma density on alpha itself, evaluated on [lo, hi].
struct InverseGammaAlpha {
    double shape;
    double scale;
    double lo = 0.2;
    double hi = 50.0;
};

struct PointMassAlpha {
    double value = 1.0;
};

using AlphaPrior = std::variant<LogUniformAlpha, InverseGammaAlpha, PointMassAlpha>;

struct AlphaMarginal {
    double log_quadrature;
    /// Log-uniform prior only: the untruncated analytic integral.
    std::optional<double> log_closed_form;
    std::vector<std::string> warnings;
};

/// ln integral dalpha p(alpha) L(psi, alpha), trapezoid on a log-alpha axis.
AlphaMarginal marginalize_alpha(const GaussianRegressionData& data, std::span<const double> psi,
                                const AlphaPrior& prior, std::size_t nodes = 4001);

/// ln[Gamma(N/2)/2] + (N/2) ln 2 - (N/2) ln chi2 - sum ln sigma - ln ln(hi/lo)
double log_uniform_alpha_closed_form(double chi2, std::size_t n, double sum_log_sigma, const LogUniformAlpha& prior);

struct DiscrepancyEquivalence {
    double beta;
    double alpha_rescaling;  // 1 + beta, the stated rule
    double alpha_variance;   // sqrt(1 + beta^2), from variance additivity
    bool differs;
};

DiscrepancyEquivalence gaussian_discrepancy_equivalence(double beta);

/// Independent check: integrates each delta_i ~ N(0, (beta sigma_i)^2) out of
/// N(y_i; f_i + delta_i, sigma_i) numerically, with the same constants as
/// gaussian_loglike.
double gaussian_discrepancy_quadrature(const GaussianRegressionData& data, std::span<const double> psi, double beta,
                                       std::size_t nodes = 2001);

// ------------------------------------------------------------ Poisson counts

using RateFn = std::function<double(double t, std::span<const double> psi)>;

struct CountSeries {
    std::vector<double> t;  // bin mid-times
    std::vector<long long> counts;
    double width;

    /// Throws UsageError when empty, mismatched or unevenly spaced; DomainError on negative counts or width <= 0.
    void validate() const;
    std::size_t size() const { return counts.size(); }
};

/// Header `t,count`; bin width inferred from the spacing (at least two rows).
/// Errors are UsageError naming the offending line.
CountSeries read_count_series(std::istream& in);
void write_count_series(const CountSeries& series, std::ostream& out);

/// lambda(t) = psi[0]
RateFn constant_rate();
/// lambda(t) = psi[0] + psi[1] exp(-(t - centre)^2 / (2 width^2))
RateFn gaussian_pulse_rate(double centre, double width);

double poisson_binned_loglike(const CountSeries& series, const RateFn& rate, std::span<const double> psi);
/// sum_i NB(n_i; r = beta lambda_i Delta, theta = beta / (1 + beta))
double nb_marginal_loglike(const CountSeries& series, const RateFn& rate, std::span<const double> psi, double beta);

/// Counts with per-bin gamma(beta lambda Delta, beta lambda Delta) discrepancy
/// factors; empty beta means pure Poisson.
CountSeries simulate_counts(const RateFn& rate, std::span<const double> psi, std::span<const double> t, double width,
                            std::optional<double> beta, RngStream& rng);

struct NbOracleResult {
    double analytic;
    double quadrature;
    double alpha_lo;
    double alpha_hi;
    std::vector<std::string> warnings;
};

/// ln integral dalpha Gamma(alpha; beta lD, beta lD) Poisson(n; alpha lD), by
/// trapezoid in ln alpha, next to the closed-form NB log mass.
NbOracleResult nb_vs_quadrature_oracle(double lambda_delta, double beta, long long n, std::size_t nodes = 20001);

struct SalientFit {
    LogDensityGrid posterior;  // normalized joint over psi axes then beta
    double log_evidence;
    std::vector<LogDensityGrid> marginals;  // one per axis, same order
    InferenceSummary summary;
    /// beta marginal as a density in ln beta, with its HPD regions per level
    LogDensityGrid log_beta_marginal;
    std::vector<HpdRegion> log_beta_hpd;
};

/// Joint grid of nb_marginal_loglike + flat psi prior + log-uniform beta prior.
/// beta_axis must be log-transformed; at most two psi axes.
SalientFit fit_salient(const CountSeries& series, const RateFn& rate, const std::vector<Axis>& psi_axes,
                       const Axis& beta_axis, std::span<const double> levels = {});

/// Sums counts over consecutive groups of factor bins. Throws UsageError unless factor divides the bin count.
CountSeries rebin(const CountSeries& series, std::size_t factor);

struct NbConvolution {
    long long support_max;
    /// max |conv - direct| per mass point, shared theta
    double max_abs_diff;
    /// same comparison for fixed-shape NB(r = beta, theta = beta / (beta + mu))
    double control_max_abs_diff;
};

/// Compares the convolution of per-bin NB masses with the NB of the summed mean.
NbConvolution nb_convolution_check(std::span<const double> bin_means, double beta);

struct NbAggregationReport {
    CountSeries merged;
    std::size_t factor;
    double max_abs_diff;
    double control_max_abs_diff;
    double merged_loglike;  // nb_marginal_loglike of the merged series at the same beta
};

NbAggregationReport aggregation_consistency_nb(const CountSeries& series, const RateFn& rate,
                                               std::span<const double> psi, double beta, std::size_t factor);

}  // namespace margin
