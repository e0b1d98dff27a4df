#pragma once

// Log-density and log-mass evaluators with their analytic moments.

#include <span>
#include <utility>
#include <vector>

namespace margin {

/// Symmetric Dirichlet over K bins with concentration alpha per bin.
class DirichletSpec {
public:
    DirichletSpec(int bins, double alpha);
    /// alpha = C / K, the aggregation-consistent family.
    static DirichletSpec from_aggregation_constant(int bins, double total_concentration);

    int bins() const { return bins_; }
    double alpha() const { return alpha_; }
    double total_concentration() const { return alpha_ * bins_; }
    std::vector<double> concentration_vector() const;

private:
    int bins_;
    double alpha_;
};

/// Negative binomial counting failures before r successes.
struct NegBinomialParams {
    double r;
    double theta;

    NegBinomialParams(double r_, double theta_);
    /// (r, theta) with mean mu and shape r: theta = r / (r + mu).
    static NegBinomialParams from_mean_shape(double mean, double r);

    double mean() const { return r * (1.0 - theta) / theta; }
    double variance() const { return r * (1.0 - theta) / (theta * theta); }
};

struct BetaShape {
    double a;
    double b;
    double mean() const { return a / (a + b); }
    double variance() const { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }
};

double binomial_log_pmf(long long n, long long trials, double theta);
double neg_binomial_log_pmf(long long n, const NegBinomialParams& params);
double poisson_log_pmf(long long n, double mu);
double normal_log_pdf(double x, double mu, double sigma);
double gamma_log_pdf(double x, double shape, double rate);
double beta_log_pdf(double x, double a, double b);
double inverse_gamma_log_pdf(double x, double shape, double scale);

/// Dirichlet log-density w.r.t. Lebesgue measure on the first K-1
/// coordinates. f must lie on the simplex within 1e-9.
double dirichlet_log_pdf(std::span<const double> f, std::span<const double> alpha);
double dirichlet_log_pdf(std::span<const double> f, const DirichletSpec& spec);

/// Multinomial log-likelihood including the multinomial coefficient.
double multinomial_log_like(std::span<const long long> counts, std::span<const double> f);

/// Closed-form maximizer f_k = n_k / N.
std::vector<double> multinomial_mle(std::span<const long long> counts);

/// Marginal of component k (1-based) of a symmetric Dirichlet: Beta(alpha, (K-1) alpha).
BetaShape dirichlet_marginal_beta(const DirichletSpec& spec, int k);

/// Log-density of the Euclidean length of an N-dimensional standard normal vector.
double chi_log_pdf(double chi, int dim);
double chi_cdf(double chi, int dim);
/// Inverse of chi_cdf by bisection.
double chi_quantile(double p, int dim);

/// P(max_i |eps_i| <= m) for N iid standard normals: (2 Phi(m) - 1)^N.
double max_abs_coord_cdf(double m, int dim);
double max_abs_coord_log_pdf(double m, int dim);

}  // namespace margin
