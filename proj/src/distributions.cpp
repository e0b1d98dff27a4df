#include "margin/distributions.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "margin/error.hpp"
#include "margin/numeric.hpp"

namespace margin {

namespace {

constexpr double kSimplexTol = 1e-9;

// ln Gamma(n + r) - ln Gamma(r); the direct product is exact for small n and
// avoids cancellation when r is large.
double log_rising_factorial(double r, long long n) {
    if (n < 64) {
        double acc = 0.0;
        for (long long j = 0; j < n; ++j) acc += std::log(r + static_cast<double>(j));
        return acc;
    }
    return log_gamma(r + static_cast<double>(n)) - log_gamma(r);
}

void check_simplex(std::span<const double> f) {
    double total = 0.0;
    for (double v : f) {
        if (!(v >= 0.0) || v > 1.0 + kSimplexTol) {
            throw DomainError("simplex component outside [0, 1]");
        }
        total += v;
    }
    if (std::fabs(total - 1.0) > kSimplexTol) {
        throw DomainError("vector is off the simplex (sum deviates by more than 1e-9)");
    }
}

}  // namespace

DirichletSpec::DirichletSpec(int bins, double alpha) : bins_(bins), alpha_(alpha) {
    if (bins < 2) throw DomainError("DirichletSpec: need K >= 2");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("DirichletSpec: need alpha > 0");
}

DirichletSpec DirichletSpec::from_aggregation_constant(int bins, double total_concentration) {
    if (bins < 2) throw DomainError("DirichletSpec: need K >= 2");
    return DirichletSpec(bins, total_concentration / bins);
}

std::vector<double> DirichletSpec::concentration_vector() const {
    return std::vector<double>(static_cast<std::size_t>(bins_), alpha_);
}

NegBinomialParams::NegBinomialParams(double r_, double theta_) : r(r_), theta(theta_) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("negative binomial: need r > 0");
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("negative binomial: theta must lie in (0, 1)");
}

NegBinomialParams NegBinomialParams::from_mean_shape(double mean, double r) {
    if (!(mean > 0.0)) throw DomainError("negative binomial: need mean > 0");
    return NegBinomialParams(r, r / (r + mean));
}

double binomial_log_pmf(long long n, long long trials, double theta) {
    if (trials < 0 || n < 0 || n > trials) {
        throw DomainError("binomial_log_pmf: need 0 <= n <= N");
    }
    if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("binomial_log_pmf: theta outside [0, 1]");
    if (theta == 0.0) return n == 0 ? 0.0 : kNegInf;
    if (theta == 1.0) return n == trials ? 0.0 : kNegInf;
    const auto dn = static_cast<double>(n);
    const auto dm = static_cast<double>(trials - n);
    return log_binomial_coeff(trials, n) + dn * std::log(theta) + dm * std::log1p(-theta);
}

double neg_binomial_log_pmf(long long n, const NegBinomialParams& params) {
    if (n < 0) throw DomainError("neg_binomial_log_pmf: negative count");
    const auto dn = static_cast<double>(n);
    return log_rising_factorial(params.r, n) - log_gamma(dn + 1.0) + dn * std::log1p(-params.theta) +
           params.r * std::log(params.theta);
}

double poisson_log_pmf(long long n, double mu) {
    if (n < 0) throw DomainError("poisson_log_pmf: negative count");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("poisson_log_pmf: need mu >= 0");
    if (mu == 0.0) return n == 0 ? 0.0 : kNegInf;
    const auto dn = static_cast<double>(n);
    return dn * std::log(mu) - mu - log_gamma(dn + 1.0);
}

double normal_log_pdf(double x, double mu, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("normal_log_pdf: need sigma > 0");
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kLnSqrt2Pi;
}

double gamma_log_pdf(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("gamma_log_pdf: need shape, rate > 0");
    if (x < 0.0) return kNegInf;
    if (x == 0.0) {
        if (shape == 1.0) return std::log(rate);
        return shape > 1.0 ? kNegInf : std::numeric_limits<double>::infinity();
    }
    return shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double beta_log_pdf(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_log_pdf: need a, b > 0");
    if (x < 0.0 || x > 1.0) return kNegInf;
    const double la = (a == 1.0) ? 0.0 : (a - 1.0) * std::log(x);
    const double lb = (b == 1.0) ? 0.0 : (b - 1.0) * std::log1p(-x);
    return la + lb - log_beta(a, b);
}

double inverse_gamma_log_pdf(double x, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("inverse_gamma_log_pdf: need shape, scale > 0");
    if (x <= 0.0) return kNegInf;
    return shape * std::log(scale) - log_gamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double dirichlet_log_pdf(std::span<const double> f, std::span<const double> alpha) {
    if (f.size() != alpha.size() || f.size() < 2) {
        throw UsageError("dirichlet_log_pdf: f and alpha must have equal length >= 2");
    }
    check_simplex(f);
    double total_alpha = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!(alpha[k] > 0.0)) throw DomainError("dirichlet_log_pdf: concentrations must be positive");
        total_alpha += alpha[k];
        acc -= log_gamma(alpha[k]);
        if (alpha[k] != 1.0) acc += (alpha[k] - 1.0) * std::log(f[k]);
    }
    return acc + log_gamma(total_alpha);
}

double dirichlet_log_pdf(std::span<const double> f, const DirichletSpec& spec) {
    if (static_cast<int>(f.size()) != spec.bins()) throw UsageError("dirichlet_log_pdf: size mismatch");
    const auto alpha = spec.concentration_vector();
    return dirichlet_log_pdf(f, alpha);
}

double multinomial_log_like(std::span<const long long> counts, std::span<const double> f) {
    if (counts.size() != f.size() || counts.empty()) {
        throw UsageError("multinomial_log_like: counts and f must have equal, nonzero length");
    }
    check_simplex(f);
    long long total = 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 0) throw DomainError("multinomial_log_like: negative count");
        total += counts[k];
        const auto nk = static_cast<double>(counts[k]);
        acc -= log_gamma(nk + 1.0);
        if (counts[k] > 0) acc += nk * std::log(f[k]);
    }
    return acc + log_gamma(static_cast<double>(total) + 1.0);
}

std::vector<double> multinomial_mle(std::span<const long long> counts) {
    const long long total = std::accumulate(counts.begin(), counts.end(), 0LL);
    if (total <= 0) throw DomainError("multinomial_mle: need at least one count");
    std::vector<double> f(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        f[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
    }
    return f;
}

BetaShape dirichlet_marginal_beta(const DirichletSpec& spec, int k) {
    if (k < 1 || k > spec.bins()) throw DomainError("dirichlet_marginal_beta: bin index out of range");
    return {spec.alpha(), (spec.bins() - 1) * spec.alpha()};
}

double chi_log_pdf(double chi, int dim) {
    if (dim < 1) throw DomainError("chi_log_pdf: dimension must be >= 1");
    if (chi < 0.0) return kNegInf;
    const double n = dim;
    if (chi == 0.0) {
        return dim == 1 ? 0.5 * std::log(2.0 / kPi) : kNegInf;
    }
    return (n - 1.0) * std::log(chi) - 0.5 * chi * chi - (0.5 * n - 1.0) * std::log(2.0) -
           log_gamma(0.5 * n);
}

double chi_cdf(double chi, int dim) {
    if (dim < 1) throw DomainError("chi_cdf: dimension must be >= 1");
    if (chi <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * dim, 0.5 * chi * chi);
}

double chi_quantile(double p, int dim) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chi_quantile: p must lie in (0, 1)");
    double lo = 0.0;
    double hi = std::sqrt(static_cast<double>(dim)) + 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi_cdf(mid, dim) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double max_abs_coord_cdf(double m, int dim) {
    if (dim < 1) throw DomainError("max_abs_coord_cdf: dimension must be >= 1");
    if (m <= 0.0) return 0.0;
    const double single = std::erf(m / std::sqrt(2.0));  // 2 Phi(m) - 1
    return std::pow(single, dim);
}

double max_abs_coord_log_pdf(double m, int dim) {
    if (dim < 1) throw DomainError("max_abs_coord_log_pdf: dimension must be >= 1");
    if (m < 0.0) return kNegInf;
    const double single = std::erf(m / std::sqrt(2.0));
    if (dim == 1) return std::log(2.0) + normal_log_pdf(m, 0.0, 1.0);
    if (single <= 0.0) return kNegInf;
    return std::log(static_cast<double>(dim)) + (dim - 1) * std::log(single) + std::log(2.0) +
           normal_log_pdf(m, 0.0, 1.0);
}

}  // namespace margin
