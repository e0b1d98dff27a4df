#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "margin/distributions.hpp"
#include "margin/error.hpp"
#include "margin/numeric.hpp"
#include "margin/rng.hpp"

using namespace margin;

namespace {

double total_variation_nb_poisson(double mu, double theta) {
    const double r = mu * theta / (1.0 - theta);
    const NegBinomialParams nb(r, theta);
    double tv = 0.0;
    const auto cap = static_cast<long long>(mu + 40.0 * std::sqrt(mu / theta) + 50.0);
    for (long long n = 0; n <= cap; ++n) {
        tv += std::fabs(std::exp(neg_binomial_log_pmf(n, nb)) - std::exp(poisson_log_pmf(n, mu)));
    }
    return 0.5 * tv;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("binomial pmf normalizes and peaks at n / N") {
    double total = 0.0;
    for (long long n = 0; n <= 20; ++n) total += std::exp(binomial_log_pmf(n, 20, 0.5));
    CHECK(std::fabs(total - 1.0) < 1e-12);

    double best = kNegInf, arg = 0.0;
    const double step = 1e-3;
    for (int i = 0; i <= 1000; ++i) {
        const double th = i * step;
        const double v = binomial_log_pmf(13, 20, th);
        if (v > best) best = v, arg = th;
    }
    CHECK(std::fabs(arg - 0.65) <= step);

    CHECK(binomial_log_pmf(10, 20, 0.5) == doctest::Approx(std::log(184756.0) - 20.0 * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("binomial pmf edge probabilities use exact limits") {
    CHECK(binomial_log_pmf(0, 10, 0.0) == 0.0);
    CHECK(binomial_log_pmf(3, 10, 0.0) == kNegInf);
    CHECK(binomial_log_pmf(10, 10, 1.0) == 0.0);
    CHECK(binomial_log_pmf(9, 10, 1.0) == kNegInf);
    CHECK_THROWS_AS(binomial_log_pmf(3, 10, 1.5), DomainError);
    CHECK_THROWS_AS(binomial_log_pmf(11, 10, 0.5), DomainError);
}

TEST_CASE("negative binomial pmf") {
    const NegBinomialParams p(3.7, 0.4);
    CHECK(neg_binomial_log_pmf(0, p) == doctest::Approx(3.7 * std::log(0.4)));
    double total = 0.0, first = 0.0;
    const auto cap = static_cast<long long>(p.mean() + 20.0 * std::sqrt(p.variance()));
    for (long long n = 0; n <= cap; ++n) {
        const double m = std::exp(neg_binomial_log_pmf(n, p));
        total += m;
        first += n * m;
    }
    CHECK(std::fabs(total - 1.0) < 1e-10);
    CHECK(first == doctest::Approx(3.7 * 0.6 / 0.4).epsilon(1e-9));
    CHECK_THROWS_AS(NegBinomialParams(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(NegBinomialParams(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(NegBinomialParams(1.0, 0.0), DomainError);
}

TEST_CASE("from_mean_shape round trips") {
    const auto p = NegBinomialParams::from_mean_shape(6.0, 2.5);
    CHECK(p.mean() == doctest::Approx(6.0));
    CHECK(p.r == 2.5);
}

TEST_CASE("negative binomial approaches poisson as theta goes to one") {
    const double mu = 3.0, theta = 0.9999;
    const NegBinomialParams nb(mu * theta / (1.0 - theta), theta);
    double sup = 0.0;
    for (long long n = 0; n <= 60; ++n) {
        sup = std::max(sup, std::fabs(std::exp(neg_binomial_log_pmf(n, nb)) - std::exp(poisson_log_pmf(n, mu))));
    }
    CHECK(sup < 1e-3);

    for (double m : {0.5, 5.0, 50.0}) {
        double previous = 2.0;
        for (double th : {0.9, 0.99, 0.999, 0.9999}) {
            const double tv = total_variation_nb_poisson(m, th);
            CHECK(tv < previous);
            previous = tv;
        }
    }
}

TEST_CASE("poisson pmf") {
    CHECK(poisson_log_pmf(0, 1.0) == doctest::Approx(-1.0));
    CHECK(poisson_log_pmf(0, 0.0) == 0.0);
    CHECK(poisson_log_pmf(2, 0.0) == kNegInf);
    double total = 0.0;
    for (long long n = 0; n <= 200; ++n) total += std::exp(poisson_log_pmf(n, 50.0));
    CHECK(std::fabs(total - 1.0) < 1e-10);
    CHECK_THROWS_AS(poisson_log_pmf(1, -0.5), DomainError);

    RngStream rng(5);
    const int draws = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto x = static_cast<double>(sample(rng, PoissonDist{7.0}));
        s += x;
        s2 += x * x;
    }
    const double var = s2 / draws - (s / draws) * (s / draws);
    // sd of the sample variance: sqrt((mu4 - sigma^4) / n) with mu4 = mu (1 + 3 mu)
    CHECK(std::fabs(var - 7.0) < 4.0 * std::sqrt((7.0 * 22.0 - 49.0) / draws));
}

TEST_CASE("continuous densities normalize") {
    CHECK(simpson([](double x) { return std::exp(normal_log_pdf(x, 1.0, 0.5)); }, -5.0, 7.0, 4000) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(simpson([](double x) { return std::exp(gamma_log_pdf(x, 3.0, 2.0)); }, 1e-12, 40.0, 8000) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(simpson([](double x) { return std::exp(beta_log_pdf(x, 2.5, 4.0)); }, 0.0, 1.0, 20000) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(simpson([](double x) { return std::exp(inverse_gamma_log_pdf(x, 3.0, 2.0)); }, 1e-3, 400.0, 400000) ==
          doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS(normal_log_pdf(0.0, 0.0, -1.0), DomainError);
    CHECK_THROWS_AS(gamma_log_pdf(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("unit-mean gamma moments against draws") {
    const double beta = 4.0;
    RngStream rng(6);
    const int draws = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = sample(rng, GammaDist{beta, beta});
        s += x;
        s2 += x * x;
    }
    const double mean = s / draws;
    const double var = s2 / draws - mean * mean;
    CHECK(std::fabs(mean - 1.0) < 4.0 * std::sqrt(1.0 / beta / draws));
    // fourth central moment of gamma(k, k): 3 (k + 2) / k^3
    const double mu4 = 3.0 * (beta + 2.0) / (beta * beta * beta);
    CHECK(std::fabs(var - 1.0 / beta) < 4.0 * std::sqrt((mu4 - 1.0 / (beta * beta)) / draws));
}

TEST_CASE("dirichlet density") {
    const DirichletSpec flat(2, 1.0);
    for (double f1 : {0.01, 0.3, 0.5, 0.99}) {
        const std::vector<double> f{f1, 1.0 - f1};
        CHECK(std::fabs(dirichlet_log_pdf(f, flat)) < 1e-14);
    }
    const std::vector<double> off{0.5, 0.6};
    CHECK_THROWS_AS(dirichlet_log_pdf(off, flat), DomainError);

    const auto shape = dirichlet_marginal_beta(flat, 1);
    CHECK(shape.a == 1.0);
    CHECK(shape.b == 1.0);
    for (int k : {2, 5, 30}) {
        const auto spec = DirichletSpec::from_aggregation_constant(k, 2.0);
        CHECK(dirichlet_marginal_beta(spec, 1).mean() == doctest::Approx(1.0 / k));
        CHECK(spec.total_concentration() == doctest::Approx(2.0));
    }
    CHECK_THROWS(dirichlet_marginal_beta(flat, 3));
}

TEST_CASE("dirichlet component variance against draws") {
    const auto spec = DirichletSpec::from_aggregation_constant(30, 2.0);
    const double k = 30.0;
    const double expected = (1.0 / k) * (1.0 - 1.0 / k) / (2.0 + 1.0);
    CHECK(dirichlet_marginal_beta(spec, 1).variance() == doctest::Approx(expected));

    RngStream rng(7);
    const int draws = 100000;
    std::vector<double> xs(draws);
    const auto alpha = spec.concentration_vector();
    for (auto& x : xs) x = sample(rng, DirichletDist{alpha})[0];
    double s = 0.0;
    for (double x : xs) s += x;
    const double mean = s / draws;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        m2 += (x - mean) * (x - mean);
        m4 += std::pow(x - mean, 4);
    }
    m2 /= draws;
    m4 /= draws;
    CHECK(std::fabs(m2 - expected) < 4.0 * std::sqrt((m4 - m2 * m2) / draws));
}

TEST_CASE("multinomial likelihood is maximized at n_k / N") {
    const std::vector<long long> counts{3, 2, 5};
    const auto mle = multinomial_mle(counts);
    CHECK(mle[0] == doctest::Approx(0.3));
    CHECK(mle[1] == doctest::Approx(0.2));
    CHECK(mle[2] == doctest::Approx(0.5));
    const double best = multinomial_log_like(counts, mle);
    RngStream rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto f = sample(rng, DirichletDist{{1.0, 1.0, 1.0}});
        CHECK(multinomial_log_like(counts, f) <= best);
    }
    // coefficient included: 10! / (3! 2! 5!) = 2520
    const std::vector<double> third{1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(multinomial_log_like(counts, third) == doctest::Approx(std::log(2520.0) - 10.0 * std::log(3.0)));
}

TEST_CASE("chi density") {
    // dim 1 is the half-normal
    for (double x : {0.0, 0.4, 2.0}) {
        CHECK(chi_log_pdf(x, 1) == doctest::Approx(std::log(2.0) + normal_log_pdf(x, 0.0, 1.0)));
    }
    for (int n : {1, 2, 5, 30, 100}) {
        const double hi = std::sqrt(static_cast<double>(n)) + 10.0;
        const double total = simpson([n](double x) { return std::exp(chi_log_pdf(x, n)); }, 0.0, hi, 20000);
        CHECK(std::fabs(total - 1.0) < 1e-8);
    }
    for (int n : {2, 5, 30}) {
        const double mode = std::sqrt(n - 1.0);
        const double h = 1e-4;
        const double deriv = (chi_log_pdf(mode + h, n) - chi_log_pdf(mode - h, n)) / (2.0 * h);
        CHECK(std::fabs(deriv) < 1e-6);
        CHECK(chi_log_pdf(mode, n) > chi_log_pdf(mode + 0.1, n));
        CHECK(chi_log_pdf(mode, n) > chi_log_pdf(mode - 0.1, n));
    }
    CHECK_THROWS_AS(chi_log_pdf(1.0, 0), DomainError);
}

TEST_CASE("chi cdf and quantile") {
    CHECK(chi_cdf(0.0, 30) == 0.0);
    const double lo = chi_quantile(0.05, 30);
    const double hi = chi_quantile(0.95, 30);
    CHECK(chi_cdf(lo, 30) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_cdf(hi, 30) == doctest::Approx(0.95).epsilon(1e-9));
    const double mid = 0.5 * (lo + hi);
    CHECK(mid >= 5.3);
    CHECK(mid <= 5.6);
    // dim 2: chi^2 is exponential with mean 2
    CHECK(chi_cdf(1.5, 2) == doctest::Approx(1.0 - std::exp(-1.5 * 1.5 / 2.0)));
}

TEST_CASE("max abs coordinate distribution") {
    for (int n : {1, 3, 30}) CHECK(max_abs_coord_cdf(0.0, n) == 0.0);
    for (double m : {0.2, 1.0, 3.0}) CHECK(max_abs_coord_cdf(m, 1) == doctest::Approx(2.0 * normal_cdf(m) - 1.0));
    const double total = simpson([](double x) { return std::exp(max_abs_coord_log_pdf(x, 30)); }, 1e-9, 12.0, 20000);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    const double m = 2.3, h = 1e-5;
    const double diff = (max_abs_coord_cdf(m + h, 30) - max_abs_coord_cdf(m - h, 30)) / (2.0 * h);
    CHECK(std::exp(max_abs_coord_log_pdf(m, 30)) == doctest::Approx(diff).epsilon(1e-6));
}
