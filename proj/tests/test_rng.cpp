#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "margin/error.hpp"
#include "margin/rng.hpp"

using namespace margin;

namespace {

struct Moments {
    double mean;
    double variance;
};

template <typename Draw>
Moments moments(std::size_t n, Draw draw) {
    double s = 0.0, s2 = 0.0;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = static_cast<double>(draw());
        s += x;
    }
    const double mean = s / static_cast<double>(n);
    for (double x : xs) s2 += (x - mean) * (x - mean);
    return {mean, s2 / static_cast<double>(n - 1)};
}

// |empirical - expected| within k Monte Carlo standard errors for mean and
// variance, given the distribution's variance and fourth central moment.
void check_moments(const Moments& m, double mean, double var, double mu4, std::size_t n, double k = 4.0) {
    const double dn = static_cast<double>(n);
    CHECK(std::fabs(m.mean - mean) < k * std::sqrt(var / dn));
    CHECK(std::fabs(m.variance - var) < k * std::sqrt((mu4 - var * var) / dn));
}

constexpr std::size_t kDraws = 100000;

}  // namespace

TEST_CASE("identical seed and stream replay the same sequence") {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams and derived children differ") {
    RngStream a(42, 0), b(42, 1);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);

    RngStream parent(9);
    const RngStream c1 = parent.derive(1);
    parent.next_u64();
    const RngStream c1_later = parent.derive(1);
    RngStream x = c1, y = c1_later;
    CHECK(x.next_u64() == y.next_u64());
    RngStream z = parent.derive(2);
    RngStream w = parent.derive(1);
    CHECK(z.next_u64() != w.next_u64());
}

TEST_CASE("sibling streams are uncorrelated") {
    const std::size_t m = 100000;
    RngStream a(2024, 0), b(2024, 1);
    double sab = 0.0, sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double u = a.uniform(), v = b.uniform();
        sa += u;
        sb += v;
        sab += u * v;
        saa += u * u;
        sbb += v * v;
    }
    const double dm = static_cast<double>(m);
    const double cov = sab / dm - (sa / dm) * (sb / dm);
    const double corr = cov / std::sqrt((saa / dm - sa * sa / dm / dm) * (sbb / dm - sb * sb / dm / dm));
    CHECK(std::fabs(corr) < 3.0 / std::sqrt(dm));
}

TEST_CASE("uniform stays in the open unit interval") {
    RngStream r(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        CHECK_UNARY(u > 0.0);
        CHECK_UNARY(u < 1.0);
    }
}

TEST_CASE("normal sampler moments") {
    RngStream r(11);
    const NormalDist d{1.5, 2.0};
    const double var = 4.0;
    check_moments(moments(kDraws, [&] { return sample(r, d); }), 1.5, var, 3.0 * var * var, kDraws);
    CHECK_THROWS_AS(sample(r, NormalDist{0.0, 0.0}), DomainError);
}

TEST_CASE("gamma sampler moments for shape below and above one") {
    for (double shape : {0.3, 1.0, 2.5, 40.0}) {
        RngStream r(12, static_cast<std::uint64_t>(shape * 10));
        const double rate = 1.7;
        const double var = shape / (rate * rate);
        const double mu4 = 3.0 * shape * (shape + 2.0) / std::pow(rate, 4);
        check_moments(moments(kDraws, [&] { return sample(r, GammaDist{shape, rate}); }), shape / rate, var, mu4,
                      kDraws);
    }
    RngStream r(1);
    CHECK_THROWS_AS(sample(r, GammaDist{0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(sample(r, GammaDist{1.0, -1.0}), DomainError);
}

TEST_CASE("unit-mean gamma has mean one to 3 / sqrt(n beta)") {
    for (double beta : {0.5, 2.0, 20.0}) {
        RngStream r(13, static_cast<std::uint64_t>(beta * 2));
        const auto m = moments(kDraws, [&] { return sample(r, GammaDist{beta, beta}); });
        CHECK(std::fabs(m.mean - 1.0) < 3.0 / std::sqrt(kDraws * beta));
    }
}

TEST_CASE("poisson sampler moments across both algorithms") {
    for (double mean : {0.0, 0.4, 7.0, 9.99, 10.0, 35.0, 1234.5}) {
        RngStream r(14, static_cast<std::uint64_t>(mean * 100));
        const auto m = moments(kDraws, [&] { return sample(r, PoissonDist{mean}); });
        if (mean == 0.0) {
            CHECK(m.mean == 0.0);
            continue;
        }
        check_moments(m, mean, mean, mean * (1.0 + 3.0 * mean), kDraws);
    }
    RngStream r(1);
    CHECK_THROWS_AS(sample(r, PoissonDist{-0.1}), DomainError);
}

TEST_CASE("binomial sampler moments") {
    for (auto [n, p] : {std::pair{20LL, 0.5}, std::pair{20LL, 0.05}, std::pair{1000LL, 0.8}, std::pair{50LL, 1.0}}) {
        RngStream r(15, static_cast<std::uint64_t>(n));
        const auto m = moments(kDraws, [&] { return sample(r, BinomialDist{n, p}); });
        const double dn = static_cast<double>(n);
        const double var = dn * p * (1.0 - p);
        if (var == 0.0) {
            CHECK(m.mean == dn);
            continue;
        }
        const double mu4 = var * (1.0 + 3.0 * (dn - 2.0) * p * (1.0 - p));
        check_moments(m, dn * p, var, mu4, kDraws);
    }
    RngStream r(1);
    CHECK_THROWS_AS(sample(r, BinomialDist{10, 1.5}), DomainError);
    CHECK_THROWS_AS(sample(r, BinomialDist{10, 0.0}), DomainError);
}

TEST_CASE("negative binomial sampler moments") {
    const double rr = 2.5, theta = 0.3;
    RngStream r(16);
    const double mean = rr * (1.0 - theta) / theta;
    const double var = mean / theta;
    // fourth central moment from the cumulants
    const double q = 1.0 - theta;
    const double k2 = rr * q / (theta * theta);
    const double k4 = rr * q * (theta * theta + 6.0 * q) / std::pow(theta, 4);
    check_moments(moments(kDraws, [&] { return sample(r, NegBinomialDist{rr, theta}); }), mean, var,
                  k4 + 3.0 * k2 * k2, kDraws);
    CHECK_THROWS_AS(sample(r, NegBinomialDist{0.0, 0.5}), DomainError);
}

TEST_CASE("dirichlet draws lie on the simplex with the right moments") {
    RngStream r(17);
    const std::vector<double> alpha{0.5, 1.0, 3.5};
    const double a0 = 5.0;
    double s0 = 0.0, s00 = 0.0;
    for (std::size_t i = 0; i < kDraws; ++i) {
        const auto f = sample(r, DirichletDist{alpha});
        REQUIRE(f.size() == 3);
        const double sum = std::accumulate(f.begin(), f.end(), 0.0);
        CHECK(std::fabs(sum - 1.0) < 1e-12);
        s0 += f[2];
        s00 += f[2] * f[2];
    }
    const double dn = static_cast<double>(kDraws);
    const double m = alpha[2] / a0;
    const double var = m * (1.0 - m) / (a0 + 1.0);
    CHECK(std::fabs(s0 / dn - m) < 4.0 * std::sqrt(var / dn));
    CHECK(std::fabs(s00 / dn - s0 * s0 / dn / dn - var) < 4.0 * 2.0 * var / std::sqrt(dn));
}
