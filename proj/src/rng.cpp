#include "margin/rng.hpp"

#include <cmath>
#include <string>

#include "margin/error.hpp"
#include "margin/numeric.hpp"

namespace margin {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

long long poisson_small(RngStream& rng, double mean) {
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = rng.uniform();
    while (prod > limit) {
        ++k;
        prod *= rng.uniform();
    }
    return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables".
long long poisson_ptrs(RngStream& rng, double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const auto k = static_cast<long long>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= vr) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
        const double rhs = -mean + static_cast<double>(k) * loglam - log_gamma(static_cast<double>(k) + 1.0);
        if (lhs <= rhs) return k;
    }
}

long long binomial_inversion(RngStream& rng, long long n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    for (;;) {
        double r = std::pow(q, static_cast<double>(n));
        double u = rng.uniform();
        long long x = 0;
        while (u > r) {
            u -= r;
            ++x;
            if (x > n) break;
            r *= (a / static_cast<double>(x) - s);
        }
        if (x <= n) return x;
    }
}

// Hormann (1993), BTRS.
long long binomial_btrs(RngStream& rng, long long n, double p) {
    const double dn = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(dn * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = dn * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((dn + 1.0) * p);
    const double h = log_gamma(m + 1.0) + log_gamma(dn - m + 1.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + c);
        if (kf < 0.0 || kf > dn) continue;
        if (us >= 0.07 && v <= vr) return static_cast<long long>(kf);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - log_gamma(kf + 1.0) - log_gamma(dn - kf + 1.0) + (kf - m) * lpq) {
            return static_cast<long long>(kf);
        }
    }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
    std::uint64_t a = seed;
    std::uint64_t b = stream_id ^ 0xD1B54A32D192ED03ULL;
    std::uint64_t x = splitmix64(a) ^ rotl(splitmix64(b), 29);
    for (auto& word : s_) word = splitmix64(x);
}

RngStream RngStream::derive(std::uint64_t child) const {
    std::uint64_t x = stream_ ^ rotl(child + 0x632BE59BD9B4E019ULL, 17);
    return RngStream(seed_, splitmix64(x));
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    // 53 random bits centred in their cell, never exactly 0 or 1
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::standard_normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double sample(RngStream& rng, const NormalDist& d) {
    if (!(d.sigma > 0.0) || !std::isfinite(d.mu)) throw DomainError("normal: need sigma > 0");
    return d.mu + d.sigma * rng.standard_normal();
}

double sample(RngStream& rng, const GammaDist& d) {
    if (!(d.shape > 0.0) || !(d.rate > 0.0)) throw DomainError("gamma: need shape > 0 and rate > 0");
    if (d.shape < 1.0) {
        const double boost = std::pow(rng.uniform(), 1.0 / d.shape);
        return boost * sample(rng, GammaDist{d.shape + 1.0, d.rate});
    }
    const double dd = d.shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * dd);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return dd * v / d.rate;
        if (std::log(u) < 0.5 * x2 + dd * (1.0 - v + std::log(v))) return dd * v / d.rate;
    }
}

long long sample(RngStream& rng, const PoissonDist& d) {
    if (!(d.mean >= 0.0) || !std::isfinite(d.mean)) throw DomainError("poisson: need mean >= 0");
    if (d.mean == 0.0) return 0;
    if (d.mean < 10.0) return poisson_small(rng, d.mean);
    return poisson_ptrs(rng, d.mean);
}

long long sample(RngStream& rng, const BinomialDist& d) {
    if (d.trials < 0) throw DomainError("binomial: trials must be nonnegative");
    if (!(d.p > 0.0 && d.p <= 1.0)) throw DomainError("binomial: p must lie in (0, 1]");
    if (d.p == 1.0 || d.trials == 0) return d.trials;
    if (d.p > 0.5) return d.trials - sample(rng, BinomialDist{d.trials, 1.0 - d.p});
    if (static_cast<double>(d.trials) * d.p < 10.0) return binomial_inversion(rng, d.trials, d.p);
    return binomial_btrs(rng, d.trials, d.p);
}

long long sample(RngStream& rng, const NegBinomialDist& d) {
    if (!(d.r > 0.0)) throw DomainError("neg_binomial: need r > 0");
    if (!(d.theta > 0.0 && d.theta <= 1.0)) throw DomainError("neg_binomial: theta must lie in (0, 1]");
    if (d.theta == 1.0) return 0;
    const double lambda = sample(rng, GammaDist{d.r, d.theta / (1.0 - d.theta)});
    return sample(rng, PoissonDist{lambda});
}

std::vector<double> sample(RngStream& rng, const DirichletDist& d) {
    if (d.alpha.size() < 2) throw DomainError("dirichlet: need at least two components");
    std::vector<double> g(d.alpha.size());
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(d.alpha[k] > 0.0)) throw DomainError("dirichlet: concentrations must be positive");
        g[k] = sample(rng, GammaDist{d.alpha[k], 1.0});
        total += g[k];
    }
    for (auto& v : g) v /= total;
    return g;
}

}  // namespace margin
