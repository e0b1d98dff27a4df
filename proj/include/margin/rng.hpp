#pragma once

// Reproducible random streams and the variate generators used by the
// simulation demos. Generators are implemented here rather than through
// <random> distributions so that sequences are identical across standard
// library implementations.

#include <cstdint>
#include <span>
#include <vector>

namespace margin {

/// xoshiro256** state seeded from (seed, stream id) through SplitMix64.
/// A stream is not thread-safe; give each task its own stream via derive().
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    /// Child stream keyed by (this stream, child id); independent of the parent's position.
    RngStream derive(std::uint64_t child) const;

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    double standard_normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t s_[4];
};

struct NormalDist {
    double mu = 0.0;
    double sigma = 1.0;
};

struct GammaDist {
    double shape;
    double rate;
};

struct PoissonDist {
    double mean;
};

struct BinomialDist {
    long long trials;
    double p;
};

struct NegBinomialDist {
    double r;      // target successes, may be non-integer
    double theta;  // success probability
};

struct DirichletDist {
    std::vector<double> alpha;
};

double sample(RngStream& rng, const NormalDist& d);
/// Marsaglia-Tsang squeeze; shape < 1 boosted via U^(1/shape).
double sample(RngStream& rng, const GammaDist& d);
/// Multiplication method below mean 10, PTRS transformed rejection above.
long long sample(RngStream& rng, const PoissonDist& d);
/// Inversion for small mean, BTRS transformed rejection otherwise.
long long sample(RngStream& rng, const BinomialDist& d);
/// Gamma-Poisson mixture. Counts failures before r successes.
long long sample(RngStream& rng, const NegBinomialDist& d);
/// Normalized gamma vector.
std::vector<double> sample(RngStream& rng, const DirichletDist& d);

}  // namespace margin
