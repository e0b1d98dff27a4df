#pragma once

// Dense log-density grids and the law-of-total-probability operations on
// them: normalization (evidence), marginalization, HPD regions,
// propagation, posterior prediction, model comparison and averaging.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "margin/numeric.hpp"
#include "margin/rng.hpp"

namespace margin {

enum class AxisTransform { linear, log };

/// A uniformly spaced axis in the transformed coordinate (x or ln x).
/// Quadrature is trapezoid in that coordinate with the Jacobian folded into
/// the weights, so integrals are always with respect to dx.
class Axis {
public:
    Axis(std::string name, double lo, double hi, std::size_t n,
         AxisTransform transform = AxisTransform::linear);

    const std::string& name() const { return name_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t size() const { return n_; }
    AxisTransform transform() const { return transform_; }

    double node(std::size_t i) const;
    std::vector<double> nodes() const;
    std::vector<double> weights() const;
    /// Node spacing in the transformed coordinate.
    double step() const;

    double to_transformed(double x) const;
    double from_transformed(double u) const;

    bool same_as(const Axis& other) const;

private:
    std::string name_;
    double lo_;
    double hi_;
    std::size_t n_;
    AxisTransform transform_;
};

using PointFn = std::function<double(std::span<const double>)>;

/// Log-density values on the lattice spanned by the axes, row-major in
/// axis declaration order (last axis fastest).
class LogDensityGrid {
public:
    LogDensityGrid(std::vector<Axis> axes, std::vector<double> log_values, bool normalized = false);

    /// Evaluates log_f at every lattice node.
    static LogDensityGrid fill(std::vector<Axis> axes, const PointFn& log_f);

    const std::vector<Axis>& axes() const { return axes_; }
    const Axis& axis(std::size_t i) const { return axes_.at(i); }
    std::size_t dimension() const { return axes_.size(); }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double value(std::size_t flat) const { return values_[flat]; }
    bool normalized() const { return normalized_; }

    /// Position of the named axis; throws UsageError if absent.
    std::size_t axis_index(const std::string& name) const;
    std::vector<std::size_t> unravel(std::size_t flat) const;
    std::vector<double> point(std::size_t flat) const;
    /// ln of the product quadrature weight at each node.
    std::vector<double> log_weights() const;

private:
    std::vector<Axis> axes_;
    std::vector<double> values_;
    bool normalized_;
};

struct NormalizedGrid {
    LogDensityGrid grid;
    double log_evidence;
};

/// Throws NumericError("degenerate evidence") when every node is -inf.
NormalizedGrid normalize(const LogDensityGrid& grid);

/// Integrates the named axes out. Dropping every axis is a UsageError.
LogDensityGrid marginalize(const LogDensityGrid& grid, const std::vector<std::string>& drop_axes);

/// Keeps only the named axis (marginalizing the rest); identity on 1-D grids.
LogDensityGrid marginal_of(const LogDensityGrid& grid, const std::string& keep_axis);

/// Re-expresses a 1-D density on a log axis as a density in u = ln x on a
/// linear axis named "ln_<name>" with the same nodes.
LogDensityGrid in_log_coordinate(const LogDensityGrid& grid);

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

struct HpdRegion {
    double level;
    double mass;  // quadrature mass of the selected nodes
    std::vector<Interval> intervals;
    double total_length() const;
};

/// Smallest density-threshold node set with mass >= level (64 bisection
/// steps on the log-density threshold). Grid must be 1-D and normalized.
HpdRegion hpd_region(const LogDensityGrid& grid, double level);

/// Central interval from linear interpolation of the cumulative trapezoid mass.
Interval equal_tail_interval(const LogDensityGrid& grid, double level);

struct Histogram {
    std::vector<double> edges;
    std::vector<double> density;
};

Histogram make_histogram(std::span<const double> values, std::size_t bins);
Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

/// M draws from a normalized grid: categorical over node masses then uniform
/// jitter inside the node's cell (transformed coordinate).
std::vector<std::vector<double>> sample_grid(const LogDensityGrid& grid, RngStream& rng, std::size_t draws);

struct Propagation {
    std::vector<double> samples;
    Histogram histogram;
    double mean;
    double variance;
};

/// Density of f(theta) under the grid posterior, from M >= 10^4 draws.
Propagation propagate(const LogDensityGrid& grid, const PointFn& f, RngStream& rng, std::size_t draws,
                      std::size_t bins = 100);

using SamplingLogMass = std::function<double(long long, std::span<const double>)>;

struct PredictiveDistribution {
    long long first_datum;
    std::vector<double> mass;
    double captured;  // total mass inside the support window
    bool truncated;
    std::vector<std::string> warnings;
    double probability(long long datum) const;
};

/// p(d | D) = integral p(d | theta) p(theta | D) for each d in [lo, hi].
PredictiveDistribution posterior_predictive(const LogDensityGrid& grid, const SamplingLogMass& log_mass,
                                            long long datum_lo, long long datum_hi);

/// A model for evidence computation: either a prior grid (normalized
/// internally) or a parameter-free point hypothesis.
struct ModelSpec {
    std::string name;
    std::optional<LogDensityGrid> log_prior;
    std::vector<double> fixed_point;
    PointFn log_likelihood;
};

struct EvidenceReport {
    std::vector<std::string> names;
    std::vector<double> log_evidence;
    /// log_bayes_factor[i][j] = ln(E_i / E_j)
    std::vector<std::vector<double>> log_bayes_factor;
    double bayes_factor(std::size_t i, std::size_t j) const;
};

double model_log_evidence(const ModelSpec& model);
EvidenceReport model_evidence_and_bayes_factor(std::span<const ModelSpec> models);

struct ModelAverage {
    LogDensityGrid density;  // normalized, 1-D over the shared axis
    std::vector<double> weights;
    std::vector<double> log_evidence;
};

/// Averages each model's posterior marginal on shared_axis with weights
/// proportional to prior probability times evidence. Inputs are unnormalized
/// joint log(prior x likelihood) grids whose shared axes coincide. Empty
/// prior_probabilities means equal prior model probabilities.
ModelAverage model_average(std::span<const LogDensityGrid> joint_grids, const std::string& shared_axis,
                           std::span<const double> prior_probabilities = {});

struct AxisHpd {
    std::string axis;
    HpdRegion region;
};

struct InferenceSummary {
    std::vector<double> mode;
    std::vector<double> mean;
    std::vector<AxisHpd> hpd;
    double log_evidence;
};

/// Mode (best node), posterior mean, per-axis marginal HPD regions and
/// evidence of an unnormalized posterior grid.
InferenceSummary summarize(const LogDensityGrid& grid, std::span<const double> levels);

void write_csv(const LogDensityGrid& grid, std::ostream& out);
nlohmann::json to_json(const LogDensityGrid& grid);
LogDensityGrid grid_from_json(const nlohmann::json& j);

}  // namespace margin
