#include "margin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "margin/error.hpp"
#include "margin/format.hpp"

namespace margin {

// ---------------------------------------------------------------- Axis

Axis::Axis(std::string name, double lo, double hi, std::size_t n, AxisTransform transform)
    : name_(std::move(name)), lo_(lo), hi_(hi), n_(n), transform_(transform) {
    if (name_.empty()) throw UsageError("Axis: empty name");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw UsageError("Axis '" + name_ + "': need finite lo < hi");
    }
    if (n < 3) throw UsageError("Axis '" + name_ + "': need at least 3 nodes");
    if (transform == AxisTransform::log && !(lo > 0.0)) {
        throw UsageError("Axis '" + name_ + "': log transform requires lo > 0");
    }
}

double Axis::to_transformed(double x) const { return transform_ == AxisTransform::log ? std::log(x) : x; }

double Axis::from_transformed(double u) const { return transform_ == AxisTransform::log ? std::exp(u) : u; }

double Axis::step() const {
    return (to_transformed(hi_) - to_transformed(lo_)) / static_cast<double>(n_ - 1);
}

double Axis::node(std::size_t i) const {
    if (i == 0) return lo_;
    if (i + 1 == n_) return hi_;
    return from_transformed(to_transformed(lo_) + step() * static_cast<double>(i));
}

std::vector<double> Axis::nodes() const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
    return x;
}

std::vector<double> Axis::weights() const {
    const double h = step();
    std::vector<double> w(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const double base = (i == 0 || i + 1 == n_) ? 0.5 * h : h;
        w[i] = transform_ == AxisTransform::log ? base * node(i) : base;
    }
    return w;
}

bool Axis::same_as(const Axis& other) const {
    return name_ == other.name_ && lo_ == other.lo_ && hi_ == other.hi_ && n_ == other.n_ &&
           transform_ == other.transform_;
}

// ---------------------------------------------------------------- LogDensityGrid

LogDensityGrid::LogDensityGrid(std::vector<Axis> axes, std::vector<double> log_values, bool normalized)
    : axes_(std::move(axes)), values_(std::move(log_values)), normalized_(normalized) {
    if (axes_.empty()) throw UsageError("LogDensityGrid: need at least one axis");
    std::size_t expected = 1;
    for (const auto& a : axes_) expected *= a.size();
    if (values_.size() != expected) {
        throw UsageError("LogDensityGrid: value count " + std::to_string(values_.size()) +
                         " does not match lattice size " + std::to_string(expected));
    }
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        for (std::size_t j = i + 1; j < axes_.size(); ++j) {
            if (axes_[i].name() == axes_[j].name()) throw UsageError("LogDensityGrid: duplicate axis name");
        }
    }
    for (double v : values_) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            throw NumericError("LogDensityGrid: entries must be finite or -inf");
        }
    }
}

LogDensityGrid LogDensityGrid::fill(std::vector<Axis> axes, const PointFn& log_f) {
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.size();
    std::vector<std::vector<double>> nodes;
    nodes.reserve(axes.size());
    for (const auto& a : axes) nodes.push_back(a.nodes());

    std::vector<double> values(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    std::vector<double> pt(axes.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t d = 0; d < axes.size(); ++d) pt[d] = nodes[d][idx[d]];
        const double v = log_f(pt);
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            std::string where;
            for (std::size_t d = 0; d < axes.size(); ++d) {
                where += (d ? ", " : "") + axes[d].name() + "=" + format_double(pt[d]);
            }
            throw NumericError("grid fill: non-finite log density at (" + where + ")");
        }
        values[flat] = v;
        for (std::size_t d = axes.size(); d-- > 0;) {
            if (++idx[d] < axes[d].size()) break;
            idx[d] = 0;
        }
    }
    return LogDensityGrid(std::move(axes), std::move(values));
}

std::size_t LogDensityGrid::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].name() == name) return i;
    }
    throw UsageError("grid has no axis named '" + name + "'");
}

std::vector<std::size_t> LogDensityGrid::unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t d = axes_.size(); d-- > 0;) {
        idx[d] = flat % axes_[d].size();
        flat /= axes_[d].size();
    }
    return idx;
}

std::vector<double> LogDensityGrid::point(std::size_t flat) const {
    const auto idx = unravel(flat);
    std::vector<double> pt(idx.size());
    for (std::size_t d = 0; d < idx.size(); ++d) pt[d] = axes_[d].node(idx[d]);
    return pt;
}

std::vector<double> LogDensityGrid::log_weights() const {
    std::vector<std::vector<double>> lw;
    for (const auto& a : axes_) {
        auto w = a.weights();
        for (auto& v : w) v = std::log(v);
        lw.push_back(std::move(w));
    }
    std::vector<double> out(values_.size());
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const auto idx = unravel(flat);
        double acc = 0.0;
        for (std::size_t d = 0; d < idx.size(); ++d) acc += lw[d][idx[d]];
        out[flat] = acc;
    }
    return out;
}

// ---------------------------------------------------------------- reductions

NormalizedGrid normalize(const LogDensityGrid& grid) {
    const auto lw = grid.log_weights();
    std::vector<double> terms(grid.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = grid.value(i) + lw[i];
    const double log_z = log_sum_exp(terms);
    if (log_z == kNegInf) throw NumericError("normalize: degenerate evidence (all nodes have zero density)");
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid.value(i) - log_z;
    return {LogDensityGrid(grid.axes(), std::move(out), true), log_z};
}

LogDensityGrid marginalize(const LogDensityGrid& grid, const std::vector<std::string>& drop_axes) {
    if (drop_axes.empty()) throw UsageError("marginalize: no axes to drop");
    std::vector<bool> dropped(grid.dimension(), false);
    for (const auto& name : drop_axes) dropped[grid.axis_index(name)] = true;
    std::vector<Axis> kept;
    for (std::size_t d = 0; d < grid.dimension(); ++d) {
        if (!dropped[d]) kept.push_back(grid.axis(d));
    }
    if (kept.empty()) throw UsageError("marginalize: cannot drop every axis; use normalize for the total");

    std::vector<std::vector<double>> lw(grid.dimension());
    for (std::size_t d = 0; d < grid.dimension(); ++d) {
        if (!dropped[d]) continue;
        auto w = grid.axis(d).weights();
        for (auto& v : w) lw[d].push_back(std::log(v));
    }

    std::size_t out_size = 1;
    for (const auto& a : kept) out_size *= a.size();
    std::vector<double> top(out_size, kNegInf);
    std::vector<std::size_t> target(grid.size());
    std::vector<double> term(grid.size());
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        const auto idx = grid.unravel(flat);
        std::size_t out = 0;
        double w = 0.0;
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (dropped[d]) {
                w += lw[d][idx[d]];
            } else {
                out = out * grid.axis(d).size() + idx[d];
            }
        }
        target[flat] = out;
        term[flat] = grid.value(flat) + w;
        top[out] = std::max(top[out], term[flat]);
    }
    std::vector<double> sum(out_size, 0.0);
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        const std::size_t out = target[flat];
        if (top[out] != kNegInf) sum[out] += std::exp(term[flat] - top[out]);
    }
    std::vector<double> values(out_size);
    for (std::size_t k = 0; k < out_size; ++k) {
        values[k] = top[k] == kNegInf ? kNegInf : top[k] + std::log(sum[k]);
    }
    return LogDensityGrid(std::move(kept), std::move(values), grid.normalized());
}

LogDensityGrid marginal_of(const LogDensityGrid& grid, const std::string& keep_axis) {
    grid.axis_index(keep_axis);
    std::vector<std::string> drop;
    for (const auto& a : grid.axes()) {
        if (a.name() != keep_axis) drop.push_back(a.name());
    }
    if (drop.empty()) return grid;
    return marginalize(grid, drop);
}

LogDensityGrid in_log_coordinate(const LogDensityGrid& grid) {
    if (grid.dimension() != 1) throw UsageError("in_log_coordinate: need a 1-D grid");
    const Axis& a = grid.axis(0);
    if (a.transform() != AxisTransform::log) throw UsageError("in_log_coordinate: axis " + a.name() + " is linear");
    const Axis u("ln_" + a.name(), std::log(a.lo()), std::log(a.hi()), a.size());
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = grid.value(i) == kNegInf ? kNegInf : grid.value(i) + std::log(a.node(i));
    }
    return LogDensityGrid({u}, std::move(values), grid.normalized());
}

// ---------------------------------------------------------------- HPD

double HpdRegion::total_length() const {
    double total = 0.0;
    for (const auto& iv : intervals) total += iv.length();
    return total;
}

HpdRegion hpd_region(const LogDensityGrid& grid, double level) {
    if (grid.dimension() != 1) throw UsageError("hpd_region: grid must be one-dimensional");
    if (!grid.normalized()) throw UsageError("hpd_region: grid must be normalized");
    if (!(level > 0.0 && level < 1.0)) throw UsageError("hpd_region: level must lie in (0, 1)");

    const auto& axis = grid.axis(0);
    const auto w = axis.weights();
    const auto x = axis.nodes();
    const auto v = grid.values();

    auto mass_above = [&](double threshold) {
        double m = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] >= threshold && v[i] != kNegInf) m += w[i] * std::exp(v[i]);
        }
        return m;
    };

    double hi = *std::max_element(v.begin(), v.end());
    double lo = hi;
    for (double val : v) {
        if (val != kNegInf) lo = std::min(lo, val);
    }
    if (mass_above(hi) < level) {
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mass_above(mid) >= level) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        lo = hi;
    }

    HpdRegion region{level, 0.0, {}};
    bool open = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool inside = v[i] != kNegInf && v[i] >= lo;
        if (inside) {
            region.mass += w[i] * std::exp(v[i]);
            if (!open) {
                region.intervals.push_back({x[i], x[i]});
                open = true;
            }
            region.intervals.back().hi = x[i];
        } else {
            open = false;
        }
    }
    return region;
}

Interval equal_tail_interval(const LogDensityGrid& grid, double level) {
    if (grid.dimension() != 1) throw UsageError("equal_tail_interval: grid must be one-dimensional");
    if (!(level > 0.0 && level < 1.0)) throw UsageError("equal_tail_interval: level must lie in (0, 1)");
    const auto norm = grid.normalized() ? grid : normalize(grid).grid;
    const auto x = norm.axis(0).nodes();
    const auto v = norm.values();
    // cumulative trapezoid mass in the original coordinate
    std::vector<double> cdf(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * (std::exp(v[i - 1]) + std::exp(v[i])) * (x[i] - x[i - 1]);
    }
    const double total = cdf.back();
    auto quantile = [&](double p) {
        const double target = p * total;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
        if (it == cdf.begin()) return x.front();
        if (it == cdf.end()) return x.back();
        const auto i = static_cast<std::size_t>(std::distance(cdf.begin(), it));
        const double span = cdf[i] - cdf[i - 1];
        const double t = span > 0.0 ? (target - cdf[i - 1]) / span : 0.0;
        return x[i - 1] + t * (x[i] - x[i - 1]);
    };
    return {quantile(0.5 * (1.0 - level)), quantile(0.5 * (1.0 + level))};
}

// ---------------------------------------------------------------- sampling

Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (values.empty() || bins == 0) throw UsageError("make_histogram: need values and bins");
    if (!(lo < hi)) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    h.density.assign(bins, 0.0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
    h.edges.back() = hi;
    std::size_t counted = 0;
    for (double v : values) {
        if (v < lo || v > hi) continue;
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1;
        h.density[b] += 1.0;
        ++counted;
    }
    const double n = static_cast<double>(values.size());
    for (auto& d : h.density) d /= n * width;
    (void)counted;
    return h;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw UsageError("make_histogram: need values");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return make_histogram(values, bins, *mn, *mx);
}

std::vector<std::vector<double>> sample_grid(const LogDensityGrid& grid, RngStream& rng, std::size_t draws) {
    const auto lw = grid.log_weights();
    std::vector<double> lm(grid.size());
    for (std::size_t i = 0; i < lm.size(); ++i) lm[i] = grid.value(i) + lw[i];
    const double log_z = log_sum_exp(lm);
    if (log_z == kNegInf) throw NumericError("sample_grid: degenerate grid");
    std::vector<double> cdf(lm.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < lm.size(); ++i) {
        acc += std::exp(lm[i] - log_z);
        cdf[i] = acc;
    }

    std::vector<std::vector<double>> out;
    out.reserve(draws);
    for (std::size_t m = 0; m < draws; ++m) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto idx = grid.unravel(static_cast<std::size_t>(std::distance(cdf.begin(), it)));
        std::vector<double> pt(idx.size());
        for (std::size_t d = 0; d < idx.size(); ++d) {
            const auto& ax = grid.axis(d);
            const double h = ax.step();
            const double uc = ax.to_transformed(ax.node(idx[d]));
            const double a = std::max(uc - 0.5 * h, ax.to_transformed(ax.lo()));
            const double b = std::min(uc + 0.5 * h, ax.to_transformed(ax.hi()));
            pt[d] = ax.from_transformed(a + (b - a) * rng.uniform());
        }
        out.push_back(std::move(pt));
    }
    return out;
}

Propagation propagate(const LogDensityGrid& grid, const PointFn& f, RngStream& rng, std::size_t draws,
                      std::size_t bins) {
    if (draws < 10000) throw UsageError("propagate: need at least 10^4 draws");
    const auto pts = sample_grid(grid, rng, draws);
    Propagation p;
    p.samples.reserve(draws);
    for (const auto& pt : pts) {
        const double v = f(pt);
        if (!std::isfinite(v)) {
            std::string where;
            for (std::size_t d = 0; d < pt.size(); ++d) where += (d ? ", " : "") + format_double(pt[d]);
            throw NumericError("propagate: non-finite function value at (" + where + ")");
        }
        p.samples.push_back(v);
    }
    double mean = 0.0;
    for (double v : p.samples) mean += v;
    mean /= static_cast<double>(draws);
    double var = 0.0;
    for (double v : p.samples) var += (v - mean) * (v - mean);
    p.mean = mean;
    p.variance = var / static_cast<double>(draws - 1);
    p.histogram = make_histogram(p.samples, bins);
    return p;
}

// ---------------------------------------------------------------- prediction

double PredictiveDistribution::probability(long long datum) const {
    const long long k = datum - first_datum;
    if (k < 0 || k >= static_cast<long long>(mass.size())) return 0.0;
    return mass[static_cast<std::size_t>(k)];
}

PredictiveDistribution posterior_predictive(const LogDensityGrid& grid, const SamplingLogMass& log_mass,
                                            long long datum_lo, long long datum_hi) {
    if (!grid.normalized()) throw UsageError("posterior_predictive: grid must be normalized");
    if (datum_hi < datum_lo) throw UsageError("posterior_predictive: empty data support");
    const auto lw = grid.log_weights();
    std::vector<std::vector<double>> pts(grid.size());
    std::vector<double> base(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        pts[i] = grid.point(i);
        base[i] = grid.value(i) + lw[i];
    }
    PredictiveDistribution pd{datum_lo, {}, 0.0, false, {}};
    std::vector<double> terms(grid.size());
    for (long long d = datum_lo; d <= datum_hi; ++d) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            terms[i] = base[i] == kNegInf ? kNegInf : base[i] + log_mass(d, pts[i]);
        }
        const double m = std::exp(log_sum_exp(terms));
        pd.mass.push_back(m);
        pd.captured += m;
    }
    if (pd.captured < 1.0 - 1e-9) {
        pd.truncated = true;
        pd.warnings.push_back("posterior_predictive: support window captures only " +
                              format_double(pd.captured) + " of the predictive mass");
    }
    return pd;
}

// ---------------------------------------------------------------- model comparison

double EvidenceReport::bayes_factor(std::size_t i, std::size_t j) const {
    return std::exp(log_bayes_factor.at(i).at(j));
}

double model_log_evidence(const ModelSpec& model) {
    if (!model.log_likelihood) throw UsageError("model '" + model.name + "': missing likelihood");
    if (!model.log_prior) return model.log_likelihood(model.fixed_point);
    const auto prior = normalize(*model.log_prior).grid;
    std::vector<double> joint(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) {
        const double lp = prior.value(i);
        joint[i] = lp == kNegInf ? kNegInf : lp + model.log_likelihood(prior.point(i));
    }
    return normalize(LogDensityGrid(prior.axes(), std::move(joint))).log_evidence;
}

EvidenceReport model_evidence_and_bayes_factor(std::span<const ModelSpec> models) {
    if (models.size() < 2) throw UsageError("model comparison needs at least two models");
    EvidenceReport r;
    for (const auto& m : models) {
        r.names.push_back(m.name);
        r.log_evidence.push_back(model_log_evidence(m));
    }
    const auto n = models.size();
    r.log_bayes_factor.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) r.log_bayes_factor[i][j] = r.log_evidence[i] - r.log_evidence[j];
    }
    return r;
}

ModelAverage model_average(std::span<const LogDensityGrid> joint_grids, const std::string& shared_axis,
                           std::span<const double> prior_probabilities) {
    if (joint_grids.empty()) throw UsageError("model_average: no models");
    if (!prior_probabilities.empty() && prior_probabilities.size() != joint_grids.size()) {
        throw UsageError("model_average: one prior probability per model required");
    }
    ModelAverage avg{joint_grids.front(), {}, {}};
    std::vector<LogDensityGrid> marginals;
    const Axis* reference = nullptr;
    std::vector<double> log_w;
    for (std::size_t m = 0; m < joint_grids.size(); ++m) {
        const auto& g = joint_grids[m];
        const auto k = g.axis_index(shared_axis);
        if (reference == nullptr) {
            reference = &g.axis(k);
        } else if (!reference->same_as(g.axis(k))) {
            throw UsageError("model_average: shared axis '" + shared_axis + "' differs between models");
        }
        const auto norm = normalize(g);
        avg.log_evidence.push_back(norm.log_evidence);
        marginals.push_back(marginal_of(norm.grid, shared_axis));
        const double prior = prior_probabilities.empty() ? 1.0 : prior_probabilities[m];
        if (!(prior >= 0.0)) throw UsageError("model_average: prior probabilities must be nonnegative");
        log_w.push_back(std::log(prior) + norm.log_evidence);
    }
    const double log_total = log_sum_exp(log_w);
    for (double lw : log_w) avg.weights.push_back(std::exp(lw - log_total));

    const auto n = marginals.front().size();
    std::vector<double> values(n);
    std::vector<double> terms(marginals.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < marginals.size(); ++m) {
            terms[m] = log_w[m] - log_total + marginals[m].value(i);
        }
        values[i] = log_sum_exp(terms);
    }
    avg.density = LogDensityGrid({*reference}, std::move(values), true);
    return avg;
}

InferenceSummary summarize(const LogDensityGrid& grid, std::span<const double> levels) {
    const auto norm = normalize(grid);
    InferenceSummary s;
    s.log_evidence = norm.log_evidence;
    const auto values = norm.grid.values();
    const auto best = static_cast<std::size_t>(
        std::distance(values.begin(), std::max_element(values.begin(), values.end())));
    s.mode = norm.grid.point(best);

    const auto lw = norm.grid.log_weights();
    s.mean.assign(grid.dimension(), 0.0);
    for (std::size_t i = 0; i < norm.grid.size(); ++i) {
        if (values[i] == kNegInf) continue;
        const double p = std::exp(values[i] + lw[i]);
        const auto pt = norm.grid.point(i);
        for (std::size_t d = 0; d < pt.size(); ++d) s.mean[d] += p * pt[d];
    }
    for (const auto& axis : norm.grid.axes()) {
        const auto marginal = marginal_of(norm.grid, axis.name());
        for (double level : levels) s.hpd.push_back({axis.name(), hpd_region(marginal, level)});
    }
    return s;
}

// ---------------------------------------------------------------- serialization

void write_csv(const LogDensityGrid& grid, std::ostream& out) {
    for (const auto& a : grid.axes()) out << a.name() << ',';
    out << "log_density\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (double c : grid.point(i)) out << format_double(c) << ',';
        out << format_double(grid.value(i)) << '\n';
    }
}

nlohmann::json to_json(const LogDensityGrid& grid) {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : grid.axes()) {
        axes.push_back({{"name", a.name()},
                        {"lo", a.lo()},
                        {"hi", a.hi()},
                        {"n", a.size()},
                        {"transform", a.transform() == AxisTransform::log ? "log" : "linear"}});
    }
    nlohmann::json values = nlohmann::json::array();
    for (double v : grid.values()) {
        if (v == kNegInf) {
            values.push_back(nullptr);
        } else {
            values.push_back(v);
        }
    }
    return {{"axes", axes}, {"normalized", grid.normalized()}, {"values", values}};
}

LogDensityGrid grid_from_json(const nlohmann::json& j) {
    try {
        std::vector<Axis> axes;
        for (const auto& a : j.at("axes")) {
            const auto t = a.at("transform").get<std::string>();
            if (t != "log" && t != "linear") throw UsageError("grid JSON: unknown transform '" + t + "'");
            axes.emplace_back(a.at("name").get<std::string>(), a.at("lo").get<double>(), a.at("hi").get<double>(),
                              a.at("n").get<std::size_t>(),
                              t == "log" ? AxisTransform::log : AxisTransform::linear);
        }
        std::vector<double> values;
        for (const auto& v : j.at("values")) values.push_back(v.is_null() ? kNegInf : v.get<double>());
        return LogDensityGrid(std::move(axes), std::move(values), j.value("normalized", false));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("grid JSON: ") + e.what());
    }
}

}  // namespace margin
