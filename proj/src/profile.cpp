#include "margin/profile.hpp"

#include <cmath>

#include "margin/error.hpp"
#include "margin/format.hpp"

namespace margin {

namespace {

constexpr double kCoverageTail = 1e-9;

void check_model(const TwoParamModel& model) {
    if (!model.log_likelihood) throw UsageError("TwoParamModel: missing likelihood");
    if (!(model.b_range.lo < model.b_range.hi)) throw UsageError("TwoParamModel: empty nuisance range");
}

double b_hat_at(const TwoParamModel& model, double s) {
    const double tol = model.b_range.width() * 1e-8;
    auto slice = [&](double b) { return model.log_likelihood(s, b); };
    try {
        return maximize_1d(slice, model.b_range.lo, model.b_range.hi, tol).argmax;
    } catch (const NumericError&) {
        const Axis probe("b", model.b_range.lo, model.b_range.hi, 257);
        bool all_neg_inf = true;
        for (double b : probe.nodes()) {
            if (slice(b) != kNegInf) {
                all_neg_inf = false;
                break;
            }
        }
        if (all_neg_inf) {
            throw NumericError("conditional_mle_path: path gap, likelihood slice is zero everywhere at " +
                               model.s_label + "=" + format_double(s));
        }
        throw;
    }
}

double second_difference(const TwoParamModel& model, double s, double b) {
    const double h = model.b_range.width() * 1e-4;
    const double f0 = model.log_likelihood(s, b);
    const double fp = model.log_likelihood(s, b + h);
    const double fm = model.log_likelihood(s, b - h);
    return (fp - 2.0 * f0 + fm) / (h * h);
}

LaplaceTerm laplace_at(const TwoParamModel& model, double s, double b_hat) {
    const double d2 = second_difference(model, s, b_hat);
    if (!(d2 < 0.0) || !std::isfinite(d2)) {
        throw NumericError("laplace_marginal_approx: non-negative curvature " + format_double(d2) + " at " +
                           model.s_label + "=" + format_double(s));
    }
    const double delta_b = std::sqrt(2.0 * kPi / -d2);
    return {model.log_prior(b_hat) + model.log_likelihood(s, b_hat) + std::log(delta_b), delta_b};
}

double marginal_at(const TwoParamModel& model, double s, const Axis& b_axis, const std::vector<double>& b_nodes,
                   const std::vector<double>& log_w, std::vector<std::string>* warnings) {
    std::vector<double> terms(b_nodes.size());
    for (std::size_t j = 0; j < b_nodes.size(); ++j) {
        terms[j] = model.log_prior(b_nodes[j]) + model.log_likelihood(s, b_nodes[j]) + log_w[j];
    }
    const double total = log_sum_exp(terms);
    if (warnings != nullptr && total != kNegInf) {
        const std::size_t edge = std::max<std::size_t>(1, b_nodes.size() / 100);
        std::vector<double> tail;
        for (std::size_t j = 0; j < edge; ++j) {
            tail.push_back(terms[j]);
            tail.push_back(terms[terms.size() - 1 - j]);
        }
        const double tail_frac = std::exp(log_sum_exp(tail) - total);
        if (tail_frac > kCoverageTail) {
            warnings->push_back("marginal_likelihood: " + model.b_label + " window edges hold " +
                                format_double(tail_frac) + " of the slice mass at " + model.s_label + "=" +
                                format_double(s) + " (range " + b_axis.name() + " may truncate the integrand)");
        }
    }
    return total;
}

}  // namespace

double TwoParamModel::log_prior(double b) const {
    if (nuisance_log_prior) return nuisance_log_prior(b);
    return -std::log(b_range.width());
}

std::vector<double> conditional_mle_path(const TwoParamModel& model, const Axis& s_axis) {
    check_model(model);
    std::vector<double> path;
    path.reserve(s_axis.size());
    for (double s : s_axis.nodes()) path.push_back(b_hat_at(model, s));
    return path;
}

std::vector<double> profile_likelihood(const TwoParamModel& model, const Axis& s_axis) {
    const auto path = conditional_mle_path(model, s_axis);
    const auto s = s_axis.nodes();
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = model.log_likelihood(s[i], path[i]);
    return out;
}

std::vector<double> marginal_likelihood_fn(const TwoParamModel& model, const Axis& s_axis,
                                           const ProfileOptions& options, std::vector<std::string>* warnings) {
    check_model(model);
    const Axis b_axis(model.b_label, model.b_range.lo, model.b_range.hi, options.b_nodes);
    const auto b = b_axis.nodes();
    auto log_w = b_axis.weights();
    for (auto& w : log_w) w = std::log(w);
    std::vector<double> out;
    out.reserve(s_axis.size());
    for (double s : s_axis.nodes()) out.push_back(marginal_at(model, s, b_axis, b, log_w, warnings));
    return out;
}

std::vector<LaplaceTerm> laplace_marginal_approx(const TwoParamModel& model, const Axis& s_axis) {
    const auto path = conditional_mle_path(model, s_axis);
    const auto s = s_axis.nodes();
    std::vector<LaplaceTerm> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back(laplace_at(model, s[i], path[i]));
    return out;
}

ProfileCurves profile_marginal_curves(const TwoParamModel& model, const Axis& s_axis,
                                      const ProfileOptions& options) {
    ProfileCurves c;
    c.s = s_axis.nodes();
    c.b_hat = conditional_mle_path(model, s_axis);
    c.log_marginal = marginal_likelihood_fn(model, s_axis, options, &c.warnings);
    for (std::size_t i = 0; i < c.s.size(); ++i) {
        c.log_profile.push_back(model.log_likelihood(c.s[i], c.b_hat[i]));
        const auto term = laplace_at(model, c.s[i], c.b_hat[i]);
        c.log_laplace.push_back(term.log_value);
        c.delta_b.push_back(term.delta_b);
    }
    return c;
}

}  // namespace margin
