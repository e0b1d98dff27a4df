#pragma once

// Profile and marginal likelihoods for an (interest s, nuisance b) model,
// plus the Laplace width approximation connecting the two.

#include <functional>
#include <string>
#include <vector>

#include "margin/grid.hpp"

namespace margin {

struct Range {
    double lo;
    double hi;
    double width() const { return hi - lo; }
};

struct TwoParamModel {
    std::function<double(double s, double b)> log_likelihood;
    /// Normalized on b_range. Empty means flat: -ln(b_hi - b_lo).
    std::function<double(double b)> nuisance_log_prior;
    Range s_range;
    Range b_range;
    std::string s_label = "s";
    std::string b_label = "b";

    double log_prior(double b) const;
};

struct ProfileOptions {
    /// Trapezoid nodes across b_range for the marginal integral.
    std::size_t b_nodes = 2001;
};

/// Per-node curves over an s axis. All log-likelihood curves share the
/// model's additive constant so their ratios are meaningful.
struct ProfileCurves {
    std::vector<double> s;
    std::vector<double> b_hat;
    std::vector<double> log_profile;
    std::vector<double> log_marginal;
    std::vector<double> log_laplace;
    std::vector<double> delta_b;
    std::vector<std::string> warnings;
};

/// Conditional maximizer of b at each s node (maximize_1d, tol = width * 1e-8).
/// Throws NumericError("path gap ...") when a slice is -inf everywhere.
std::vector<double> conditional_mle_path(const TwoParamModel& model, const Axis& s_axis);

std::vector<double> profile_likelihood(const TwoParamModel& model, const Axis& s_axis);

/// ln integral db p(b) L(s, b), trapezoid on b_range. Appends a warning when
/// the slice still carries more than 1e-9 of its mass in the outer 1% at
/// either end of the window.
std::vector<double> marginal_likelihood_fn(const TwoParamModel& model, const Axis& s_axis,
                                           const ProfileOptions& options = {},
                                           std::vector<std::string>* warnings = nullptr);

struct LaplaceTerm {
    double log_value;
    double delta_b;
};

/// ln p(b_hat) + ln L_p(s) + ln delta_b with delta_b = sqrt(2 pi) / sqrt(-d2),
/// d2 the central second difference of ln L in b at step width * 1e-4.
/// Throws NumericError naming the node if d2 >= 0.
std::vector<LaplaceTerm> laplace_marginal_approx(const TwoParamModel& model, const Axis& s_axis);

/// All curves at once, sharing the conditional-MLE path.
ProfileCurves profile_marginal_curves(const TwoParamModel& model, const Axis& s_axis,
                                      const ProfileOptions& options = {});

}  // namespace margin
