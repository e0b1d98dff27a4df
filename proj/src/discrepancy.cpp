#include "margin/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "margin/distributions.hpp"
#include "margin/error.hpp"
#include "margin/format.hpp"
#include "margin/numeric.hpp"

namespace margin {

namespace {

constexpr double kTailMass = 1e-12;

double sum_log_sigma(const GaussianRegressionData& data) {
    double s = 0.0;
    for (double v : data.sigma) s += std::log(v);
    return s;
}

// Warns when either end node of a trapezoid sum still carries real mass.
void edge_check(std::span<const double> terms, const std::string& what, std::vector<std::string>& warnings) {
    const double total = log_sum_exp(terms);
    if (total == kNegInf) return;
    const double frac = std::exp(log_add_exp(terms.front(), terms.back()) - total);
    if (frac > kTailMass) {
        warnings.push_back(what + ": integration window ends hold " + format_double(frac) +
                           " of the mass; the range may truncate the integrand");
    }
}

double trapezoid_log(const Axis& axis, const std::function<double(double)>& log_f, std::vector<double>* terms_out) {
    const auto nodes = axis.nodes();
    const auto w = axis.weights();
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = log_f(nodes[i]) + std::log(w[i]);
    const double total = log_sum_exp(terms);
    if (terms_out != nullptr) *terms_out = std::move(terms);
    return total;
}

double rate_at(const RateFn& rate, double t, std::span<const double> psi) {
    const double lambda = rate(t, psi);
    if (std::isnan(lambda)) throw NumericError("rate model returned NaN at t=" + format_double(t));
    if (lambda < 0.0) throw DomainError("rate model is negative (" + format_double(lambda) + ") at t=" + format_double(t));
    return lambda;
}

}  // namespace

// ------------------------------------------------------------ Gaussian regression

void GaussianRegressionData::validate() const {
    if (x.size() != y.size() || x.size() != sigma.size()) throw UsageError("regression data: x, y, sigma lengths differ");
    if (x.empty()) throw UsageError("regression data: no points");
    if (!model) throw UsageError("regression data: missing model");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(sigma[i] > 0.0)) throw DomainError("regression data: sigma[" + std::to_string(i) + "] must be > 0");
        if (!std::isfinite(y[i])) throw DomainError("regression data: y[" + std::to_string(i) + "] is not finite");
    }
}

double chisq(const GaussianRegressionData& data, std::span<const double> psi) {
    data.validate();
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = data.model(data.x[i], psi);
        if (!std::isfinite(f)) throw NumericError("chisq: model is not finite at x=" + format_double(data.x[i]));
        const double r = (data.y[i] - f) / data.sigma[i];
        acc += r * r;
    }
    return acc;
}

double gaussian_loglike(const GaussianRegressionData& data, std::span<const double> psi) {
    return -sum_log_sigma(data) - 0.5 * chisq(data, psi);
}

double gaussian_overdispersed_loglike(const GaussianRegressionData& data, std::span<const double> psi, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("gaussian_overdispersed_loglike: need alpha > 0");
    const double c2 = chisq(data, psi);
    return -static_cast<double>(data.size()) * std::log(alpha) - sum_log_sigma(data) - 0.5 * c2 / (alpha * alpha);
}

double log_uniform_alpha_closed_form(double chi2, std::size_t n, double sum_log_sigma, const LogUniformAlpha& prior) {
    if (!(chi2 > 0.0)) throw DomainError("alpha marginal: need chi^2 > 0");
    const double h = 0.5 * static_cast<double>(n);
    return log_gamma(h) - std::log(2.0) + h * std::log(2.0) - h * std::log(chi2) - sum_log_sigma -
           std::log(std::log(prior.hi / prior.lo));
}

AlphaMarginal marginalize_alpha(const GaussianRegressionData& data, std::span<const double> psi,
                                const AlphaPrior& prior, std::size_t nodes) {
    if (const auto* point = std::get_if<PointMassAlpha>(&prior)) {
        return {gaussian_overdispersed_loglike(data, psi, point->value), std::nullopt, {}};
    }
    const double c2 = chisq(data, psi);
    if (!(c2 > 0.0)) throw DomainError("marginalize_alpha: need chi^2(psi) > 0");
    const auto n = static_cast<double>(data.size());
    const double sls = sum_log_sigma(data);
    auto log_like = [&](double a) { return -n * std::log(a) - sls - 0.5 * c2 / (a * a); };

    AlphaMarginal out{0.0, std::nullopt, {}};
    std::vector<double> terms;
    if (const auto* lu = std::get_if<LogUniformAlpha>(&prior)) {
        if (!(lu->lo > 0.0 && lu->lo < lu->hi)) throw DomainError("log-uniform alpha prior: need 0 < lo < hi");
        const double norm = std::log(std::log(lu->hi / lu->lo));
        const Axis axis("alpha", lu->lo, lu->hi, nodes, AxisTransform::log);
        out.log_quadrature =
            trapezoid_log(axis, [&](double a) { return log_like(a) - std::log(a) - norm; }, &terms);
        out.log_closed_form = log_uniform_alpha_closed_form(c2, data.size(), sls, *lu);
    } else {
        const auto& ig = std::get<InverseGammaAlpha>(prior);
        if (!(ig.lo > 0.0 && ig.lo < ig.hi)) throw DomainError("inverse-gamma alpha prior: need 0 < lo < hi");
        const Axis axis("alpha", ig.lo, ig.hi, nodes, AxisTransform::log);
        out.log_quadrature = trapezoid_log(
            axis, [&](double a) { return log_like(a) + inverse_gamma_log_pdf(a, ig.shape, ig.scale); }, &terms);
    }
    edge_check(terms, "marginalize_alpha", out.warnings);
    return out;
}

DiscrepancyEquivalence gaussian_discrepancy_equivalence(double beta) {
    if (!(beta >= 0.0)) throw DomainError("gaussian_discrepancy_equivalence: need beta >= 0");
    const double stated = 1.0 + beta;
    const double additive = std::sqrt(1.0 + beta * beta);
    return {beta, stated, additive, std::fabs(stated - additive) > 1e-12 * stated};
}

double gaussian_discrepancy_quadrature(const GaussianRegressionData& data, std::span<const double> psi, double beta,
                                       std::size_t nodes) {
    data.validate();
    if (!(beta > 0.0)) throw DomainError("gaussian_discrepancy_quadrature: need beta > 0");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = data.model(data.x[i], psi);
        const double s = data.sigma[i];
        const double tau = beta * s;
        // the delta integrand is a Gaussian centred between 0 and the residual
        const double r = data.y[i] - f;
        const double var_post = 1.0 / (1.0 / (s * s) + 1.0 / (tau * tau));
        const double centre = var_post * r / (s * s);
        const double half = 40.0 * std::sqrt(var_post);
        const Axis axis("delta", centre - half, centre + half, nodes);
        total += trapezoid_log(
            axis,
            [&](double d) {
                const double z = (r - d) / s;
                return -std::log(s) - 0.5 * z * z + normal_log_pdf(d, 0.0, tau);
            },
            nullptr);
    }
    return total;
}

// ------------------------------------------------------------ Poisson counts

void CountSeries::validate() const {
    if (counts.empty()) throw UsageError("count series: no bins");
    if (t.size() != counts.size()) throw UsageError("count series: times and counts differ in length");
    if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("count series: bin width must be > 0");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw DomainError("count series: negative count in bin " + std::to_string(i));
        if (i > 0 && std::fabs(t[i] - t[i - 1] - width) > 1e-6 * width) {
            throw UsageError("count series: bin " + std::to_string(i) + " breaks the spacing " + format_double(width));
        }
    }
}

CountSeries read_count_series(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw UsageError("count file: empty input");
    {
        std::stringstream header(trim(line));
        std::string a, b;
        std::getline(header, a, ',');
        std::getline(header, b);
        if (trim(a) != "t" || trim(b) != "count") {
            throw UsageError("count file line " + std::to_string(line_no) + ": expected header 't,count'");
        }
    }
    CountSeries s{{}, {}, 0.0};
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw UsageError("count file line " + std::to_string(line_no) + ": expected two fields");
        }
        const std::string ft = trim(row.substr(0, comma));
        const std::string fc = trim(row.substr(comma + 1));
        double t = 0.0;
        long long c = 0;
        std::size_t used = 0;
        try {
            t = std::stod(ft, &used);
            if (used != ft.size() || !std::isfinite(t)) throw std::invalid_argument(ft);
            c = std::stoll(fc, &used);
            if (used != fc.size()) throw std::invalid_argument(fc);
        } catch (const std::logic_error&) {
            throw UsageError("count file line " + std::to_string(line_no) + ": cannot parse '" + row + "'");
        }
        if (c < 0) throw UsageError("count file line " + std::to_string(line_no) + ": negative count");
        if (!s.t.empty()) {
            const double step = t - s.t.back();
            if (s.t.size() == 1) s.width = step;
            if (!(step > 0.0) || std::fabs(step - s.width) > 1e-6 * std::fabs(s.width)) {
                throw UsageError("count file line " + std::to_string(line_no) + ": times must increase by a constant step");
            }
        }
        s.t.push_back(t);
        s.counts.push_back(c);
    }
    if (s.counts.empty()) throw UsageError("count file: no data rows");
    if (s.counts.size() < 2) throw UsageError("count file: need at least two rows to infer the bin width");
    s.validate();
    return s;
}

void write_count_series(const CountSeries& series, std::ostream& out) {
    out << "t,count\n";
    for (std::size_t i = 0; i < series.size(); ++i) out << format_double(series.t[i]) << ',' << series.counts[i] << '\n';
}

RateFn constant_rate() {
    return [](double, std::span<const double> psi) { return psi[0]; };
}

RateFn gaussian_pulse_rate(double centre, double width) {
    if (!(width > 0.0)) throw DomainError("gaussian_pulse_rate: need width > 0");
    return [centre, width](double t, std::span<const double> psi) {
        const double z = (t - centre) / width;
        return psi[0] + psi[1] * std::exp(-0.5 * z * z);
    };
}

double poisson_binned_loglike(const CountSeries& series, const RateFn& rate, std::span<const double> psi) {
    series.validate();
    double acc = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        acc += poisson_log_pmf(series.counts[i], rate_at(rate, series.t[i], psi) * series.width);
    }
    return acc;
}

double nb_marginal_loglike(const CountSeries& series, const RateFn& rate, std::span<const double> psi, double beta) {
    series.validate();
    if (!(beta > 0.0)) throw DomainError("nb_marginal_loglike: need beta > 0");
    const double theta = beta / (1.0 + beta);
    double acc = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double mean = rate_at(rate, series.t[i], psi) * series.width;
        if (!(mean > 0.0)) throw DomainError("nb_marginal_loglike: rate must be > 0 at t=" + format_double(series.t[i]));
        acc += neg_binomial_log_pmf(series.counts[i], NegBinomialParams(beta * mean, theta));
    }
    return acc;
}

CountSeries simulate_counts(const RateFn& rate, std::span<const double> psi, std::span<const double> t, double width,
                            std::optional<double> beta, RngStream& rng) {
    if (beta && !(*beta > 0.0)) throw DomainError("simulate_counts: need beta > 0");
    CountSeries s{std::vector<double>(t.begin(), t.end()), {}, width};
    for (double ti : t) {
        double mean = rate_at(rate, ti, psi) * width;
        if (beta && mean > 0.0) mean *= sample(rng, GammaDist{*beta * mean, *beta * mean});
        s.counts.push_back(sample(rng, PoissonDist{mean}));
    }
    s.validate();
    return s;
}

NbOracleResult nb_vs_quadrature_oracle(double lambda_delta, double beta, long long n, std::size_t nodes) {
    if (!(lambda_delta > 0.0) || !(beta > 0.0)) throw DomainError("nb oracle: need lambda*Delta > 0 and beta > 0");
    if (n < 0) throw DomainError("nb oracle: negative count");
    const double a = beta * lambda_delta;
    const double analytic = neg_binomial_log_pmf(n, NegBinomialParams(a, beta / (1.0 + beta)));

    // In u = ln alpha the integrand is exp(k u - r e^u) up to constants; the
    // window extends until it has dropped by e^-45 on both sides of the mode.
    const double k = a + static_cast<double>(n);
    const double r = a + lambda_delta;
    const double mode = std::log(k / r);
    auto drop = [k](double t) { return k * (t - std::expm1(t)); };
    double left = 1.0;
    while (drop(-left) > -45.0) left *= 1.25;
    double right = 1.0;
    while (drop(right) > -45.0) right *= 1.25;

    NbOracleResult out{analytic, 0.0, std::exp(mode - left), std::exp(mode + right), {}};
    const Axis axis("alpha", out.alpha_lo, out.alpha_hi, nodes, AxisTransform::log);
    std::vector<double> terms;
    out.quadrature = trapezoid_log(
        axis,
        [&](double alpha) { return gamma_log_pdf(alpha, a, a) + poisson_log_pmf(n, alpha * lambda_delta); },
        &terms);
    edge_check(terms, "nb_vs_quadrature_oracle", out.warnings);
    return out;
}

SalientFit fit_salient(const CountSeries& series, const RateFn& rate, const std::vector<Axis>& psi_axes,
                       const Axis& beta_axis, std::span<const double> levels) {
    series.validate();
    if (psi_axes.empty() || psi_axes.size() > 2) throw UsageError("fit_salient: need one or two psi axes");
    if (beta_axis.transform() != AxisTransform::log) throw UsageError("fit_salient: beta axis must be log-transformed");
    double log_psi_prior = 0.0;
    for (const auto& ax : psi_axes) log_psi_prior -= std::log(ax.hi() - ax.lo());
    const double log_beta_norm = std::log(std::log(beta_axis.hi() / beta_axis.lo()));

    std::vector<Axis> axes = psi_axes;
    axes.push_back(beta_axis);
    const std::size_t d = psi_axes.size();
    const auto joint = LogDensityGrid::fill(axes, [&](std::span<const double> p) {
        const double beta = p[d];
        const auto psi = p.first(d);
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (!(rate_at(rate, series.t[i], psi) > 0.0)) return kNegInf;
        }
        return nb_marginal_loglike(series, rate, psi, beta) + log_psi_prior - std::log(beta) - log_beta_norm;
    });
    auto norm = normalize(joint);
    std::vector<LogDensityGrid> marginals;
    for (const auto& ax : axes) marginals.push_back(marginal_of(norm.grid, ax.name()));
    const std::vector<double> default_levels{0.68, 0.90, 0.95};
    const auto lv = levels.empty() ? std::span<const double>(default_levels) : levels;
    auto log_beta = in_log_coordinate(marginals.back());
    std::vector<HpdRegion> log_beta_hpd;
    for (double level : lv) log_beta_hpd.push_back(hpd_region(log_beta, level));
    return {norm.grid, norm.log_evidence, std::move(marginals), summarize(joint, lv), std::move(log_beta),
            std::move(log_beta_hpd)};
}

CountSeries rebin(const CountSeries& series, std::size_t factor) {
    series.validate();
    if (factor < 1) throw UsageError("rebin: factor must be >= 1");
    if (series.size() % factor != 0) {
        throw UsageError("rebin: " + std::to_string(series.size()) + " bins are not divisible by " + std::to_string(factor));
    }
    CountSeries out{{}, {}, series.width * static_cast<double>(factor)};
    for (std::size_t g = 0; g < series.size(); g += factor) {
        long long c = 0;
        double t = 0.0;
        for (std::size_t j = 0; j < factor; ++j) {
            c += series.counts[g + j];
            t += series.t[g + j];
        }
        out.counts.push_back(c);
        out.t.push_back(t / static_cast<double>(factor));
    }
    return out;
}

namespace {

std::vector<double> nb_masses(const NegBinomialParams& p, long long n_max) {
    std::vector<double> m(static_cast<std::size_t>(n_max + 1));
    for (long long n = 0; n <= n_max; ++n) m[static_cast<std::size_t>(n)] = std::exp(neg_binomial_log_pmf(n, p));
    return m;
}

// Exact on 0..n_max because every index pair summing to n lies inside the window.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size(), 0.0);
    for (std::size_t n = 0; n < c.size(); ++n) {
        for (std::size_t j = 0; j <= n; ++j) c[n] += a[j] * b[n - j];
    }
    return c;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

}  // namespace

NbConvolution nb_convolution_check(std::span<const double> bin_means, double beta) {
    if (bin_means.empty()) throw UsageError("nb_convolution_check: no bins");
    if (!(beta > 0.0)) throw DomainError("nb_convolution_check: need beta > 0");
    double total = 0.0;
    for (double m : bin_means) {
        if (!(m > 0.0)) throw DomainError("nb_convolution_check: bin means must be > 0");
        total += m;
    }
    const double theta = beta / (1.0 + beta);
    const double sd = std::sqrt(total * (1.0 + 1.0 / beta));
    const auto n_max = static_cast<long long>(std::ceil(total + 20.0 * sd));

    std::vector<double> conv, control;
    for (double m : bin_means) {
        const auto fine = nb_masses(NegBinomialParams(beta * m, theta), n_max);
        const auto fixed = nb_masses(NegBinomialParams::from_mean_shape(m, beta), n_max);
        conv = conv.empty() ? fine : convolve(conv, fine);
        control = control.empty() ? fixed : convolve(control, fixed);
    }
    const auto direct = nb_masses(NegBinomialParams(beta * total, theta), n_max);
    const auto control_direct = nb_masses(NegBinomialParams::from_mean_shape(total, beta), n_max);
    return {n_max, max_abs_diff(conv, direct), max_abs_diff(control, control_direct)};
}

NbAggregationReport aggregation_consistency_nb(const CountSeries& series, const RateFn& rate,
                                               std::span<const double> psi, double beta, std::size_t factor) {
    NbAggregationReport rep{rebin(series, factor), factor, 0.0, 0.0, 0.0};
    for (std::size_t g = 0; g < series.size(); g += factor) {
        std::vector<double> means;
        for (std::size_t j = 0; j < factor; ++j) means.push_back(rate_at(rate, series.t[g + j], psi) * series.width);
        const auto check = nb_convolution_check(means, beta);
        rep.max_abs_diff = std::max(rep.max_abs_diff, check.max_abs_diff);
        rep.control_max_abs_diff = std::max(rep.control_max_abs_diff, check.control_max_abs_diff);
    }
    rep.merged_loglike = nb_marginal_loglike(rep.merged, rate, psi, beta);
    return rep;
}

}  // namespace margin
