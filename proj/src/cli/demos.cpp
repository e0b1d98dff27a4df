#include "demos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "artifacts.hpp"
#include "margin/discrepancy.hpp"
#include "margin/distributions.hpp"
#include "margin/error.hpp"
#include "margin/grid.hpp"
#include "margin/problems.hpp"
#include "margin/profile.hpp"
#include "margin/rng.hpp"
#include "svg.hpp"

namespace margin::cli {

namespace {

using nlohmann::json;

struct Context {
    Params& params;
    ArtifactSet& out;
    RngStream& rng;
    json& stats;
};

std::vector<double> exp_shifted(const std::vector<double>& log_values) {
    const double top = *std::max_element(log_values.begin(), log_values.end());
    std::vector<double> out;
    for (double v : log_values) out.push_back(std::exp(v - top));
    return out;
}

std::vector<double> grid_values(const LogDensityGrid& g) { return {g.values().begin(), g.values().end()}; }

std::vector<double> exp_values(const LogDensityGrid& g) {
    std::vector<double> out;
    for (double v : g.values()) out.push_back(std::exp(v));
    return out;
}

json hpd_json(const HpdRegion& r) {
    json iv = json::array();
    for (const auto& i : r.intervals) iv.push_back({i.lo, i.hi});
    return {{"level", r.level}, {"mass", r.mass}, {"intervals", iv}, {"total_length", r.total_length()}};
}

std::vector<double> iota_values(long long lo, long long hi) {
    std::vector<double> v;
    for (long long k = lo; k <= hi; ++k) v.push_back(static_cast<double>(k));
    return v;
}

// ------------------------------------------------------------ binomial

void demo_binomial(Context& c) {
    const long long trials = c.params.integer("trials", 20);
    const double theta = c.params.real("theta", 0.5);
    const auto observed = c.params.optional_integer("observed");
    const std::size_t nodes = c.params.grid_1d(2001);
    c.params.finish();

    const auto d = binomial_demo(trials, theta, observed, c.rng, nodes);
    const auto& obs_curve = d.log_likelihood[static_cast<std::size_t>(d.observed)];
    const auto post = normalize(LogDensityGrid({d.theta_axis}, obs_curve));
    const auto theta_nodes = d.theta_axis.nodes();

    c.out.table("pmf", "sampling distribution P(n | theta)", {{"n", iota_values(0, trials)}, {"pmf", d.pmf}});
    c.out.table("likelihood", "likelihood of the observed count",
                {{"theta", theta_nodes},
                 {"log_likelihood", obs_curve},
                 {"likelihood", exp_shifted(obs_curve)},
                 {"posterior_density", exp_values(post.grid)}});
    if (trials <= 60) {
        std::vector<Column> family{{"theta", theta_nodes}};
        for (long long n = 0; n <= trials; ++n) {
            std::vector<double> l;
            for (double v : d.log_likelihood[static_cast<std::size_t>(n)]) l.push_back(std::exp(v));
            family.push_back({"n" + std::to_string(n), l});
        }
        c.out.table("likelihood_family", "likelihood curves for every possible count", family);
    }
    c.out.svg("likelihood", "likelihood plot",
              line_plot("Binomial likelihood, n = " + std::to_string(d.observed), "theta", "L / L_max",
                        {{"likelihood", theta_nodes, exp_shifted(obs_curve)}}));

    const PointFn log_like = [n = d.observed, trials](std::span<const double> p) {
        return binomial_log_pmf(n, trials, p[0]);
    };
    const std::vector<ModelSpec> models{
        {"fixed_theta", std::nullopt, {theta}, log_like},
        {"free_theta", LogDensityGrid({d.theta_axis}, std::vector<double>(nodes, 0.0)), {}, log_like}};
    const auto ev = model_evidence_and_bayes_factor(models);
    const auto pred = posterior_predictive(
        post.grid, [](long long k, std::span<const double> p) { return binomial_log_pmf(k, 1, p[0]); }, 0, 1);
    const std::vector<double> levels{0.68, 0.9, 0.95};
    json hpd = json::array();
    for (double lv : levels) hpd.push_back(hpd_json(hpd_region(post.grid, lv)));

    c.stats["observed"] = d.observed;
    c.stats["peak_theta"] = d.peak_theta;
    c.stats["log_evidence_free"] = ev.log_evidence[1];
    c.stats["evidence_free"] = std::exp(ev.log_evidence[1]);
    c.stats["evidence_fixed"] = std::exp(ev.log_evidence[0]);
    c.stats["bayes_factor_fixed_vs_free"] = ev.bayes_factor(0, 1);
    c.stats["predictive_success_probability"] = pred.probability(1);
    c.stats["hpd"] = hpd;
    json per_n = json::array();
    for (double e : d.log_evidence) per_n.push_back(std::exp(e));
    c.stats["evidence_per_count"] = per_n;
}

// ------------------------------------------------------------ common mean

void demo_common_mean(Context& c) {
    const double sigma = c.params.real("sigma", 1.0);
    const double x1 = c.params.real("x1", 0.0);
    const double x2 = c.params.real("x2", 2.0);
    const std::size_t n1 = c.params.grid_1d(2001);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();
    if (!(sigma > 0.0)) throw DomainError("common-mean: sigma must be > 0");

    const double centre = 0.5 * (x1 + x2);
    const double half = 5.0 * sigma + 0.5 * std::fabs(x1 - x2);
    const auto d = common_mean_demo(Axis("mu", centre - half, centre + half, n1), sigma, x1, x2, n2);
    const auto mu = d.mu_axis.nodes();
    c.out.table("likelihood", "likelihood of the common mean",
                {{"mu", mu}, {"log_likelihood", d.log_likelihood}, {"likelihood", exp_shifted(d.log_likelihood)}});
    c.out.grid("sampling_slice", "ln p(x1, x2 | mu = peak)", d.sampling_slice);
    c.out.svg("likelihood", "likelihood plot",
              line_plot("Common-mean likelihood", "mu", "L / L_max", {{"likelihood", mu, exp_shifted(d.log_likelihood)}}));
    c.stats["peak"] = d.peak;
    c.stats["expected_peak"] = centre;
    c.stats["posterior_sd"] = d.posterior_sd;
    c.stats["expected_posterior_sd"] = sigma / std::sqrt(2.0);
}

// ------------------------------------------------------------ two-parameter models

// Relative spread of exp(log_a - log_b) / weight about its mean.
double relative_spread(const std::vector<double>& log_a, const std::vector<double>& log_b,
                       const std::vector<double>& weight) {
    std::vector<double> r;
    for (std::size_t i = 0; i < log_a.size(); ++i) r.push_back(std::exp(log_a[i] - log_b[i]) / weight[i]);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double dev = 0.0;
    for (double v : r) dev = std::max(dev, std::fabs(v - mean) / mean);
    return dev;
}

// Largest relative gap between two curves each normalized by the trapezoid rule on axis.
double normalized_sup_rel_error(const Axis& axis, const std::vector<double>& log_approx,
                                const std::vector<double>& log_exact) {
    const auto a = normalize(LogDensityGrid({axis}, log_approx)).grid;
    const auto e = normalize(LogDensityGrid({axis}, log_exact)).grid;
    double worst = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i) worst = std::max(worst, std::fabs(std::expm1(a.value(i) - e.value(i))));
    return worst;
}

void emit_profile_outputs(Context& c, const TwoParamModel& model, const Axis& s_axis, const ProfileCurves& curves,
                          std::size_t joint_nodes, const std::string& title, std::vector<Column> extra = {}) {
    std::vector<double> log_ratio;
    for (std::size_t i = 0; i < curves.s.size(); ++i) log_ratio.push_back(curves.log_marginal[i] - curves.log_profile[i]);
    std::vector<Column> cols{{model.s_label, curves.s},
                             {model.b_label + "_hat", curves.b_hat},
                             {"log_profile", curves.log_profile},
                             {"log_marginal", curves.log_marginal},
                             {"log_laplace", curves.log_laplace},
                             {"delta_b", curves.delta_b},
                             {"log_marginal_over_profile", log_ratio}};
    for (auto& e : extra) cols.push_back(std::move(e));
    c.out.table("curves", "profile, marginal and Laplace curves", cols);
    const auto joint = LogDensityGrid::fill(
        {Axis(model.s_label, s_axis.lo(), s_axis.hi(), joint_nodes),
         Axis(model.b_label, model.b_range.lo, model.b_range.hi, joint_nodes)},
        [&](std::span<const double> p) { return model.log_likelihood(p[0], p[1]); });
    c.out.grid("joint", "joint log-likelihood surface", joint);
    c.out.svg("curves", "profile vs marginal plot",
              line_plot(title, model.s_label, "relative likelihood",
                        {{"profile", curves.s, exp_shifted(curves.log_profile)},
                         {"marginal", curves.s, exp_shifted(curves.log_marginal)},
                         {"laplace", curves.s, exp_shifted(curves.log_laplace)}}));
    c.stats["warnings"] = curves.warnings;
}

void demo_on_off(Context& c) {
    OnOffParams p;
    p.d_on = c.params.real("d_on", p.d_on);
    p.d_off = c.params.real("d_off", p.d_off);
    p.sigma_on = c.params.real("sigma_on", p.sigma_on);
    p.sigma_off = c.params.real("sigma_off", p.sigma_off);
    p.s_range = {c.params.real("s_lo", p.s_range.lo), c.params.real("s_hi", p.s_range.hi)};
    p.b_range = {c.params.real("b_lo", p.b_range.lo), c.params.real("b_hi", p.b_range.hi)};
    const auto b_nodes = static_cast<std::size_t>(c.params.integer("b_nodes", 2001));
    const std::size_t n1 = c.params.grid_1d(2001);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();

    const auto model = on_off_gaussian_model(p);
    const Axis s_axis("s", p.s_range.lo, p.s_range.hi, n1);
    const auto curves = profile_marginal_curves(model, s_axis, {b_nodes});
    emit_profile_outputs(c, model, s_axis, curves, n2, "On/off problem");
    const std::vector<double> ones(curves.s.size(), 1.0);
    c.stats["ratio_max_relative_deviation"] = relative_spread(curves.log_marginal, curves.log_profile, ones);
    c.stats["b_hat_slope"] = (curves.b_hat.back() - curves.b_hat.front()) / (curves.s.back() - curves.s.front());
    c.stats["expected_b_hat_slope"] =
        -p.sigma_off * p.sigma_off / (p.sigma_on * p.sigma_on + p.sigma_off * p.sigma_off);
    c.stats["global_mle"] = {p.d_on - p.d_off, p.d_off};
}

void demo_flare(Context& c) {
    FlareParams p;
    p.s0 = c.params.real("s0", p.s0);
    p.sigma_s = c.params.real("sigma_s", p.sigma_s);
    p.w0 = c.params.real("w0", p.w0);
    p.gamma = c.params.real("gamma", p.gamma);
    p.b0 = c.params.real("b0", p.b0);
    p.s_range = {c.params.real("s_lo", p.s_range.lo), c.params.real("s_hi", p.s_range.hi)};
    p.b_range = {c.params.real("b_lo", p.b_range.lo), c.params.real("b_hi", p.b_range.hi)};
    const auto b_nodes = static_cast<std::size_t>(c.params.integer("b_nodes", 2001));
    const std::size_t n1 = c.params.grid_1d(2001);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();

    const auto model = flare_model(p);
    const Axis s_axis("s", p.s_range.lo, p.s_range.hi, n1);
    const auto curves = profile_marginal_curves(model, s_axis, {b_nodes});
    std::vector<double> w;
    for (double s : curves.s) w.push_back(p.width(s));
    emit_profile_outputs(c, model, s_axis, curves, n2, "Flare geometry", {{"w", w}});
    c.stats["ratio_over_width_max_relative_deviation"] = relative_spread(curves.log_marginal, curves.log_profile, w);
    c.stats["laplace_sup_relative_error"] = normalized_sup_rel_error(s_axis, curves.log_laplace, curves.log_marginal);
    std::vector<double> log_gauss;
    for (double s : curves.s) log_gauss.push_back(normal_log_pdf(s, p.s0, p.sigma_s));
    c.stats["marginal_vs_gaussian_sup_relative_error"] = normalized_sup_rel_error(s_axis, curves.log_marginal, log_gauss);
}

void demo_banana(Context& c) {
    BananaParams p;
    p.s0 = c.params.real("s0", p.s0);
    p.sigma_s = c.params.real("sigma_s", p.sigma_s);
    p.kappa = c.params.real("kappa", p.kappa);
    p.sigma_b = c.params.real("sigma_b", p.sigma_b);
    p.s_range = {c.params.real("s_lo", p.s_range.lo), c.params.real("s_hi", p.s_range.hi)};
    p.b_range = {c.params.real("b_lo", p.b_range.lo), c.params.real("b_hi", p.b_range.hi)};
    const auto b_nodes = static_cast<std::size_t>(c.params.integer("b_nodes", 4001));
    const std::size_t n1 = c.params.grid_1d(2001);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();

    const auto model = banana_model(p);
    const Axis s_axis("s", p.s_range.lo, p.s_range.hi, n1);
    const auto curves = profile_marginal_curves(model, s_axis, {b_nodes});
    std::vector<double> stretch;
    for (double s : curves.s) stretch.push_back(std::sqrt(1.0 + p.tilt(s) * p.tilt(s)));
    emit_profile_outputs(c, model, s_axis, curves, n2, "Banana geometry", {{"slice_stretch", stretch}});
    c.stats["ratio_over_stretch_max_relative_deviation"] =
        relative_spread(curves.log_marginal, curves.log_profile, stretch);
    c.stats["laplace_sup_relative_error"] = normalized_sup_rel_error(s_axis, curves.log_laplace, curves.log_marginal);
}

// ------------------------------------------------------------ Neyman-Scott

void demo_neyman_scott(Context& c) {
    const auto pairs = c.params.integer("pairs", 50);
    const double sigma = c.params.real("sigma", 1.0);
    const double mu_lo = c.params.real("mu_lo", -10.0);
    const double mu_hi = c.params.real("mu_hi", 10.0);
    const double s_lo = c.params.real("sigma_lo", 0.1 * sigma);
    const double s_hi = c.params.real("sigma_hi", 3.0 * sigma);
    const std::size_t n1 = c.params.grid_1d(2001);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();
    if (pairs < 1) throw DomainError("neyman-scott: pairs must be >= 1");
    if (!(mu_lo < mu_hi)) throw DomainError("neyman-scott: need mu_lo < mu_hi");

    const auto data = simulate_pairs(static_cast<std::size_t>(pairs), sigma, {mu_lo, mu_hi}, c.rng);
    const auto d = neyman_scott_demo(data, Axis("sigma", s_lo, s_hi, n1), n2);
    std::vector<double> xs, ys;
    for (const auto& [x, y] : data.pairs) {
        xs.push_back(x);
        ys.push_back(y);
    }
    c.out.table("pairs", "simulated paired measurements", {{"x", xs}, {"y", ys}, {"mu_true", data.true_means}});
    const auto s = d.sigma_axis.nodes();
    c.out.table("curves", "pooled profile and marginal likelihoods for sigma",
                {{"sigma", s}, {"log_profile", d.log_profile}, {"log_marginal", d.log_marginal}});
    c.out.grid("first_pair_joint", "joint likelihood of the first pair", d.first_pair_joint);
    c.out.svg("curves", "profile vs marginal plot",
              line_plot("Neyman-Scott, " + std::to_string(pairs) + " pairs", "sigma", "relative likelihood",
                        {{"profile", s, exp_shifted(d.log_profile)}, {"marginal", s, exp_shifted(d.log_marginal)}}));

    auto grid_argmax = [&](const std::vector<double>& v) {
        return s[static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())))];
    };
    c.stats["sigma_hat_profile"] = d.sigma_hat_profile;
    c.stats["sigma_hat_marginal"] = d.sigma_hat_marginal;
    c.stats["grid_peak_profile"] = grid_argmax(d.log_profile);
    c.stats["grid_peak_marginal"] = grid_argmax(d.log_marginal);
    c.stats["variance_ratio"] = d.degenerate ? 0.0 : std::pow(d.sigma_hat_profile / d.sigma_hat_marginal, 2);
    c.stats["degenerate"] = d.degenerate;
    c.stats["profile_limit"] = sigma / std::sqrt(2.0);
}

// ------------------------------------------------------------ photometry

void demo_photometry(Context& c) {
    PhotometryParams p;
    p.width = static_cast<int>(c.params.integer("width", p.width));
    p.height = static_cast<int>(c.params.integer("height", p.height));
    p.psf_sigma = c.params.real("psf_sigma", p.psf_sigma);
    p.background = c.params.real("background", p.background);
    p.snr = c.params.real("snr", p.snr);
    p.offset_x = c.params.real("offset_x", p.offset_x);
    p.offset_y = c.params.real("offset_y", p.offset_y);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();

    const auto stamp = simulate_stamp(p, c.rng);
    const auto d = photometry_demo(stamp, n2);
    std::vector<double> col, row, cnt;
    for (int r = 0; r < stamp.height; ++r) {
        for (int k = 0; k < stamp.width; ++k) {
            col.push_back(k);
            row.push_back(r);
            cnt.push_back(static_cast<double>(stamp.at(k, r)));
        }
    }
    c.out.table("stamp", "simulated image counts", {{"col", col}, {"row", row}, {"count", cnt}});
    c.out.grid("surface", "ln L(x, flux) at y = y_hat", d.surface);

    const auto& fx = d.surface.axis(1);
    const auto flux = fx.nodes();
    const auto marginal = marginalize(d.surface, {"x"});
    const std::size_t mid = d.surface.axis(0).size() / 2;
    std::vector<double> cond;
    for (std::size_t j = 0; j < fx.size(); ++j) cond.push_back(d.surface.value(mid * fx.size() + j));
    const auto marg = grid_values(marginal);
    c.out.table("flux_curves", "conditional and position-marginal flux curves",
                {{"flux", flux}, {"log_conditional", cond}, {"log_marginal", marg}});
    c.out.svg("flux_curves", "flux curve plot",
              line_plot("Photometry flux curves", "flux", "relative likelihood",
                        {{"conditional", flux, exp_shifted(cond)}, {"marginal in x", flux, exp_shifted(marg)}}));

    c.stats["truth"] = {{"x", stamp.truth->at(0)}, {"y", stamp.truth->at(1)}, {"flux", stamp.truth->at(2)}};
    c.stats["x_hat"] = d.x_hat;
    c.stats["y_hat"] = d.y_hat;
    c.stats["flux_hat"] = d.flux_hat;
    c.stats["flux_sigma"] = d.flux_sigma;
    c.stats["flux_peak_conditional"] = d.flux_peak_conditional;
    c.stats["flux_peak_marginal"] = d.flux_peak_marginal;
    c.stats["relative_shift"] = d.relative_shift;
    c.stats["contour_area_ratio_below_over_above"] = d.contour_area_ratio;
}

// ------------------------------------------------------------ Dirichlet

void demo_dirichlet_gallery(Context& c) {
    const int bins = static_cast<int>(c.params.integer("bins", 30));
    const double total = c.params.real("C", 2.0);
    const auto samples = c.params.integer("samples", 8);
    c.params.finish();
    if (samples < 1) throw DomainError("dirichlet-gallery: samples must be >= 1");

    auto rng_a = c.rng.derive(1);
    auto rng_b = c.rng.derive(2);
    const auto consistent =
        dirichlet_prior_gallery(DirichletSpec::from_aggregation_constant(bins, total), static_cast<std::size_t>(samples), rng_a);
    const auto flat = dirichlet_prior_gallery(DirichletSpec(bins, 1.0), static_cast<std::size_t>(samples), rng_b);
    for (const auto* g : {&consistent, &flat}) {
        const bool is_flat = g == &flat;
        std::vector<Column> cols{{"bin", iota_values(1, bins)}};
        for (std::size_t m = 0; m < g->samples.size(); ++m) cols.push_back({"f" + std::to_string(m + 1), g->samples[m]});
        c.out.table(is_flat ? "samples_flat" : "samples", is_flat ? "draws with alpha = 1" : "draws with alpha = C / K",
                    cols);
    }
    c.out.table("flatness", "K max_k f_k per draw",
                {{"draw", iota_values(1, samples)}, {"consistent", consistent.flatness}, {"flat", flat.flatness}});
    std::vector<Series> series;
    const auto b = iota_values(1, bins);
    for (std::size_t m = 0; m < std::min<std::size_t>(3, consistent.samples.size()); ++m) {
        series.push_back({"draw " + std::to_string(m + 1), b, consistent.samples[m]});
    }
    c.out.svg("samples", "gallery plot", line_plot("Dirichlet prior draws, alpha = C/K", "bin", "f_k", series));
    c.stats["alpha"] = consistent.spec.alpha();
    c.stats["frac_max_above_3_over_k"] = consistent.frac_max_above_3_over_k;
    c.stats["flat_frac_max_above_3_over_k"] = flat.frac_max_above_3_over_k;
}

void demo_dirichlet_aggregation(Context& c) {
    const int bins = static_cast<int>(c.params.integer("bins", 30));
    const double total = c.params.real("C", 2.0);
    const auto draws = c.params.integer("draws", 100000);
    c.params.finish();
    if (draws < 2) throw DomainError("dirichlet-aggregation: draws must be >= 2");

    const auto r = aggregation_consistency_check(total, bins, c.rng, static_cast<std::size_t>(draws));
    c.out.table("merged_moments", "merged-pair moments against the coarse Dirichlet",
                {{"merged_bin", iota_values(1, r.merged_bins)},
                 {"mean", r.consistent.empirical_mean},
                 {"variance", r.consistent.empirical_variance},
                 {"flat_mean", r.flat_control.empirical_mean},
                 {"flat_variance", r.flat_control.empirical_variance}});
    c.stats["expected_mean"] = r.consistent.expected_mean;
    c.stats["expected_variance"] = r.consistent.expected_variance;
    c.stats["max_abs_z"] = r.consistent.max_abs_z;
    c.stats["flat_expected_variance"] = r.flat_control.expected_variance;
    c.stats["flat_max_abs_z"] = r.flat_control.max_abs_z;
}

// ------------------------------------------------------------ typical sets

void demo_typical_set(Context& c) {
    const auto flips = c.params.integer("flips", 1000);
    const double p = c.params.real("p", 0.8);
    c.params.finish();

    const auto r = typical_set_report(flips, p);
    std::vector<double> k, log10_count, log10_prob;
    for (long long j = 0; j <= flips; ++j) {
        k.push_back(static_cast<double>(j));
        log10_count.push_back(log_binomial_coeff(flips, j) / std::log(10.0));
        log10_prob.push_back(binomial_log_pmf(j, flips, p) / std::log(10.0));
    }
    c.out.table("head_counts", "sequence counts and probabilities per number of heads",
                {{"heads", k}, {"log10_sequences", log10_count}, {"log10_probability", log10_prob}});
    c.out.svg("head_counts", "probability plot",
              line_plot("Heads in " + std::to_string(flips) + " flips", "heads", "log10 probability",
                        {{"P(k heads)", k, log10_prob}}));
    c.stats["log10_ratio"] = r.log10_ratio;
    c.stats["sd_binomial"] = r.sd_binomial;
    c.stats["window"] = {r.window_lo, r.window_hi};
    c.stats["log10_window_count"] = r.log10_window_count;
    c.stats["window_probability"] = r.window_probability;
    c.stats["sd_sqrt_mean"] = r.sd_sqrt_mean;
    c.stats["alt_window"] = {r.alt_window_lo, r.alt_window_hi};
    c.stats["log10_alt_window_count"] = r.log10_alt_window_count;
    c.stats["alt_window_probability"] = r.alt_window_probability;
    c.stats["log10_entropy_count"] = r.log10_entropy_count;
}

void demo_chi_shell(Context& c) {
    const int dim = static_cast<int>(c.params.integer("dim", 30));
    const auto draws = c.params.integer("draws", 100000);
    const auto bins = c.params.integer("bins", 60);
    c.params.finish();
    if (bins < 1) throw DomainError("chi-shell: bins must be >= 1");

    const auto r = chi_shell_report(dim, static_cast<std::size_t>(draws), c.rng, static_cast<std::size_t>(bins));
    auto emit = [&](const std::string& stem, const std::string& role, const Histogram& h,
                    const std::function<double(double)>& pdf) {
        std::vector<double> lo, hi, theory;
        for (std::size_t i = 0; i < h.density.size(); ++i) {
            lo.push_back(h.edges[i]);
            hi.push_back(h.edges[i + 1]);
            theory.push_back(pdf(0.5 * (h.edges[i] + h.edges[i + 1])));
        }
        c.out.table(stem, role, {{"bin_lo", lo}, {"bin_hi", hi}, {"density", h.density}, {"theory", theory}});
    };
    emit("chi_histogram", "distance from the mode", r.chi_histogram,
         [dim](double x) { return std::exp(chi_log_pdf(x, dim)); });
    emit("max_abs_histogram", "largest coordinate magnitude", r.max_abs_histogram,
         [dim](double x) { return std::exp(max_abs_coord_log_pdf(x, dim)); });
    c.out.svg("chi_histogram", "histogram plot",
              line_plot("Distance from the mode, N = " + std::to_string(dim), "chi", "density",
                        {histogram_series("draws", r.chi_histogram.edges, r.chi_histogram.density)}));
    c.stats["interval_90"] = {r.interval_lo, r.interval_hi};
    c.stats["interval_mid"] = r.interval_mid;
    c.stats["ks_chi"] = r.ks_chi;
    c.stats["ks_chi_pvalue"] = r.ks_chi_pvalue;
    c.stats["ks_max_abs"] = r.ks_max_abs;
    c.stats["ks_max_abs_pvalue"] = r.ks_max_abs_pvalue;
}

void demo_chisq_dof(Context& c) {
    const int dim = static_cast<int>(c.params.integer("dim", 1000));
    const auto trials = c.params.integer("trials", 10000);
    c.params.finish();

    const auto r = chisq_dof_check(dim, static_cast<std::size_t>(trials), c.rng);
    c.stats["mean"] = r.mean;
    c.stats["sd"] = r.sd;
    c.stats["expected_mean"] = dim;
    c.stats["expected_sd"] = std::sqrt(2.0 * dim);
    c.stats["z_mean"] = r.z_mean;
    c.stats["z_sd"] = r.z_sd;
    c.stats["max_half_sum_error"] = r.max_half_sum_error;
}

// ------------------------------------------------------------ discrepancy

void demo_nb_discrepancy(Context& c) {
    const double ld = c.params.real("lambda_delta", 5.0);
    const double beta = c.params.real("beta", 2.0);
    const auto bins = c.params.integer("bins", 100);
    const double beta_lo = c.params.real("beta_lo", 1e-2);
    const double beta_hi = c.params.real("beta_hi", 1e4);
    const std::size_t n2 = c.params.grid_2d(501);
    c.params.finish();
    if (bins < 2) throw DomainError("nb-discrepancy: bins must be >= 2");

    const NegBinomialParams nb(beta * ld, beta / (1.0 + beta));
    const auto n_max = static_cast<long long>(std::ceil(ld + 10.0 * std::sqrt(nb.variance())));
    std::vector<double> ns, nb_mass, pois_mass, quad_mass;
    for (long long n = 0; n <= n_max; ++n) {
        const auto o = nb_vs_quadrature_oracle(ld, beta, n, 4001);
        ns.push_back(static_cast<double>(n));
        nb_mass.push_back(std::exp(o.analytic));
        quad_mass.push_back(std::exp(o.quadrature));
        pois_mass.push_back(std::exp(poisson_log_pmf(n, ld)));
    }
    c.out.table("pmf", "NB marginal, gamma-Poisson quadrature and Poisson masses",
                {{"n", ns}, {"negative_binomial", nb_mass}, {"quadrature", quad_mass}, {"poisson", pois_mass}});

    std::vector<double> g_ld, g_beta, g_n, g_a, g_q;
    double worst = 0.0;
    for (double l : {0.5, 5.0, 50.0}) {
        for (double b : {0.5, 2.0, 10.0}) {
            const double sd = std::sqrt(l * (1.0 + 1.0 / b));
            for (double n : {0.0, std::ceil(l), std::ceil(l + 5.0 * sd)}) {
                const auto o = nb_vs_quadrature_oracle(l, b, static_cast<long long>(n));
                g_ld.push_back(l);
                g_beta.push_back(b);
                g_n.push_back(n);
                g_a.push_back(o.analytic);
                g_q.push_back(o.quadrature);
                worst = std::max(worst, std::fabs(o.analytic - o.quadrature));
            }
        }
    }
    c.out.table("oracle_grid", "analytic vs quadrature log-mass",
                {{"lambda_delta", g_ld}, {"beta", g_beta}, {"n", g_n}, {"analytic", g_a}, {"quadrature", g_q}});

    std::vector<double> t;
    for (long long i = 0; i < bins; ++i) t.push_back(static_cast<double>(i) + 0.5);
    const auto rate = constant_rate();
    const std::vector<double> psi{ld};
    const auto series = simulate_counts(rate, psi, t, 1.0, beta, c.rng);
    std::vector<double> counts;
    for (long long k : series.counts) counts.push_back(static_cast<double>(k));
    c.out.table("series", "simulated counts with gamma discrepancy", {{"t", t}, {"count", counts}});

    double mean_count = 0.0;
    for (double k : counts) mean_count += k;
    mean_count /= static_cast<double>(bins);
    const double half = 8.0 * std::sqrt(std::max(mean_count, 1.0) * 3.0 / static_cast<double>(bins));
    const Axis lambda_axis("lambda", std::max(mean_count - half, 1e-3 * std::max(mean_count, 1.0)), mean_count + half, n2);
    const Axis beta_axis("beta", beta_lo, beta_hi, n2, AxisTransform::log);
    const auto fit = fit_salient(series, rate, {lambda_axis}, beta_axis);
    c.out.table("lambda_marginal", "posterior of the rate",
                {{"lambda", fit.marginals[0].axis(0).nodes()}, {"density", exp_values(fit.marginals[0])}});
    c.out.table("beta_marginal", "posterior of beta",
                {{"beta", fit.marginals[1].axis(0).nodes()}, {"density", exp_values(fit.marginals[1])}});
    c.out.svg("beta_marginal", "beta posterior plot",
              line_plot("Posterior of beta", "ln beta", "density",
                        {{"p(beta | D)",
                          [&] {
                              std::vector<double> lb;
                              for (double b : fit.marginals[1].axis(0).nodes()) lb.push_back(std::log(b));
                              return lb;
                          }(),
                          exp_values(fit.marginals[1])}}));

    std::vector<double> betas{1.0, 10.0, 100.0, 1000.0, 10000.0};
    std::vector<double> gaps;
    const auto n_ref = static_cast<long long>(std::llround(ld));
    for (double b : betas) {
        gaps.push_back(std::fabs(neg_binomial_log_pmf(n_ref, NegBinomialParams(b * ld, b / (1.0 + b))) -
                                 poisson_log_pmf(n_ref, ld)));
    }
    c.out.table("poisson_limit", "NB vs Poisson log-mass gap", {{"beta", betas}, {"abs_log_gap", gaps}});

    double tv = 0.0;
    const NegBinomialParams near_poisson(1e4 * ld, 1e4 / (1.0 + 1e4));
    for (long long n = 0; n <= std::max<long long>(60, n_max); ++n) {
        tv += std::fabs(std::exp(neg_binomial_log_pmf(n, near_poisson)) - std::exp(poisson_log_pmf(n, ld)));
    }
    const std::vector<double> two{ld, ld};
    const auto conv = nb_convolution_check(two, beta);

    c.stats["oracle_grid_max_abs_log_diff"] = worst;
    c.stats["nb_mean"] = nb.mean();
    c.stats["nb_sd_inflation"] = std::sqrt(nb.variance() / ld);
    c.stats["expected_sd_inflation"] = std::sqrt(1.0 + 1.0 / beta);
    c.stats["total_variation_beta_1e4"] = 0.5 * tv;
    c.stats["convolution_max_abs_diff"] = conv.max_abs_diff;
    c.stats["convolution_control_max_abs_diff"] = conv.control_max_abs_diff;
    json hpd = json::array();
    for (const auto& h : fit.summary.hpd) hpd.push_back({{"axis", h.axis}, {"region", hpd_json(h.region)}});
    json ln_beta = json::array();
    for (const auto& h : fit.log_beta_hpd) {
        json iv = json::array();
        for (const auto& v : h.intervals) iv.push_back({std::exp(v.lo), std::exp(v.hi)});
        ln_beta.push_back({{"level", h.level}, {"mass", h.mass}, {"beta_intervals", iv}});
    }
    c.stats["fit"] = {{"map", fit.summary.mode}, {"mean", fit.summary.mean}, {"hpd", hpd},
                      {"beta_hpd_in_ln_beta", ln_beta}, {"log_evidence", fit.log_evidence}};
}

void demo_gaussian_overdispersion(Context& c) {
    const auto points = c.params.integer("points", 50);
    const double alpha_true = c.params.real("alpha_true", 1.5);
    const double intercept = c.params.real("intercept", 1.0);
    const double slope = c.params.real("slope", 2.0);
    const double psi_half = c.params.real("psi_halfwidth", 0.5);
    const double alpha_lo = c.params.real("alpha_lo", 0.2);
    const double alpha_hi = c.params.real("alpha_hi", 50.0);
    const auto alpha_nodes = static_cast<std::size_t>(c.params.integer("alpha_nodes", 4001));
    const std::size_t n1 = c.params.grid_1d(2001);
    c.params.finish();
    if (points < 2) throw DomainError("gaussian-overdispersion: points must be >= 2");
    if (!(alpha_true > 0.0)) throw DomainError("gaussian-overdispersion: alpha_true must be > 0");

    GaussianRegressionData data;
    data.model = [intercept](double x, std::span<const double> psi) { return intercept + psi[0] * x; };
    for (long long i = 0; i < points; ++i) {
        const double x = 10.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        const double s = 0.5 + static_cast<double>(i % 5) * 0.25;
        data.x.push_back(x);
        data.sigma.push_back(s);
        data.y.push_back(intercept + slope * x + sample(c.rng, NormalDist{0.0, alpha_true * s}));
    }
    c.out.table("data", "synthetic regression data", {{"x", data.x}, {"y", data.y}, {"sigma", data.sigma}});

    const Axis psi_axis("psi", slope - psi_half, slope + psi_half, n1);
    const LogUniformAlpha prior{alpha_lo, alpha_hi};
    std::vector<double> chi2, ll1, quad, closed, rel;
    std::vector<std::string> warnings;
    double worst = 0.0;
    for (double psi : psi_axis.nodes()) {
        const std::vector<double> p{psi};
        const auto m = marginalize_alpha(data, p, prior, alpha_nodes);
        chi2.push_back(chisq(data, p));
        ll1.push_back(gaussian_loglike(data, p));
        quad.push_back(m.log_quadrature);
        closed.push_back(*m.log_closed_form);
        rel.push_back(std::fabs(std::expm1(m.log_quadrature - *m.log_closed_form)));
        worst = std::max(worst, rel.back());
        for (const auto& w : m.warnings) {
            if (warnings.size() < 5) warnings.push_back(w);
        }
    }
    c.out.table("alpha_marginal", "alpha-marginal likelihood over psi",
                {{"psi", psi_axis.nodes()},
                 {"chisq", chi2},
                 {"log_likelihood_alpha1", ll1},
                 {"log_marginal_quadrature", quad},
                 {"log_marginal_closed_form", closed},
                 {"relative_error", rel}});
    c.out.svg("alpha_marginal", "likelihood plot",
              line_plot("Noise-inflation marginal", "psi", "relative likelihood",
                        {{"alpha = 1", psi_axis.nodes(), exp_shifted(ll1)},
                         {"alpha marginal", psi_axis.nodes(), exp_shifted(quad)}}));

    std::vector<double> betas{0.0, 0.25, 0.5, 1.0, 2.0};
    std::vector<double> a_rule, a_var, ll_rule, ll_var, ll_quad;
    const std::vector<double> at_truth{slope};
    for (double b : betas) {
        const auto e = gaussian_discrepancy_equivalence(b);
        a_rule.push_back(e.alpha_rescaling);
        a_var.push_back(e.alpha_variance);
        ll_rule.push_back(gaussian_overdispersed_loglike(data, at_truth, e.alpha_rescaling));
        ll_var.push_back(gaussian_overdispersed_loglike(data, at_truth, e.alpha_variance));
        ll_quad.push_back(b > 0.0 ? gaussian_discrepancy_quadrature(data, at_truth, b) : gaussian_loglike(data, at_truth));
    }
    c.out.table("discrepancy_equivalence", "1 + beta rule vs variance-additive scale",
                {{"beta", betas},
                 {"alpha_rescaling", a_rule},
                 {"alpha_variance", a_var},
                 {"log_likelihood_rescaling", ll_rule},
                 {"log_likelihood_variance", ll_var},
                 {"log_likelihood_delta_quadrature", ll_quad}});

    const auto best = static_cast<std::size_t>(std::distance(chi2.begin(), std::min_element(chi2.begin(), chi2.end())));
    c.stats["max_relative_error"] = worst;
    c.stats["psi_min_chisq"] = psi_axis.node(best);
    c.stats["alpha_hat_at_min"] = std::sqrt(chi2[best] / static_cast<double>(points));
    c.stats["warnings"] = warnings;
}

using DemoFn = void (*)(Context&);

const std::vector<std::pair<std::string, DemoFn>>& registry() {
    static const std::vector<std::pair<std::string, DemoFn>> demos{
        {"binomial", demo_binomial},
        {"common-mean", demo_common_mean},
        {"on-off", demo_on_off},
        {"flare", demo_flare},
        {"banana", demo_banana},
        {"neyman-scott", demo_neyman_scott},
        {"photometry", demo_photometry},
        {"dirichlet-gallery", demo_dirichlet_gallery},
        {"dirichlet-aggregation", demo_dirichlet_aggregation},
        {"typical-set", demo_typical_set},
        {"chi-shell", demo_chi_shell},
        {"chisq-dof", demo_chisq_dof},
        {"nb-discrepancy", demo_nb_discrepancy},
        {"gaussian-overdispersion", demo_gaussian_overdispersion},
    };
    return demos;
}

}  // namespace

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : registry()) v.push_back(name);
        return v;
    }();
    return names;
}

json run_demo(const RunConfig& config) {
    const auto& demos = registry();
    const auto it = std::find_if(demos.begin(), demos.end(), [&](const auto& d) { return d.first == config.name; });
    if (it == demos.end()) {
        std::string list;
        for (const auto& n : demo_names()) list += (list.empty() ? "" : ", ") + n;
        throw UsageError("unknown demo '" + config.name + "'; valid names: " + list);
    }
    Params params(config);
    ArtifactSet out(config);
    RngStream rng(config.seed, static_cast<std::uint64_t>(std::distance(demos.begin(), it)));
    json stats = json::object();
    Context ctx{params, out, rng, stats};
    it->second(ctx);
    return out.write_manifest(params.resolved(), stats);
}

}  // namespace margin::cli
