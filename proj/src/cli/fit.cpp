#include "fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "artifacts.hpp"
#include "margin/discrepancy.hpp"
#include "margin/error.hpp"

namespace margin::cli {

using nlohmann::json;

json run_fit(const RunConfig& config) {
    if (config.name != "counts") throw UsageError("unknown fit target '" + config.name + "'; valid: counts");
    if (config.model != "constant" && config.model != "pulse") {
        throw UsageError("unknown model '" + config.model + "'; valid: constant, pulse");
    }
    std::ifstream in(config.input);
    if (!in) throw UsageError("cannot open " + config.input.string());
    const auto series = read_count_series(in);

    const auto n = static_cast<double>(series.size());
    double total = 0.0;
    long long peak_count = 0;
    std::size_t peak_bin = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        total += static_cast<double>(series.counts[i]);
        if (series.counts[i] > peak_count) peak_count = series.counts[i], peak_bin = i;
    }
    const double mean_rate = std::max(total / n, 1.0) / series.width;
    const double span = series.t.back() - series.t.front() + series.width;

    Params p(config);
    const double beta_lo = p.real("beta_lo", 1e-2);
    const double beta_hi = p.real("beta_hi", 1e4);
    std::vector<Axis> psi_axes;
    RateFn rate;
    if (config.model == "constant") {
        const double half = 8.0 * std::sqrt(mean_rate * 3.0 / (n * series.width));
        const double lo = p.real("lambda_lo", std::max(mean_rate - half, 1e-3 * mean_rate));
        const double hi = p.real("lambda_hi", mean_rate + half);
        const std::size_t nodes = p.grid_2d(501);
        psi_axes.emplace_back("lambda", lo, hi, nodes);
        rate = constant_rate();
    } else {
        const double centre = p.real("centre", series.t[peak_bin]);
        const double width = p.real("width", std::max(series.width, 0.05 * span));
        const double bg_lo = p.real("background_lo", 1e-3 * mean_rate);
        const double bg_hi = p.real("background_hi", 2.0 * mean_rate);
        const double amp_lo = p.real("amplitude_lo", 0.0);
        const double amp_hi = p.real("amplitude_hi", 2.0 * std::max<double>(static_cast<double>(peak_count), 1.0) / series.width);
        const std::size_t nodes = p.grid_2d(51);
        psi_axes.emplace_back("background", bg_lo, bg_hi, nodes);
        psi_axes.emplace_back("amplitude", amp_lo, amp_hi, nodes);
        rate = gaussian_pulse_rate(centre, width);
    }
    const std::size_t beta_nodes = static_cast<std::size_t>(p.integer("beta_nodes", 121));
    p.finish();
    if (!(beta_lo > 0.0 && beta_lo < beta_hi)) throw UsageError("need 0 < beta_lo < beta_hi");

    const Axis beta_axis("beta", beta_lo, beta_hi, beta_nodes, AxisTransform::log);
    const std::vector<double> levels{0.68, 0.9, 0.95};
    const auto fit = fit_salient(series, rate, psi_axes, beta_axis, levels);

    ArtifactSet out(config);
    json map = json::object(), mean = json::object(), hpd = json::object();
    const auto& axes = fit.posterior.axes();
    for (std::size_t i = 0; i < axes.size(); ++i) {
        map[axes[i].name()] = fit.summary.mode[i];
        mean[axes[i].name()] = fit.summary.mean[i];
    }
    for (const auto& h : fit.summary.hpd) {
        json iv = json::array();
        for (const auto& v : h.region.intervals) iv.push_back({v.lo, v.hi});
        char key[16];
        std::snprintf(key, sizeof key, "%.2f", h.region.level);
        hpd[h.axis][key] = {{"mass", h.region.mass}, {"intervals", iv}};
    }
    json ln_beta = json::object();
    for (const auto& h : fit.log_beta_hpd) {
        json iv = json::array();
        for (const auto& v : h.intervals) iv.push_back({std::exp(v.lo), std::exp(v.hi)});
        char key[16];
        std::snprintf(key, sizeof key, "%.2f", h.level);
        ln_beta[key] = {{"mass", h.mass}, {"intervals", iv}};
    }
    // mass in the top decade of the beta prior: large means effectively Poisson
    const auto& bm = fit.marginals.back();
    const auto w = bm.axis(0).weights();
    double top_decade = 0.0;
    for (std::size_t i = 0; i < bm.size(); ++i) {
        if (bm.axis(0).node(i) >= beta_hi / 10.0) top_decade += w[i] * std::exp(bm.value(i));
    }
    const json report{{"model", config.model},
                      {"bins", series.size()},
                      {"bin_width", series.width},
                      {"map", map},
                      {"posterior_mean", mean},
                      {"hpd", hpd},
                      {"beta_hpd_in_ln_beta", ln_beta},
                      {"log_evidence", fit.log_evidence},
                      {"beta_mass_top_decade", top_decade}};
    out.report("report", "posterior summary", report);
    for (const auto& m : fit.marginals) {
        std::vector<double> density;
        for (double v : m.values()) density.push_back(std::exp(v));
        std::vector<Column> cols{{m.axis(0).name(), m.axis(0).nodes()}, {"density", density}};
        if (&m == &fit.marginals.back()) {
            std::vector<double> per_log;
            for (double v : fit.log_beta_marginal.values()) per_log.push_back(std::exp(v));
            cols.push_back({"density_per_ln_beta", per_log});
        }
        out.table(m.axis(0).name() + "_marginal", "posterior marginal of " + m.axis(0).name(), cols);
    }
    return out.write_manifest(p.resolved(), report);
}

}  // namespace margin::cli
