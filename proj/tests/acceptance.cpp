// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "demos.hpp"
#include "margin/discrepancy.hpp"
#include "margin/distributions.hpp"
#include "margin/grid.hpp"
#include "margin/problems.hpp"

namespace fs = std::filesystem;
using namespace margin;
using margin::cli::OutputFormat;
using margin::cli::RunConfig;

namespace {

struct Verdict {
    bool ok;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

fs::path scratch_root() {
    static const fs::path root = fs::temp_directory_path() / ("margin_acceptance_" + std::to_string(::getpid()));
    return root;
}

nlohmann::json demo(const std::string& name, std::map<std::string, std::string> overrides = {},
                    OutputFormat format = OutputFormat::json, const std::string& tag = "") {
    RunConfig cfg;
    cfg.command = "demo";
    cfg.name = name;
    cfg.format = format;
    cfg.overrides = std::move(overrides);
    cfg.out_dir = scratch_root() / (name + tag);
    fs::remove_all(cfg.out_dir);
    return cli::run_demo(cfg)["statistics"];
}

LogDensityGrid binomial_grid(long long n, long long trials) {
    return LogDensityGrid::fill({Axis("theta", 0.0, 1.0, 4001)},
                                [=](std::span<const double> p) { return binomial_log_pmf(n, trials, p[0]); });
}

Verdict nb_oracle() {
    double worst = 0.0;
    bool clean = true;
    for (double ld : {0.5, 5.0, 50.0}) {
        for (double beta : {0.5, 2.0, 10.0}) {
            const double sd = std::sqrt(ld * (1.0 + 1.0 / beta));
            for (long long n : {0LL, static_cast<long long>(std::ceil(ld)), static_cast<long long>(std::ceil(ld + 5.0 * sd))}) {
                const auto r = nb_vs_quadrature_oracle(ld, beta, n);
                worst = std::max(worst, std::fabs(r.analytic - r.quadrature));
                clean = clean && r.warnings.empty();
            }
        }
    }
    return {worst < 1e-6 && clean, "max |log diff| " + fmt("%.2e", worst) + " over 27 points"};
}

Verdict poisson_limit() {
    const double ld = 3.0, beta = 1e4;
    const NegBinomialParams nb(beta * ld, beta / (1.0 + beta));
    double tv = 0.0;
    for (long long n = 0; n <= 60; ++n) tv += std::fabs(std::exp(neg_binomial_log_pmf(n, nb)) - std::exp(poisson_log_pmf(n, ld)));
    tv *= 0.5;
    return {tv < 1e-3, "total variation " + fmt("%.2e", tv)};
}

Verdict aggregation_closure() {
    const std::vector<double> means{3.0, 3.0};
    const auto c = nb_convolution_check(means, 2.0);
    return {c.max_abs_diff < 1e-10 && c.control_max_abs_diff > 1e-3,
            "shared theta " + fmt("%.2e", c.max_abs_diff) + ", mismatched control " + fmt("%.2e", c.control_max_abs_diff)};
}

Verdict binomial_evidence() {
    double worst = 0.0;
    for (long long n = 0; n <= 20; ++n) {
        worst = std::max(worst, std::fabs(std::exp(normalize(binomial_grid(n, 20)).log_evidence) - 1.0 / 21.0));
    }
    const auto like = [](std::span<const double> p) { return binomial_log_pmf(13, 20, p[0]); };
    const LogDensityGrid flat({Axis("theta", 0, 1, 4001)}, std::vector<double>(4001, 0.0));
    const std::vector<ModelSpec> models{{"null", std::nullopt, {0.5}, like}, {"free", flat, {}, like}};
    const double bf = model_evidence_and_bayes_factor(models).bayes_factor(0, 1);
    const double oracle = std::exp(binomial_log_pmf(13, 20, 0.5)) * 21.0;
    const bool ok = worst < 1e-6 && std::fabs(bf - oracle) < 1e-4 && std::fabs(bf - 1.5525) < 1e-4;
    return {ok, "max |E - 1/21| " + fmt("%.2e", worst) + ", BF " + fmt("%.6f", bf)};
}

Verdict rule_of_succession() {
    const auto post = normalize(binomial_grid(13, 20)).grid;
    const auto pred = posterior_predictive(
        post, [](long long d, std::span<const double> p) { return binomial_log_pmf(d, 1, p[0]); }, 0, 1);
    const double p = pred.probability(1);
    return {std::fabs(p - 14.0 / 22.0) < 1e-6, "P(success) " + fmt("%.9f", p)};
}

Verdict neyman_scott() {
    const auto s = demo("neyman-scott", {{"pairs", "2000"}, {"sigma", "1"}});
    const double sp = s["sigma_hat_profile"].get<double>();
    const double sm = s["sigma_hat_marginal"].get<double>();
    bool exact = std::fabs(sp * sp - sm * sm / 2.0) <= 1e-14 * sm * sm;
    // the identity must hold for every dataset, not only the default seed
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RngStream rng(seed);
        const auto data = simulate_pairs(200 * seed, 1.0, {-10, 10}, rng);
        const auto d = neyman_scott_demo(data, Axis("sigma", 0.3, 2.0, 201), 11);
        const double p2 = d.sigma_hat_profile * d.sigma_hat_profile;
        const double m2 = d.sigma_hat_marginal * d.sigma_hat_marginal;
        exact = exact && std::fabs(p2 - m2 / 2.0) <= 1e-14 * m2;
    }
    const bool ok = std::fabs(sp - std::sqrt(0.5)) < 0.02 && std::fabs(sm - 1.0) < 0.03 && exact;
    return {ok, "profile " + fmt("%.4f", sp) + ", marginal " + fmt("%.4f", sm) + (exact ? ", ratio exact" : ", ratio NOT exact")};
}

Verdict on_off() {
    const double dev = demo("on-off")["ratio_max_relative_deviation"].get<double>();
    return {dev < 1e-6, "max relative deviation of Lm/Lp " + fmt("%.2e", dev)};
}

Verdict laplace() {
    const auto s = demo("flare");
    const double lap = s["laplace_sup_relative_error"].get<double>();
    const double ratio = s["ratio_over_width_max_relative_deviation"].get<double>();
    return {lap < 0.02 && ratio < 1e-6, "Laplace sup rel error " + fmt("%.2e", lap) + ", Lm/(Lp w) deviation " + fmt("%.2e", ratio)};
}

Verdict typical_sets() {
    const auto t = demo("typical-set");
    const double ratio = t["log10_ratio"].get<double>();
    const auto c = demo("chi-shell", {{"dim", "30"}});
    const double mid = c["interval_mid"].get<double>();
    const auto q = demo("chisq-dof", {{"dim", "1000"}});
    const double zm = q["z_mean"].get<double>(), zs = q["z_sd"].get<double>();
    const bool ok = std::fabs(ratio - 200.0 * std::log10(4.0)) < 1e-9 && mid >= 5.3 && mid <= 5.6 &&
                    std::fabs(zm) < 4.0 && std::fabs(zs) < 4.0;
    return {ok, "log10 ratio " + fmt("%.9f", ratio) + ", chi midpoint " + fmt("%.4f", mid) + ", z(mean) " +
                    fmt("%.2f", zm) + ", z(sd) " + fmt("%.2f", zs)};
}

Verdict dirichlet_aggregation() {
    const auto s = demo("dirichlet-aggregation", {{"bins", "30"}, {"C", "2"}, {"draws", "100000"}});
    const double z = s["max_abs_z"].get<double>(), flat = s["flat_max_abs_z"].get<double>();
    return {z < 4.0 && flat > 10.0, "max |z| " + fmt("%.2f", z) + ", flat control " + fmt("%.1f", flat)};
}

Verdict photometry() {
    const auto s = demo("photometry", {{"snr", "6"}});
    const double cond = s["flux_peak_conditional"].get<double>();
    const double marg = s["flux_peak_marginal"].get<double>();
    const double shift = s["relative_shift"].get<double>();
    const bool ok = marg < cond && shift >= 0.003 && shift <= 0.03;
    return {ok, "conditional " + fmt("%.2f", cond) + ", marginal " + fmt("%.2f", marg) + ", shift " + fmt("%.2f%%", 100.0 * shift)};
}

Verdict gaussian_overdispersion() {
    const double err = demo("gaussian-overdispersion", {{"points", "50"}})["max_relative_error"].get<double>();
    return {err < 1e-4, "max relative error " + fmt("%.2e", err)};
}

Verdict hpd() {
    const auto g = normalize(LogDensityGrid::fill({Axis("x", -10, 10, 2001)}, [](std::span<const double> p) {
                       return normal_log_pdf(p[0], 0.0, 1.0);
                   })).grid;
    const auto r = hpd_region(g, 0.9);
    const double step = g.axis(0).step();
    const double z = 1.6448536269514722;
    bool ok = r.intervals.size() == 1 && std::fabs(r.intervals[0].lo + z) <= step && std::fabs(r.intervals[0].hi - z) <= step;
    const auto gam = normalize(LogDensityGrid::fill({Axis("x", 0, 40, 4001)}, [](std::span<const double> p) {
                         return gamma_log_pdf(p[0], 2.0, 1.0);
                     })).grid;
    const auto h = hpd_region(gam, 0.9);
    const auto et = equal_tail_interval(gam, 0.9);
    ok = ok && h.total_length() <= et.length();
    return {ok, "normal [" + fmt("%.4f", r.intervals.front().lo) + ", " + fmt("%.4f", r.intervals.back().hi) +
                    "], gamma HPD " + fmt("%.4f", h.total_length()) + " vs equal-tail " + fmt("%.4f", et.length())};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (ext != ".csv" && ext != ".json") continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[e.path().filename().string()] = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
    return files;
}

Verdict determinism() {
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& name : cli::demo_names()) {
        demo(name, {}, OutputFormat::both, "_a");
        demo(name, {}, OutputFormat::both, "_b");
        const auto a = read_tree(scratch_root() / (name + "_a"));
        const auto b = read_tree(scratch_root() / (name + "_b"));
        compared += a.size();
        if (a != b || a.empty()) differing.push_back(name);
        fs::remove_all(scratch_root() / (name + "_a"));
        fs::remove_all(scratch_root() / (name + "_b"));
    }
    std::string detail = std::to_string(compared) + " CSV/JSON files byte-compared across " +
                         std::to_string(cli::demo_names().size()) + " demos";
    for (const auto& d : differing) detail += "; differs: " + d;
    return {differing.empty(), detail};
}

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "nb-analytic-marginalization", 5.0, nb_oracle},
        {2, "poisson-limit", 1.0, poisson_limit},
        {3, "nb-aggregation-closure", 1.0, aggregation_closure},
        {4, "binomial-evidence", 1.0, binomial_evidence},
        {5, "rule-of-succession", 1.0, rule_of_succession},
        {6, "neyman-scott", 5.0, neyman_scott},
        {7, "on-off-proportionality", 1.0, on_off},
        {8, "laplace-flare", 2.0, laplace},
        {9, "typical-sets", 10.0, typical_sets},
        {10, "dirichlet-aggregation", 10.0, dirichlet_aggregation},
        {11, "photometry-flaring", 5.0, photometry},
        {12, "gaussian-overdispersion", 2.0, gaussian_overdispersion},
        {13, "hpd-correctness", 1.0, hpd},
        {14, "determinism", 30.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = v.ok && in_time;
        if (!pass) ++failures;
        std::printf("%s %2d %-28s %7.3f s (limit %g s%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    c.limit_seconds, in_time ? "" : ", exceeded", v.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(scratch_root());
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
