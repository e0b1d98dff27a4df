#include "margin/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "margin/error.hpp"
#include "margin/format.hpp"

namespace margin {

// ------------------------------------------------------------ binomial

BinomialDemo binomial_demo(long long trials, double theta_true, std::optional<long long> observed,
                           RngStream& rng, std::size_t theta_nodes) {
    if (trials < 1) throw DomainError("binomial_demo: need N >= 1");
    if (!(theta_true > 0.0 && theta_true <= 1.0)) throw DomainError("binomial_demo: theta must lie in (0, 1]");
    if (observed && (*observed < 0 || *observed > trials)) {
        throw DomainError("binomial_demo: observed count " + std::to_string(*observed) + " outside [0, N]");
    }
    const long long n_obs = observed ? *observed : sample(rng, BinomialDist{trials, theta_true});

    BinomialDemo demo{trials, n_obs, theta_true, {}, Axis("theta", 0.0, 1.0, theta_nodes), {}, {}, 0.0};
    const auto theta = demo.theta_axis.nodes();
    for (long long n = 0; n <= trials; ++n) {
        demo.pmf.push_back(std::exp(binomial_log_pmf(n, trials, theta_true)));
        std::vector<double> curve(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) curve[i] = binomial_log_pmf(n, trials, theta[i]);
        demo.log_evidence.push_back(normalize(LogDensityGrid({demo.theta_axis}, curve)).log_evidence);
        demo.log_likelihood.push_back(std::move(curve));
    }
    const auto& obs = demo.log_likelihood[static_cast<std::size_t>(n_obs)];
    demo.peak_theta = theta[static_cast<std::size_t>(std::distance(obs.begin(), std::max_element(obs.begin(), obs.end())))];
    return demo;
}

// ------------------------------------------------------------ common mean

CommonMeanDemo common_mean_demo(const Axis& mu_axis, double sigma, double x1, double x2, std::size_t slice_nodes) {
    if (!(sigma > 0.0)) throw DomainError("common_mean_demo: need sigma > 0");
    auto log_like = [&](double mu) { return normal_log_pdf(x1, mu, sigma) + normal_log_pdf(x2, mu, sigma); };
    std::vector<double> curve;
    for (double mu : mu_axis.nodes()) curve.push_back(log_like(mu));
    const double peak = maximize_1d(log_like, mu_axis.lo(), mu_axis.hi(), mu_axis.step() * 1e-6).argmax;

    const auto post = normalize(LogDensityGrid({mu_axis}, curve)).grid;
    const auto w = mu_axis.weights();
    const auto mu = mu_axis.nodes();
    double mean = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) mean += w[i] * std::exp(post.value(i)) * mu[i];
    double var = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) var += w[i] * std::exp(post.value(i)) * (mu[i] - mean) * (mu[i] - mean);

    const double half = 4.0 * sigma;
    auto slice = LogDensityGrid::fill(
        {Axis("x1", peak - half, peak + half, slice_nodes), Axis("x2", peak - half, peak + half, slice_nodes)},
        [&](std::span<const double> p) { return normal_log_pdf(p[0], peak, sigma) + normal_log_pdf(p[1], peak, sigma); });
    return {mu_axis, std::move(curve), peak, std::sqrt(var), std::move(slice)};
}

// ------------------------------------------------------------ two-parameter geometries

TwoParamModel on_off_gaussian_model(const OnOffParams& p) {
    if (!(p.sigma_on > 0.0) || !(p.sigma_off > 0.0)) throw DomainError("on/off model: need positive sds");
    TwoParamModel m;
    m.log_likelihood = [p](double s, double b) {
        return normal_log_pdf(p.d_on, s + b, p.sigma_on) + normal_log_pdf(p.d_off, b, p.sigma_off);
    };
    m.s_range = p.s_range;
    m.b_range = p.b_range;
    return m;
}

TwoParamModel flare_model(const FlareParams& p) {
    if (!(p.sigma_s > 0.0)) throw DomainError("flare model: need sigma_s > 0");
    if (!(p.width(p.s_range.lo) > 0.0) || !(p.width(p.s_range.hi) > 0.0)) {
        throw DomainError("flare model: slice width w(s) must stay positive on the s range");
    }
    TwoParamModel m;
    m.log_likelihood = [p](double s, double b) {
        return normal_log_pdf(s, p.s0, p.sigma_s) + normal_log_pdf(b, p.b0, p.width(s));
    };
    m.s_range = p.s_range;
    m.b_range = p.b_range;
    return m;
}

TwoParamModel banana_model(const BananaParams& p) {
    if (!(p.sigma_s > 0.0) || !(p.sigma_b > 0.0)) throw DomainError("banana model: need positive widths");
    TwoParamModel m;
    m.log_likelihood = [p](double s, double b) {
        const double ds = s - p.s0;
        const double ridge = p.kappa * ds * ds;
        const double t = p.tilt(s);
        const double var_b = p.sigma_b * p.sigma_b * (1.0 + t * t);
        return -0.5 * ds * ds / (p.sigma_s * p.sigma_s) - 0.5 * (b - ridge) * (b - ridge) / var_b;
    };
    m.s_range = p.s_range;
    m.b_range = p.b_range;
    return m;
}

// ------------------------------------------------------------ Neyman-Scott

PairedMeasurements simulate_pairs(std::size_t count, double sigma, Range mu_range, RngStream& rng) {
    if (count < 1) throw DomainError("simulate_pairs: need at least one pair");
    if (!(sigma > 0.0)) throw DomainError("simulate_pairs: need sigma > 0");
    PairedMeasurements data{{}, sigma, {}};
    for (std::size_t i = 0; i < count; ++i) {
        const double mu = mu_range.lo + mu_range.width() * rng.uniform();
        const double x = sample(rng, NormalDist{mu, sigma});
        const double y = sample(rng, NormalDist{mu, sigma});
        data.true_means.push_back(mu);
        data.pairs.emplace_back(x, y);
    }
    return data;
}

TwoParamModel neyman_scott_pair_model(double x, double y, Range sigma_range, Range mu_range) {
    TwoParamModel m;
    m.log_likelihood = [x, y](double sigma, double mu) {
        return normal_log_pdf(x, mu, sigma) + normal_log_pdf(y, mu, sigma);
    };
    m.s_range = sigma_range;
    m.b_range = mu_range;
    m.s_label = "sigma";
    m.b_label = "mu";
    return m;
}

NeymanScottDemo neyman_scott_demo(const PairedMeasurements& data, const Axis& sigma_axis, std::size_t joint_nodes) {
    if (data.pairs.empty()) throw DomainError("neyman_scott_demo: need at least one pair");
    if (!(sigma_axis.lo() > 0.0)) throw DomainError("neyman_scott_demo: sigma axis must be positive");
    double sum_d2 = 0.0;
    for (const auto& [x, y] : data.pairs) sum_d2 += (x - y) * (x - y);
    const auto n = static_cast<double>(data.pairs.size());

    NeymanScottDemo demo{data, sigma_axis, {}, {}, std::sqrt(sum_d2 / (4.0 * n)), std::sqrt(sum_d2 / (2.0 * n)),
                         sum_d2 == 0.0, LogDensityGrid({sigma_axis}, std::vector<double>(sigma_axis.size(), 0.0))};
    for (double s : sigma_axis.nodes()) {
        const double q = sum_d2 / (4.0 * s * s);
        demo.log_profile.push_back(-2.0 * n * std::log(s) - q);
        demo.log_marginal.push_back(-n * std::log(s) - q);
    }
    for (auto* curve : {&demo.log_profile, &demo.log_marginal}) {
        const double top = *std::max_element(curve->begin(), curve->end());
        for (auto& v : *curve) v -= top;
    }

    const auto [x0, y0] = data.pairs.front();
    const double centre = 0.5 * (x0 + y0);
    const double half = 3.0 * sigma_axis.hi();
    demo.first_pair_joint = LogDensityGrid::fill(
        {Axis("mu", centre - half, centre + half, joint_nodes), Axis("sigma", sigma_axis.lo(), sigma_axis.hi(), joint_nodes)},
        [x = x0, y = y0](std::span<const double> p) { return normal_log_pdf(x, p[0], p[1]) + normal_log_pdf(y, p[0], p[1]); });
    return demo;
}

// ------------------------------------------------------------ photometry

namespace {

// Fraction of a unit-flux circular Gaussian falling in each pixel along one axis.
std::vector<double> pixel_fractions(int size, double centre, double sigma) {
    std::vector<double> g(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        g[static_cast<std::size_t>(i)] =
            normal_cdf((i + 0.5 - centre) / sigma) - normal_cdf((i - 0.5 - centre) / sigma);
    }
    return g;
}

class StampModel {
public:
    explicit StampModel(const ImageStamp& stamp) : stamp_(stamp) {
        if (stamp.width <= 0 || stamp.height <= 0) throw UsageError("photometry: zero-size stamp");
        if (stamp.counts.size() != static_cast<std::size_t>(stamp.width) * static_cast<std::size_t>(stamp.height)) {
            throw UsageError("photometry: count array does not match stamp size");
        }
        if (!(stamp.psf_sigma > 0.0) || !(stamp.background >= 0.0)) {
            throw DomainError("photometry: need psf_sigma > 0 and background >= 0");
        }
        for (long long c : stamp.counts) {
            if (c < 0) throw DomainError("photometry: negative pixel count");
            log_factorials_ += log_gamma(static_cast<double>(c) + 1.0);
        }
    }

    std::vector<double> gx(double x) const { return pixel_fractions(stamp_.width, x, stamp_.psf_sigma); }
    std::vector<double> gy(double y) const { return pixel_fractions(stamp_.height, y, stamp_.psf_sigma); }

    double log_like(const std::vector<double>& gx, const std::vector<double>& gy, double flux) const {
        double acc = 0.0;
        for (int r = 0; r < stamp_.height; ++r) {
            for (int c = 0; c < stamp_.width; ++c) {
                const double mu = stamp_.background + flux * gx[static_cast<std::size_t>(c)] * gy[static_cast<std::size_t>(r)];
                const long long n = stamp_.at(c, r);
                if (mu <= 0.0) {
                    if (mu == 0.0 && n == 0) continue;
                    return kNegInf;
                }
                acc += static_cast<double>(n) * std::log(mu) - mu;
            }
        }
        return acc - log_factorials_;
    }

    double log_like(double x, double y, double flux) const { return log_like(gx(x), gy(y), flux); }

    double flux_fisher(double x, double y, double flux) const {
        const auto fx = gx(x);
        const auto fy = gy(y);
        double info = 0.0;
        for (double a : fy) {
            for (double b : fx) {
                const double g = a * b;
                info += g * g / (stamp_.background + flux * g);
            }
        }
        return info;
    }

private:
    const ImageStamp& stamp_;
    double log_factorials_ = 0.0;
};

}  // namespace

double stamp_log_likelihood(const ImageStamp& stamp, double x, double y, double flux) {
    return StampModel(stamp).log_like(x, y, flux);
}

double flux_for_snr(const PhotometryParams& p) {
    if (!(p.snr > 0.0)) throw DomainError("flux_for_snr: need snr > 0");
    if (!(p.background > 0.0)) throw DomainError("flux_for_snr: need background > 0");
    const ImageStamp probe{p.width, p.height,
                           std::vector<long long>(static_cast<std::size_t>(p.width) * static_cast<std::size_t>(p.height), 0),
                           p.psf_sigma, p.background, std::nullopt};
    const StampModel model(probe);
    const double x = 0.5 * (p.width - 1) + p.offset_x;
    const double y = 0.5 * (p.height - 1) + p.offset_y;
    double flux = p.snr / std::sqrt(model.flux_fisher(x, y, 0.0));
    for (int it = 0; it < 200; ++it) {
        const double next = p.snr / std::sqrt(model.flux_fisher(x, y, flux));
        if (std::fabs(next - flux) <= 1e-13 * flux) {
            flux = next;
            break;
        }
        flux = next;
    }
    return flux;
}

ImageStamp simulate_stamp(const PhotometryParams& p, RngStream& rng) {
    if (p.width <= 0 || p.height <= 0) throw UsageError("photometry: zero-size stamp");
    const double flux = flux_for_snr(p);
    const double x = 0.5 * (p.width - 1) + p.offset_x;
    const double y = 0.5 * (p.height - 1) + p.offset_y;
    const auto fx = pixel_fractions(p.width, x, p.psf_sigma);
    const auto fy = pixel_fractions(p.height, y, p.psf_sigma);
    ImageStamp stamp{p.width, p.height, {}, p.psf_sigma, p.background, std::array<double, 3>{x, y, flux}};
    stamp.counts.reserve(static_cast<std::size_t>(p.width) * static_cast<std::size_t>(p.height));
    for (int r = 0; r < p.height; ++r) {
        for (int c = 0; c < p.width; ++c) {
            const double mu = p.background + flux * fx[static_cast<std::size_t>(c)] * fy[static_cast<std::size_t>(r)];
            stamp.counts.push_back(sample(rng, PoissonDist{mu}));
        }
    }
    return stamp;
}

PhotometryDemo photometry_demo(const ImageStamp& stamp, std::size_t grid_nodes) {
    const StampModel model(stamp);
    const double cx = 0.5 * (stamp.width - 1);
    const double cy = 0.5 * (stamp.height - 1);
    const double reach = std::min(3.0, 0.5 * std::min(stamp.width, stamp.height));

    // background-limited flux scale, used only to set search brackets
    const double scale = std::sqrt(std::max(stamp.background, 1.0) * 4.0 * kPi * stamp.psf_sigma * stamp.psf_sigma);
    double excess = 0.0;
    for (long long c : stamp.counts) excess += static_cast<double>(c) - stamp.background;
    const double f_lo = -std::min(3.0 * scale, 0.5 * stamp.background);
    const double f_hi = std::max(excess, 0.0) + 12.0 * scale;

    double x = cx;
    double y = cy;
    double flux = std::clamp(excess, f_lo, f_hi);
    for (int round = 0; round < 60; ++round) {
        const double px = x, py = y, pf = flux;
        const auto fx0 = model.gx(x);
        const auto fy0 = model.gy(y);
        flux = maximize_1d([&](double f) { return model.log_like(fx0, fy0, f); }, f_lo, f_hi, 1e-9 * scale).argmax;
        x = maximize_1d([&](double v) { return model.log_like(model.gx(v), fy0, flux); }, cx - reach, cx + reach, 1e-10).argmax;
        const auto fx = model.gx(x);
        y = maximize_1d([&](double v) { return model.log_like(fx, model.gy(v), flux); }, cy - reach, cy + reach, 1e-10).argmax;
        if (std::fabs(x - px) < 1e-9 && std::fabs(y - py) < 1e-9 && std::fabs(flux - pf) < 1e-8 * scale) break;
    }
    {
        const auto fx = model.gx(x);
        const auto fy = model.gy(y);
        flux = maximize_1d([&](double f) { return model.log_like(fx, fy, f); }, f_lo, f_hi, 1e-9 * scale).argmax;
    }

    const double sigma_f = 1.0 / std::sqrt(model.flux_fisher(x, y, flux));
    const double half_x = reach;
    const Axis x_axis("x", x - half_x, x + half_x, grid_nodes);
    const Axis f_axis("flux", std::max(flux - 6.0 * sigma_f, f_lo), flux + 6.0 * sigma_f, grid_nodes);

    const auto fy = model.gy(y);
    std::vector<std::vector<double>> gx_nodes;
    for (double xv : x_axis.nodes()) gx_nodes.push_back(model.gx(xv));
    const auto f_nodes = f_axis.nodes();
    std::vector<double> surface(x_axis.size() * f_axis.size());
    for (std::size_t i = 0; i < x_axis.size(); ++i) {
        for (std::size_t j = 0; j < f_axis.size(); ++j) {
            surface[i * f_axis.size() + j] = model.log_like(gx_nodes[i], fy, f_nodes[j]);
        }
    }

    auto log_marginal = [&](double f) {
        std::vector<double> terms(x_axis.size());
        const auto w = x_axis.weights();
        for (std::size_t i = 0; i < x_axis.size(); ++i) terms[i] = model.log_like(gx_nodes[i], fy, f) + std::log(w[i]);
        return log_sum_exp(terms);
    };
    const auto fx_hat = model.gx(x);
    const double tol = 1e-7 * sigma_f;
    const double peak_cond =
        maximize_1d([&](double f) { return model.log_like(fx_hat, fy, f); }, f_axis.lo(), f_axis.hi(), tol).argmax;
    const double peak_marg = maximize_1d(log_marginal, f_axis.lo(), f_axis.hi(), tol).argmax;

    const double top = *std::max_element(surface.begin(), surface.end());
    double below = 0.0;
    double above = 0.0;
    for (std::size_t i = 0; i < x_axis.size(); ++i) {
        for (std::size_t j = 0; j < f_axis.size(); ++j) {
            if (surface[i * f_axis.size() + j] < top - 2.0) continue;
            if (f_nodes[j] < flux) {
                below += 1.0;
            } else if (f_nodes[j] > flux) {
                above += 1.0;
            }
        }
    }

    PhotometryDemo demo{stamp,
                        x,
                        y,
                        flux,
                        sigma_f,
                        LogDensityGrid({x_axis, f_axis}, std::move(surface)),
                        peak_cond,
                        peak_marg,
                        (peak_cond - peak_marg) / peak_cond,
                        above > 0.0 ? below / above : std::numeric_limits<double>::infinity()};
    return demo;
}

// ------------------------------------------------------------ Dirichlet

DirichletGallery dirichlet_prior_gallery(const DirichletSpec& spec, std::size_t samples, RngStream& rng) {
    if (samples < 1) throw DomainError("dirichlet_prior_gallery: need at least one sample");
    DirichletGallery g{spec, {}, std::vector<double>(static_cast<std::size_t>(spec.bins()), 0.0), {}, 0.0};
    const DirichletDist dist{spec.concentration_vector()};
    const double k = spec.bins();
    std::size_t above = 0;
    for (std::size_t m = 0; m < samples; ++m) {
        auto f = sample(rng, dist);
        const double mx = *std::max_element(f.begin(), f.end());
        for (std::size_t b = 0; b < f.size(); ++b) g.per_bin_max[b] = std::max(g.per_bin_max[b], f[b]);
        g.flatness.push_back(k * mx);
        if (mx > 3.0 / k) ++above;
        g.samples.push_back(std::move(f));
    }
    g.frac_max_above_3_over_k = static_cast<double>(above) / static_cast<double>(samples);
    return g;
}

DirichletPosterior multinomial_posterior(std::span<const long long> counts, const DirichletSpec& spec) {
    if (static_cast<int>(counts.size()) != spec.bins()) throw UsageError("multinomial_posterior: bin count mismatch");
    DirichletPosterior post;
    long long total = 0;
    for (long long c : counts) {
        if (c < 0) throw DomainError("multinomial_posterior: negative count");
        total += c;
    }
    const double a = spec.alpha();
    const double big_a = spec.total_concentration();
    double lml = log_gamma(static_cast<double>(total) + 1.0) + log_gamma(big_a) - log_gamma(static_cast<double>(total) + big_a);
    for (long long c : counts) {
        const double nk = static_cast<double>(c);
        post.concentration.push_back(nk + a);
        post.prior_pseudo_counts.push_back(a - 1.0);
        post.mean.push_back((nk + a) / (static_cast<double>(total) + big_a));
        lml += log_gamma(nk + a) - log_gamma(a) - log_gamma(nk + 1.0);
    }
    post.log_marginal_likelihood = lml;
    return post;
}

namespace {

MomentComparison merged_moments(const std::vector<double>& alpha, int merged_bins, double expected_mean,
                                double expected_variance, RngStream& rng, std::size_t draws) {
    const auto kp = static_cast<std::size_t>(merged_bins);
    std::vector<double> s1(kp, 0.0), s2(kp, 0.0), s3(kp, 0.0), s4(kp, 0.0);
    const DirichletDist dist{alpha};
    for (std::size_t m = 0; m < draws; ++m) {
        const auto f = sample(rng, dist);
        for (std::size_t j = 0; j < kp; ++j) {
            const double v = f[2 * j] + f[2 * j + 1];
            s1[j] += v;
            s2[j] += v * v;
            s3[j] += v * v * v;
            s4[j] += v * v * v * v;
        }
    }
    MomentComparison out{{}, {}, expected_mean, expected_variance, 0.0};
    const auto n = static_cast<double>(draws);
    auto z_of = [](double dev, double se) {
        if (se > 0.0) return std::fabs(dev) / se;
        return std::fabs(dev) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    for (std::size_t j = 0; j < kp; ++j) {
        const double mean = s1[j] / n;
        const double m2 = s2[j] / n - mean * mean;
        // fourth central moment from raw moments
        const double m4 = s4[j] / n - 4.0 * mean * s3[j] / n + 6.0 * mean * mean * s2[j] / n - 3.0 * std::pow(mean, 4);
        const double var = m2 * n / (n - 1.0);
        out.empirical_mean.push_back(mean);
        out.empirical_variance.push_back(var);
        const double se_mean = std::sqrt(std::max(m2, 0.0) / n);
        const double se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
        out.max_abs_z = std::max({out.max_abs_z, z_of(mean - expected_mean, se_mean), z_of(var - expected_variance, se_var)});
    }
    return out;
}

}  // namespace

AggregationReport aggregation_consistency_check(double total_concentration, int bins, RngStream& rng, std::size_t draws) {
    if (bins < 2 || bins % 2 != 0) throw DomainError("aggregation_consistency_check: K must be even and >= 2");
    if (!(total_concentration > 0.0)) throw DomainError("aggregation_consistency_check: need C > 0");
    if (draws < 2) throw DomainError("aggregation_consistency_check: need draws >= 2");
    const int merged = bins / 2;
    const double kp = merged;
    const auto spec = DirichletSpec::from_aggregation_constant(bins, total_concentration);
    // component of a symmetric Dirichlet(a, K') has mean 1/K' and variance (1/K')(1-1/K')/(a K' + 1)
    const double cons_var = (1.0 / kp) * (1.0 - 1.0 / kp) / (total_concentration + 1.0);
    const double flat_var = (1.0 / kp) * (1.0 - 1.0 / kp) / (kp + 1.0);
    RngStream cons_rng = rng.derive(1);
    RngStream flat_rng = rng.derive(2);
    AggregationReport r{bins, merged, total_concentration, draws,
                        merged_moments(spec.concentration_vector(), merged, 1.0 / kp, cons_var, cons_rng, draws),
                        merged_moments(std::vector<double>(static_cast<std::size_t>(bins), 1.0), merged, 1.0 / kp,
                                       flat_var, flat_rng, draws)};
    return r;
}

// ------------------------------------------------------------ typical sets

namespace {

struct WindowStats {
    long long lo;
    long long hi;
    double log10_count;
    double probability;
};

WindowStats binomial_window(long long n, double p, double centre, double half_width) {
    const long long lo = std::max(0LL, std::llround(centre - half_width));
    const long long hi = std::min(n, std::llround(centre + half_width));
    std::vector<double> log_counts;
    double prob = 0.0;
    for (long long k = lo; k <= hi; ++k) {
        log_counts.push_back(log_binomial_coeff(n, k));
        prob += std::exp(binomial_log_pmf(k, n, p));
    }
    return {lo, hi, log_sum_exp(log_counts) / std::log(10.0), prob};
}

}  // namespace

TypicalSetReport typical_set_report(long long flips, double p_heads) {
    if (flips < 1) throw DomainError("typical_set_report: need N >= 1");
    if (!(p_heads > 0.0 && p_heads < 1.0)) throw DomainError("typical_set_report: p must lie in (0, 1)");
    const double n = static_cast<double>(flips);
    const double centre = n * p_heads;
    TypicalSetReport r{};
    r.flips = flips;
    r.p_heads = p_heads;
    // all-heads (or all-tails) sequence against one with N p heads: N (1 - p) swapped outcomes
    const double odds = std::max(p_heads, 1.0 - p_heads) / std::min(p_heads, 1.0 - p_heads);
    r.log10_ratio = n * std::min(p_heads, 1.0 - p_heads) * std::log10(odds);
    r.sd_binomial = std::sqrt(n * p_heads * (1.0 - p_heads));
    const auto w = binomial_window(flips, p_heads, centre, r.sd_binomial);
    r.window_lo = w.lo;
    r.window_hi = w.hi;
    r.log10_window_count = w.log10_count;
    r.window_probability = w.probability;
    r.sd_sqrt_mean = std::sqrt(centre);
    const auto alt = binomial_window(flips, p_heads, centre, r.sd_sqrt_mean);
    r.alt_window_lo = alt.lo;
    r.alt_window_hi = alt.hi;
    r.log10_alt_window_count = alt.log10_count;
    r.alt_window_probability = alt.probability;
    r.log10_entropy_count = -n * (p_heads * std::log10(p_heads) + (1.0 - p_heads) * std::log10(1.0 - p_heads));
    return r;
}

namespace {

template <typename Cdf>
double ks_statistic(std::vector<double> values, Cdf cdf) {
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace

ChiShellReport chi_shell_report(int dim, std::size_t draws, RngStream& rng, std::size_t bins) {
    if (dim < 1) throw DomainError("chi_shell_report: dimension must be >= 1");
    if (draws < 2) throw DomainError("chi_shell_report: need draws >= 2");
    std::vector<double> chi(draws);
    std::vector<double> max_abs(draws);
    for (std::size_t m = 0; m < draws; ++m) {
        double ss = 0.0;
        double mx = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double e = rng.standard_normal();
            ss += e * e;
            mx = std::max(mx, std::fabs(e));
        }
        chi[m] = std::sqrt(ss);
        max_abs[m] = mx;
    }
    ChiShellReport r{};
    r.dim = dim;
    r.draws = draws;
    r.interval_lo = chi_quantile(0.05, dim);
    r.interval_hi = chi_quantile(0.95, dim);
    r.interval_mid = 0.5 * (r.interval_lo + r.interval_hi);
    const double top = std::sqrt(static_cast<double>(dim)) + 5.0;
    r.chi_histogram = make_histogram(chi, bins, 0.0, top);
    r.max_abs_histogram = make_histogram(max_abs, bins, 0.0, 6.0);
    r.ks_chi = ks_statistic(chi, [dim](double c) { return chi_cdf(c, dim); });
    r.ks_chi_pvalue = ks_pvalue(r.ks_chi, draws);
    r.ks_max_abs = ks_statistic(max_abs, [dim](double m) { return max_abs_coord_cdf(m, dim); });
    r.ks_max_abs_pvalue = ks_pvalue(r.ks_max_abs, draws);
    return r;
}

ChiSquareDofReport chisq_dof_check(int dim, std::size_t trials, RngStream& rng) {
    if (dim < 1) throw DomainError("chisq_dof_check: dimension must be >= 1");
    if (trials < 2) throw DomainError("chisq_dof_check: need trials >= 2");
    const int split = dim / 2;
    std::vector<double> totals(trials);
    std::vector<double> eps(static_cast<std::size_t>(dim));
    double max_err = 0.0;
    for (std::size_t m = 0; m < trials; ++m) {
        for (auto& e : eps) e = rng.standard_normal();
        double first = 0.0, second = 0.0, total = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double sq = eps[static_cast<std::size_t>(i)] * eps[static_cast<std::size_t>(i)];
            total += sq;
            (i < split ? first : second) += sq;
        }
        max_err = std::max(max_err, std::fabs(first + second - total));
        totals[m] = total;
    }
    const double n = static_cast<double>(trials);
    const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    var /= n - 1.0;
    const double k = dim;
    const double sd_expected = std::sqrt(2.0 * k);
    const double kurtosis = 3.0 + 12.0 / k;
    ChiSquareDofReport r{};
    r.dim = dim;
    r.trials = trials;
    r.mean = mean;
    r.sd = std::sqrt(var);
    r.z_mean = (mean - k) / std::sqrt(2.0 * k / n);
    r.z_sd = (r.sd - sd_expected) / (sd_expected * std::sqrt((kurtosis - 1.0) / (4.0 * n)));
    r.max_half_sum_error = max_err;
    return r;
}

}  // namespace margin
