#pragma once

// Demonstration models: each builder produces the grids, curves and summary
// statistics behind one figure-style experiment.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "margin/distributions.hpp"
#include "margin/grid.hpp"
#include "margin/profile.hpp"
#include "margin/rng.hpp"

namespace margin {

// ------------------------------------------------------------ binomial

struct BinomialDemo {
    long long trials;
    long long observed;
    double pmf_theta;
    std::vector<double> pmf;  // P(n | pmf_theta), n = 0..N
    Axis theta_axis;
    /// log_likelihood[n][i] = ln P(n | theta_i)
    std::vector<std::vector<double>> log_likelihood;
    /// ln integral P(n | theta) dtheta for each n (flat prior)
    std::vector<double> log_evidence;
    double peak_theta;  // grid argmax of the observed curve
};

/// When observed is empty it is drawn from Binomial(N, theta_true).
BinomialDemo binomial_demo(long long trials, double theta_true, std::optional<long long> observed,
                           RngStream& rng, std::size_t theta_nodes = 2001);

// ------------------------------------------------------------ common mean

struct CommonMeanDemo {
    Axis mu_axis;
    std::vector<double> log_likelihood;
    double peak;
    double posterior_sd;  // flat-prior posterior sd on the grid
    LogDensityGrid sampling_slice;  // ln p(x1, x2 | mu = peak)
};

CommonMeanDemo common_mean_demo(const Axis& mu_axis, double sigma, double x1, double x2,
                                std::size_t slice_nodes = 101);

// ------------------------------------------------------------ two-parameter geometries

struct OnOffParams {
    double d_on = 9.0;
    double d_off = 5.0;
    double sigma_on = 1.0;
    double sigma_off = 1.0;
    Range s_range{-2.0, 10.0};
    Range b_range{-6.0, 16.0};
};

TwoParamModel on_off_gaussian_model(const OnOffParams& p);

struct FlareParams {
    double s0 = 0.0;
    double sigma_s = 1.0;
    double w0 = 0.5;
    double gamma = 0.6;
    double b0 = 0.0;
    Range s_range{-4.0, 4.0};
    Range b_range{-35.0, 35.0};

    double width(double s) const { return w0 * (1.0 + gamma * (s - s_range.lo)); }
};

struct BananaParams {
    double s0 = 0.0;
    double sigma_s = 1.0;
    double kappa = 1.0;
    double sigma_b = 0.3;
    Range s_range{-3.0, 3.0};
    Range b_range{-10.0, 40.0};

    double tilt(double s) const { return 2.0 * kappa * (s - s0); }
};

/// b | s ~ N(b0, w(s)) with w linear in s. Throws DomainError if w <= 0 on s_range.
TwoParamModel flare_model(const FlareParams& p);
/// Ridge b = kappa (s - s0)^2 with slice width widened by sqrt(1 + tilt^2).
TwoParamModel banana_model(const BananaParams& p);

// ------------------------------------------------------------ Neyman-Scott

struct PairedMeasurements {
    std::vector<std::pair<double, double>> pairs;
    double true_sigma;
    std::vector<double> true_means;
};

PairedMeasurements simulate_pairs(std::size_t count, double sigma, Range mu_range, RngStream& rng);

struct NeymanScottDemo {
    PairedMeasurements data;
    Axis sigma_axis;
    /// pooled curves, each shifted so its maximum node is 0
    std::vector<double> log_profile;
    std::vector<double> log_marginal;
    double sigma_hat_profile;
    double sigma_hat_marginal;
    bool degenerate;  // every d_i = 0
    LogDensityGrid first_pair_joint;  // ln L(mu, sigma) for the first pair
};

/// Closed-form pooled curves; sigma_hat_p^2 = sum d^2 / 4N, sigma_hat_m^2 = sum d^2 / 2N.
NeymanScottDemo neyman_scott_demo(const PairedMeasurements& data, const Axis& sigma_axis,
                                  std::size_t joint_nodes = 201);

/// Per-pair two-parameter model (s = sigma, b = mu) with flat mu prior on mu_range.
TwoParamModel neyman_scott_pair_model(double x, double y, Range sigma_range, Range mu_range);

// ------------------------------------------------------------ photometry

struct ImageStamp {
    int width;
    int height;
    std::vector<long long> counts;  // row-major, height rows of width pixels
    double psf_sigma;
    double background;
    std::optional<std::array<double, 3>> truth;  // x, y, flux

    long long at(int col, int row) const { return counts[static_cast<std::size_t>(row * width + col)]; }
};

struct PhotometryParams {
    int width = 15;
    int height = 15;
    double psf_sigma = 1.0;
    double background = 100.0;
    double snr = 6.0;
    double offset_x = 0.0;  // sub-pixel offset of the source from the central pixel centre
    double offset_y = 0.0;
};

/// ln L(x, y, F) = sum_pix Poisson(n; b + F * G(pix - (x, y))), G the
/// pixel-integrated circular Gaussian PSF. -inf where any mean is <= 0.
double stamp_log_likelihood(const ImageStamp& stamp, double x, double y, double flux);

/// Flux whose Fisher-information standard error sigma_F(F) satisfies F = snr * sigma_F.
double flux_for_snr(const PhotometryParams& p);

ImageStamp simulate_stamp(const PhotometryParams& p, RngStream& rng);

struct PhotometryDemo {
    ImageStamp stamp;
    double x_hat;
    double y_hat;
    double flux_hat;
    double flux_sigma;  // Fisher standard error at the estimate
    LogDensityGrid surface;  // ln L(x, F) at y = y_hat
    double flux_peak_conditional;
    double flux_peak_marginal;
    double relative_shift;  // (conditional - marginal) / conditional
    /// area of {ln L >= max - 2} below flux_hat over the area above it
    double contour_area_ratio;
};

PhotometryDemo photometry_demo(const ImageStamp& stamp, std::size_t grid_nodes = 201);

// ------------------------------------------------------------ Dirichlet

struct DirichletGallery {
    DirichletSpec spec;
    std::vector<std::vector<double>> samples;
    std::vector<double> per_bin_max;
    std::vector<double> flatness;  // K * max_k f_k per sample
    double frac_max_above_3_over_k;
};

DirichletGallery dirichlet_prior_gallery(const DirichletSpec& spec, std::size_t samples, RngStream& rng);

struct DirichletPosterior {
    std::vector<double> concentration;
    std::vector<double> prior_pseudo_counts;  // alpha - 1 per bin
    std::vector<double> mean;
    double log_marginal_likelihood;  // Dirichlet-multinomial, with multinomial coefficient
};

DirichletPosterior multinomial_posterior(std::span<const long long> counts, const DirichletSpec& spec);

struct MomentComparison {
    std::vector<double> empirical_mean;
    std::vector<double> empirical_variance;
    double expected_mean;
    double expected_variance;
    double max_abs_z;  // over all merged bins, both moments
};

struct AggregationReport {
    int bins;
    int merged_bins;
    double total_concentration;
    std::size_t draws;
    MomentComparison consistent;  // alpha = C / K merged vs Dirichlet(C / (K/2))
    MomentComparison flat_control;  // alpha = 1 merged vs Dirichlet(1, K/2)
};

AggregationReport aggregation_consistency_check(double total_concentration, int bins, RngStream& rng,
                                                std::size_t draws);

// ------------------------------------------------------------ typical sets

struct TypicalSetReport {
    long long flips;
    double p_heads;
    double log10_ratio;  // most probable sequence vs a sequence with N p heads
    double sd_binomial;
    long long window_lo;
    long long window_hi;
    double log10_window_count;
    double window_probability;
    double sd_sqrt_mean;  // sqrt(N p), the other reading of "800 +- 28"
    long long alt_window_lo;
    long long alt_window_hi;
    double log10_alt_window_count;
    double alt_window_probability;
    double log10_entropy_count;  // N H(p) / ln 10, the size of the typical set
};

TypicalSetReport typical_set_report(long long flips, double p_heads);

struct ChiShellReport {
    int dim;
    std::size_t draws;
    double interval_lo;
    double interval_hi;
    double interval_mid;
    Histogram chi_histogram;
    Histogram max_abs_histogram;
    double ks_chi;
    double ks_chi_pvalue;
    double ks_max_abs;
    double ks_max_abs_pvalue;
};

ChiShellReport chi_shell_report(int dim, std::size_t draws, RngStream& rng, std::size_t bins = 60);

struct ChiSquareDofReport {
    int dim;
    std::size_t trials;
    double mean;
    double sd;
    double z_mean;
    double z_sd;
    double max_half_sum_error;
};

ChiSquareDofReport chisq_dof_check(int dim, std::size_t trials, RngStream& rng);

}  // namespace margin
