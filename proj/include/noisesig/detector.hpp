#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "noisesig/signature.hpp"

namespace noisesig {

// Regularized lower incomplete gamma P(a, x): series for x < a+1, Lentz
// continued fraction otherwise.
double lower_regularized_gamma(double a, double x);

double chi2_cdf(std::size_t d, double x);

// p-quantile of the central chi-square law; bracketed bisection until
// |F(eta) - p| <= 1e-10.
double chi2_inv_cdf(std::size_t d, double p);

// Poisson mixture of central CDFs, truncated when the unconsumed Poisson mass
// drops below 1e-12; absolute error <= 1e-9.
double noncentral_chi2_cdf(std::size_t d, double lambda_nc, double x);

double detection_probability(std::size_t d, double lambda_nc, double eta);

struct DetectorConfig {
    double alpha = 0.0;
    std::size_t dim = 0;
    double eta = 0.0;
};

DetectorConfig make_detector_config(std::size_t d, double alpha);

// Strict: a score exactly at the threshold stays nominal.
inline bool decide(double d_sq, const DetectorConfig& cfg) { return d_sq > cfg.eta; }

struct MeanShiftModel {
    std::vector<double> delta;
    double noncentrality = 0.0;  // delta' * covariance^{-1} * delta
};

MeanShiftModel mean_shift_model(std::span<const double> delta, const NominalModel& model);

// Nominal mean of the score is dim; the +1 margin keeps the nominal drift negative.
inline double default_drift(std::size_t dim) { return static_cast<double>(dim) + 1.0; }

struct CusumState {
    double s = 0.0;
    double drift = 0.0;            // nu
    double alarm_threshold = 0.0;  // h_c
    std::size_t frame_count = 0;
    bool alarmed = false;
    std::size_t first_alarm_frame = 0;  // 1-based frame count at the crossing, 0 if none
};

CusumState make_cusum(double nu, double h_c);

// S <- max(0, S + (d_sq - nu)). Returns true exactly once, on the first
// crossing above the alarm threshold; the accumulator keeps running afterwards.
bool cusum_step(CusumState& state, double d_sq);

// Clears the accumulator and the alarm latch; the frame counter keeps its
// stream position.
void cusum_reset(CusumState& state);

struct CusumCalibration {
    double h_c = 0.0;
    double arl_estimate = 0.0;
    double arl_ci_low = 0.0;
    double arl_ci_high = 0.0;
    std::size_t alarms = 0;
    std::size_t frames = 0;
    std::size_t grid_index = 0;
};

// Smallest threshold on the fixed geometric grid 0.25 * 1.01^k whose simulated
// nominal average run length reaches target_arl. Each grid point is estimated
// from its own deterministic chi-square stream (renewal resets on alarm, up to
// 10000 alarms or 4e6 frames), so the selection is reproducible and larger
// targets never pick a smaller threshold.
CusumCalibration calibrate_cusum(std::size_t d, double nu, double target_arl,
                                 std::uint64_t seed = 0x43a11b);

}  // namespace noisesig
