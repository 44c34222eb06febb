#include "noisesig/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "noisesig/rng.hpp"

namespace noisesig {

namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma series did not converge");
}

// Lentz evaluation of the upper-tail continued fraction, returns Q(a, x).
double gamma_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma fraction did not converge");
}

}  // namespace

double lower_regularized_gamma(double a, double x) {
    if (!std::isfinite(a) || a <= 0.0) throw std::invalid_argument("shape must be positive");
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("incomplete gamma argument must be nonnegative");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_fraction(a, x);
}

double chi2_cdf(std::size_t d, double x) {
    if (d < 1) throw std::invalid_argument("degrees of freedom must be at least 1");
    if (!std::isfinite(x)) throw std::invalid_argument("chi-square argument must be finite");
    if (x <= 0.0) return 0.0;
    return lower_regularized_gamma(static_cast<double>(d) / 2.0, x / 2.0);
}

double chi2_inv_cdf(std::size_t d, double p) {
    if (d < 1) throw std::invalid_argument("degrees of freedom must be at least 1");
    if (!std::isfinite(p) || p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("quantile probability must lie strictly inside (0,1)");
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(d));
    while (chi2_cdf(d, hi) < p) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("quantile bracket blew up");
    }
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 500; ++i) {
        mid = 0.5 * (lo + hi);
        const double f = chi2_cdf(d, mid);
        if (std::abs(f - p) <= 1e-10) return mid;
        if (f < p)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

double noncentral_chi2_cdf(std::size_t d, double lambda_nc, double x) {
    if (d < 1) throw std::invalid_argument("degrees of freedom must be at least 1");
    if (!std::isfinite(lambda_nc) || lambda_nc < 0.0)
        throw std::invalid_argument("noncentrality must be finite and nonnegative");
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("evaluation point must be finite and nonnegative");
    if (x == 0.0) return 0.0;
    if (lambda_nc == 0.0) return chi2_cdf(d, x);

    const double half = lambda_nc / 2.0;
    const double half_d = static_cast<double>(d) / 2.0;
    const double half_x = x / 2.0;
    auto mixture_term = [&](long i) {
        return lower_regularized_gamma(half_d + static_cast<double>(i), half_x);
    };

    // walk outwards from the Poisson mode so the big weights come first
    const long mode = static_cast<long>(half);
    const double w_mode =
        std::exp(-half + static_cast<double>(mode) * std::log(half) -
                 std::lgamma(static_cast<double>(mode) + 1.0));
    double total = w_mode * mixture_term(mode);
    double consumed = w_mode;
    double w_up = w_mode;
    double w_dn = w_mode;
    long up = mode;
    long dn = mode;
    while (consumed < 1.0 - 1e-12) {
        if (dn > 0) {
            w_dn *= static_cast<double>(dn) / half;
            --dn;
            total += w_dn * mixture_term(dn);
            consumed += w_dn;
        }
        w_up *= half / (static_cast<double>(up) + 1.0);
        ++up;
        total += w_up * mixture_term(up);
        consumed += w_up;
        if (up - mode > 200000) throw std::runtime_error("noncentral mixture did not converge");
    }
    return std::min(1.0, total);
}

double detection_probability(std::size_t d, double lambda_nc, double eta) {
    return 1.0 - noncentral_chi2_cdf(d, lambda_nc, eta);
}

DetectorConfig make_detector_config(std::size_t d, double alpha) {
    if (d < 1) throw std::invalid_argument("degrees of freedom must be at least 1");
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("false-alarm target must lie strictly inside (0,1)");
    return DetectorConfig{alpha, d, chi2_inv_cdf(d, 1.0 - alpha)};
}

MeanShiftModel mean_shift_model(std::span<const double> delta, const NominalModel& model) {
    const std::size_t d = model.dim;
    if (delta.size() != d) throw std::invalid_argument("shift/model dimension mismatch");
    double lambda_nc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        double y = 0.0;
        for (std::size_t c = 0; c <= r; ++c) y += model.whitener[r * d + c] * delta[c];
        lambda_nc += y * y;
    }
    MeanShiftModel shift;
    shift.delta.assign(delta.begin(), delta.end());
    shift.noncentrality = lambda_nc;
    return shift;
}

CusumState make_cusum(double nu, double h_c) {
    if (!std::isfinite(nu)) throw std::invalid_argument("drift must be finite");
    if (!std::isfinite(h_c) || h_c <= 0.0)
        throw std::invalid_argument("alarm threshold must be positive");
    CusumState state;
    state.drift = nu;
    state.alarm_threshold = h_c;
    return state;
}

bool cusum_step(CusumState& state, double d_sq) {
    ++state.frame_count;
    state.s = std::max(0.0, state.s + (d_sq - state.drift));
    if (!state.alarmed && state.s > state.alarm_threshold) {
        state.alarmed = true;
        state.first_alarm_frame = state.frame_count;
        return true;
    }
    return false;
}

void cusum_reset(CusumState& state) {
    state.s = 0.0;
    state.alarmed = false;
    state.first_alarm_frame = 0;
}

namespace {

double chi2_draw(Rng& rng, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < d; i += 2) acc += -2.0 * std::log(1.0 - rng.uniform());
    if (d % 2 == 1) {
        const double z = rng.normal();
        acc += z * z;
    }
    return acc;
}

constexpr std::size_t kFrameBudget = 4000000;
constexpr std::size_t kAlarmCap = 10000;
constexpr std::size_t kGridMax = 1600;
constexpr std::size_t kCoarseStride = 36;
constexpr std::uint64_t kArlChannel = 0xa71;

double grid_threshold(std::size_t k) { return 0.25 * std::pow(1.01, static_cast<double>(k)); }

struct ArlEstimate {
    double arl = 0.0;
    std::size_t alarms = 0;
    std::size_t frames = 0;
};

// One deterministic nominal stream per grid point; an alarm resets the
// accumulator, so each alarm closes an independent run.
ArlEstimate estimate_arl(std::size_t d, double nu, double h, std::uint64_t stream_seed) {
    Rng rng(stream_seed);
    double s = 0.0;
    ArlEstimate est;
    while (est.frames < kFrameBudget && est.alarms < kAlarmCap) {
        ++est.frames;
        s = std::max(0.0, s + chi2_draw(rng, d) - nu);
        if (s > h) {
            ++est.alarms;
            s = 0.0;
        }
    }
    est.arl = static_cast<double>(est.frames) /
              static_cast<double>(std::max<std::size_t>(est.alarms, 1));
    return est;
}

}  // namespace

CusumCalibration calibrate_cusum(std::size_t d, double nu, double target_arl,
                                 std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("degrees of freedom must be at least 1");
    if (!std::isfinite(nu)) throw std::invalid_argument("drift must be finite");
    if (!std::isfinite(target_arl) || target_arl < 1.0)
        throw std::invalid_argument("target average run length must be at least 1");
    if (target_arl > static_cast<double>(kFrameBudget))
        throw std::runtime_error("target average run length unreachable on the threshold grid");

    std::unordered_map<std::size_t, ArlEstimate> cache;
    auto measure = [&](std::size_t k) -> const ArlEstimate& {
        auto it = cache.find(k);
        if (it == cache.end())
            it = cache.emplace(k, estimate_arl(d, nu, grid_threshold(k),
                                               derive_seed(seed, kArlChannel, k)))
                     .first;
        return it->second;
    };

    std::size_t coarse = 0;
    bool found = false;
    for (std::size_t k = 0; k <= kGridMax; k += kCoarseStride) {
        if (measure(k).arl >= target_arl) {
            coarse = k;
            found = true;
            break;
        }
    }
    if (!found)
        throw std::runtime_error("target average run length unreachable on the threshold grid");

    std::size_t chosen = coarse;
    const std::size_t fine_lo = coarse >= kCoarseStride ? coarse - kCoarseStride + 1 : 0;
    for (std::size_t k = fine_lo; k <= coarse; ++k) {
        if (measure(k).arl >= target_arl) {
            chosen = k;
            break;
        }
    }

    const ArlEstimate& est = measure(chosen);
    CusumCalibration out;
    out.h_c = grid_threshold(chosen);
    out.grid_index = chosen;
    out.arl_estimate = est.arl;
    out.alarms = est.alarms;
    out.frames = est.frames;
    if (est.alarms > 0) {
        const double rel = 1.96 / std::sqrt(static_cast<double>(est.alarms));
        out.arl_ci_low = est.arl * std::max(0.0, 1.0 - rel);
        out.arl_ci_high = est.arl * (1.0 + rel);
    } else {
        out.arl_ci_low = est.arl;
        out.arl_ci_high = std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace noisesig
