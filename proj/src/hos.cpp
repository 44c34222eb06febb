#include "noisesig/hos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace noisesig {

namespace {

std::vector<double> centered(std::span<const double> z) {
    double mean = 0.0;
    for (double v : z) {
        if (!std::isfinite(v)) throw std::invalid_argument("cumulant input: non-finite sample");
        mean += v;
    }
    mean /= static_cast<double>(z.size());
    std::vector<double> zc(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zc[i] = z[i] - mean;
    return zc;
}

// product order fixed as zc[u] * zc[u+hi] * zc[u+lo] so (t1,t2) and (t2,t1)
// are bitwise identical
double cumulant_from_centered(const std::vector<double>& zc, int t1, int t2) {
    const int hi = std::max(t1, t2);
    const int lo = std::min(t1, t2);
    const std::size_t lp = zc.size() - static_cast<std::size_t>(hi);
    double acc = 0.0;
    for (std::size_t u = 0; u < lp; ++u) acc += zc[u] * zc[u + hi] * zc[u + lo];
    return acc / static_cast<double>(lp);
}

void check_lags(std::span<const double> z, int t1, int t2) {
    if (t1 < 0 || t2 < 0) throw std::invalid_argument("cumulant lags must be >= 0");
    const int hi = std::max(t1, t2);
    if (z.size() < 2 || hi > static_cast<int>(z.size()) - 2)
        throw std::invalid_argument("cumulant lag exceeds L - 2");
}

}  // namespace

const LagSet& default_lags() {
    static const LagSet l{{0, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}};
    return l;
}

int max_lag(const LagSet& lags) {
    if (lags.empty()) throw std::invalid_argument("lag set must be nonempty");
    int m = 0;
    for (const auto& l : lags) {
        if (l.t1 < 0 || l.t2 < 0) throw std::invalid_argument("lags must be >= 0");
        m = std::max({m, l.t1, l.t2});
    }
    return m;
}

double third_cumulant(std::span<const double> z, int t1, int t2) {
    check_lags(z, t1, t2);
    return cumulant_from_centered(centered(z), t1, t2);
}

CumulantGrid CumulantGrid::estimate(std::span<const double> z, int tau_max) {
    check_lags(z, tau_max, 0);
    const auto zc = centered(z);
    const int n = tau_max + 1;
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    for (int t1 = 0; t1 <= tau_max; ++t1)
        for (int t2 = 0; t2 <= t1; ++t2) {
            const double c = cumulant_from_centered(zc, t1, t2);
            v[static_cast<std::size_t>(t1) * n + t2] = c;
            v[static_cast<std::size_t>(t2) * n + t1] = c;
        }
    return CumulantGrid(tau_max, std::move(v));
}

CumulantGrid CumulantGrid::from_values(int tau_max, std::vector<double> v) {
    if (tau_max < 0) throw std::invalid_argument("from_values: tau_max must be >= 0");
    const std::size_t n = static_cast<std::size_t>(tau_max) + 1;
    if (v.size() != n * n) throw std::invalid_argument("from_values: size must be (tau_max+1)^2");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < a; ++b)
            if (v[a * n + b] != v[b * n + a])
                throw std::invalid_argument("from_values: grid must be symmetric");
    return CumulantGrid(tau_max, std::move(v));
}

double CumulantGrid::at(int t1, int t2) const {
    if (t1 < 0 || t2 < 0 || t1 > tau_max_ || t2 > tau_max_)
        throw std::out_of_range("CumulantGrid::at: lag outside grid");
    return v_[static_cast<std::size_t>(t1) * (tau_max_ + 1) + t2];
}

double SymmetricCumulantField::at(int t1, int t2) const {
    if (std::abs(t1) > radius || std::abs(t2) > radius)
        throw std::out_of_range("SymmetricCumulantField::at: lag outside field");
    const int side = 2 * radius + 1;
    return v[static_cast<std::size_t>(t1 + radius) * side + (t2 + radius)];
}

SymmetricCumulantField symmetrize(const CumulantGrid& grid) {
    const int r = grid.tau_max();
    const int side = 2 * r + 1;
    SymmetricCumulantField f;
    f.radius = r;
    f.v.assign(static_cast<std::size_t>(side) * side, 0.0);
    for (int s1 = -r; s1 <= r; ++s1)
        for (int s2 = -r; s2 <= r; ++s2) {
            const int cand[6][2] = {{s1, s2},           {s2, s1},
                                    {-s1, s2 - s1},     {s2 - s1, -s1},
                                    {s1 - s2, -s2},     {-s2, s1 - s2}};
            double val = 0.0;
            for (const auto& c : cand) {
                if (c[0] >= 0 && c[1] >= 0) {
                    // all nonnegative orbit images share the same max, so one
                    // bound check decides coverage
                    if (c[0] <= r && c[1] <= r) val = grid.at(c[0], c[1]);
                    break;
                }
            }
            f.v[static_cast<std::size_t>(s1 + r) * side + (s2 + r)] = val;
        }
    return f;
}

std::complex<double> BispectrumGrid::at(std::size_t i1, std::size_t i2) const {
    if (i1 >= k || i2 >= k) throw std::out_of_range("BispectrumGrid::at: index outside grid");
    return v[i1 * k + i2];
}

BispectrumGrid bispectrum(const CumulantGrid& grid, std::size_t k) {
    const int r = grid.tau_max();
    if (k < static_cast<std::size_t>(2 * r + 1))
        throw std::invalid_argument("bispectrum: grid size must be >= 2*tau_max + 1");
    const auto field = symmetrize(grid);
    BispectrumGrid b;
    b.k = k;
    b.v.assign(k * k, {0.0, 0.0});
    const double step = 2.0 * std::numbers::pi / static_cast<double>(k);
    for (std::size_t i1 = 0; i1 < k; ++i1) {
        const double w1 = step * static_cast<double>(i1);
        for (std::size_t i2 = 0; i2 < k; ++i2) {
            const double w2 = step * static_cast<double>(i2);
            std::complex<double> acc{0.0, 0.0};
            for (int s1 = -r; s1 <= r; ++s1)
                for (int s2 = -r; s2 <= r; ++s2) {
                    const double c = field.at(s1, s2);
                    if (c == 0.0) continue;
                    acc += c * std::polar(1.0, -(w1 * s1 + w2 * s2));
                }
            b.v[i1 * k + i2] = acc;
        }
    }
    return b;
}

double cumulant_energy(const CumulantGrid& grid, const LagSet& lags) {
    const int m = max_lag(lags);
    if (m > grid.tau_max()) throw std::invalid_argument("cumulant_energy: lag set exceeds grid");
    double e = 0.0;
    for (const auto& l : lags) {
        const double c = grid.at(l.t1, l.t2);
        e += c * c;
    }
    return e;
}

double zero_lag_autocorr(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("zero_lag_autocorr: empty sequence");
    const auto zc = centered(z);
    double acc = 0.0;
    for (double v : zc) acc += v * v;
    return acc / static_cast<double>(zc.size());
}

double normalized_cumulant_energy(const CumulantGrid& grid, const LagSet& lags,
                                  double r0, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("normalized_cumulant_energy: eps must be > 0");
    if (r0 < 0.0) throw std::invalid_argument("normalized_cumulant_energy: r0 must be >= 0");
    return cumulant_energy(grid, lags) / (r0 * r0 * r0 + eps);
}

}  // namespace noisesig
