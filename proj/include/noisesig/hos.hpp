#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace noisesig {

struct LagPair {
    int t1 = 0;
    int t2 = 0;
};
using LagSet = std::vector<LagPair>;

// {(0,0),(1,0),(1,1),(2,0),(2,1),(2,2)}
const LagSet& default_lags();
int max_lag(const LagSet& lags);

// Biased third-order cumulant estimate at one lag pair, mean removed over the
// whole sequence, normalized by L' = L - max(t1,t2).
double third_cumulant(std::span<const double> z, int t1, int t2);

// All lag pairs 0..tau_max in both coordinates; exactly symmetric by
// construction (lower wedge computed, upper mirrored).
class CumulantGrid {
public:
    static CumulantGrid estimate(std::span<const double> z, int tau_max);
    // (tau_max+1)^2 row-major values; must be symmetric. Lets callers average
    // per-frame grids before a bispectrum pass.
    static CumulantGrid from_values(int tau_max, std::vector<double> v);
    int tau_max() const { return tau_max_; }
    double at(int t1, int t2) const;

private:
    CumulantGrid(int tau_max, std::vector<double> v) : tau_max_(tau_max), v_(std::move(v)) {}
    int tau_max_;
    std::vector<double> v_;  // (tau_max+1)^2 row-major
};

// Dense extension of the grid to the square [-R, R]^2 through the stationarity
// symmetries C(t1,t2) = C(t2,t1) = C(-t1, t2-t1); cells whose symmetry orbit
// leaves the estimated quadrant are zero.
struct SymmetricCumulantField {
    int radius = 0;
    std::vector<double> v;  // (2R+1)^2 row-major, (t1+R)*(2R+1) + (t2+R)
    double at(int t1, int t2) const;
};
SymmetricCumulantField symmetrize(const CumulantGrid& grid);

// 2-D DFT of the symmetrized field on a K x K grid over [0, 2pi)^2.
struct BispectrumGrid {
    std::size_t k = 0;
    std::vector<std::complex<double>> v;  // row-major, v[i1*k + i2] = B(2pi*i1/k, 2pi*i2/k)
    std::complex<double> at(std::size_t i1, std::size_t i2) const;
};
BispectrumGrid bispectrum(const CumulantGrid& grid, std::size_t k);

// sum of squared cumulants over the lag set
double cumulant_energy(const CumulantGrid& grid, const LagSet& lags);

// r0 = (1/L) sum of squared mean-removed samples
double zero_lag_autocorr(std::span<const double> z);

// cumulant energy over (r0^3 + eps)
double normalized_cumulant_energy(const CumulantGrid& grid, const LagSet& lags,
                                  double r0, double eps = 1e-12);

}  // namespace noisesig
