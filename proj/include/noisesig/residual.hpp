#pragma once

#include <cstdint>
#include <vector>

#include "noisesig/wpt.hpp"

namespace noisesig {

struct SigmaEstimate {
    double value = 0.0;
    bool degenerate = false;  // true when the MAD collapsed to zero
};

// Robust noise scale from the first-level highpass node (1,1):
// median(|w|) / 0.6745.
SigmaEstimate estimate_sigma(const CoefficientTree& tree);

// sigma * sqrt(2 ln n); n is the frame length
double universal_threshold(double sigma, std::size_t n);

struct ThresholdPolicy {
    enum class Mode { universal, fixed };
    Mode mode = Mode::universal;
    double fixed_lambda = 0.0;  // only read when mode == fixed
};

// Keep-mask over the leaf level, laid out like CoefficientTree::level(depth).
struct LeafMask {
    std::vector<std::uint8_t> keep;  // 1 = structured side, strict |w| > lambda
    double lambda = 0.0;             // resolved threshold (+inf on degenerate sigma)
    bool degenerate_sigma = false;
};

LeafMask build_mask(const CoefficientTree& tree, const ThresholdPolicy& pol);

struct SplitResult {
    std::vector<double> structured;     // inverse of kept coefficients
    std::vector<double> residual;       // inverse of discarded coefficients
    std::vector<double> kept_leaf;      // M .* w at the leaf level
    std::vector<double> residual_leaf;  // (1 - M) .* w, feeds the cumulant stage
};

SplitResult split_and_reconstruct(const CoefficientTree& tree, const LeafMask& mask,
                                  const QmfPair& q);

// Just the masked-out leaf coefficients, for feature extraction without the
// two inverse transforms.
std::vector<double> residual_leaf_coeffs(const CoefficientTree& tree, const LeafMask& mask);

}  // namespace noisesig
