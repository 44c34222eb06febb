#include "noisesig/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noisesig {

namespace {

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

}  // namespace

SigmaEstimate estimate_sigma(const CoefficientTree& tree) {
    auto hp = tree.node(1, 1);
    std::vector<double> mag(hp.size());
    for (std::size_t i = 0; i < hp.size(); ++i) mag[i] = std::abs(hp[i]);
    const double mad = median_inplace(mag);
    SigmaEstimate est;
    est.value = mad / 0.6745;
    est.degenerate = (est.value == 0.0);
    return est;
}

double universal_threshold(double sigma, std::size_t n) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw std::invalid_argument("universal_threshold: sigma must be finite and >= 0");
    if (n < 2) throw std::invalid_argument("universal_threshold: n must be >= 2");
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

LeafMask build_mask(const CoefficientTree& tree, const ThresholdPolicy& pol) {
    LeafMask m;
    switch (pol.mode) {
        case ThresholdPolicy::Mode::universal: {
            const SigmaEstimate est = estimate_sigma(tree);
            if (est.degenerate) {
                // no resolvable noise floor: discard everything into the residual
                m.lambda = std::numeric_limits<double>::infinity();
                m.degenerate_sigma = true;
            } else {
                m.lambda = universal_threshold(est.value, tree.frame_length());
            }
            break;
        }
        case ThresholdPolicy::Mode::fixed:
            if (pol.fixed_lambda < 0.0 || !std::isfinite(pol.fixed_lambda))
                throw std::invalid_argument("build_mask: fixed lambda must be finite and >= 0");
            m.lambda = pol.fixed_lambda;
            break;
    }
    auto leaf = tree.level(tree.depth());
    m.keep.resize(leaf.size());
    for (std::size_t i = 0; i < leaf.size(); ++i)
        m.keep[i] = std::abs(leaf[i]) > m.lambda ? 1 : 0;
    return m;
}

std::vector<double> residual_leaf_coeffs(const CoefficientTree& tree, const LeafMask& mask) {
    auto leaf = tree.level(tree.depth());
    if (mask.keep.size() != leaf.size())
        throw std::invalid_argument("residual_leaf_coeffs: mask length mismatch");
    std::vector<double> out(leaf.size());
    for (std::size_t i = 0; i < leaf.size(); ++i) out[i] = mask.keep[i] ? 0.0 : leaf[i];
    return out;
}

SplitResult split_and_reconstruct(const CoefficientTree& tree, const LeafMask& mask,
                                  const QmfPair& q) {
    auto leaf = tree.level(tree.depth());
    if (mask.keep.size() != leaf.size())
        throw std::invalid_argument("split_and_reconstruct: mask length mismatch");
    SplitResult r;
    r.kept_leaf.resize(leaf.size());
    r.residual_leaf.resize(leaf.size());
    for (std::size_t i = 0; i < leaf.size(); ++i) {
        r.kept_leaf[i] = mask.keep[i] ? leaf[i] : 0.0;
        r.residual_leaf[i] = mask.keep[i] ? 0.0 : leaf[i];
    }
    const WptConfig cfg(tree.frame_length(), tree.depth());
    r.structured = inverse_from_level(r.kept_leaf, tree.depth(), q, cfg);
    r.residual = inverse_from_level(r.residual_leaf, tree.depth(), q, cfg);
    return r;
}

}  // namespace noisesig
