#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace noisesig {

// Orthonormal two-channel analysis pair. h is the lowpass; g is the
// alternating flip g[n] = (-1)^n h[L-1-n].
struct QmfPair {
    std::vector<double> h;
    std::vector<double> g;
    std::string name;
};

// Validates double-shift orthonormality of the lowpass (1e-8) and derives g.
QmfPair derive_highpass(std::vector<double> lowpass, std::string name = "custom");

const QmfPair& haar();
const QmfPair& db4();
const QmfPair& db8();
const QmfPair& filter_by_name(const std::string& name);

struct WptConfig {
    std::size_t frame_length;
    std::size_t depth;  // J >= 1, frame_length divisible by 2^J
    WptConfig(std::size_t n, std::size_t j);
};

// Full packet tree. Level j holds 2^j nodes of frame_length/2^j coefficients,
// stored contiguously; node (j,k) starts at offset k * (frame_length >> j).
// Level 0 is the input frame itself. Immutable once built.
class CoefficientTree {
public:
    CoefficientTree(std::vector<std::vector<double>> levels, std::size_t depth);

    std::size_t frame_length() const { return levels_[0].size(); }
    std::size_t depth() const { return depth_; }
    std::size_t node_length(std::size_t j) const;
    std::size_t nodes_at(std::size_t j) const;
    std::span<const double> level(std::size_t j) const;
    std::span<const double> node(std::size_t j, std::size_t k) const;

private:
    std::vector<std::vector<double>> levels_;
    std::size_t depth_;
};

CoefficientTree forward_wpt(std::span<const double> frame, const QmfPair& q, const WptConfig& cfg);

// Rebuild the frame from one whole level of coefficients (CoefficientTree layout).
std::vector<double> inverse_from_level(std::span<const double> level, std::size_t j,
                                       const QmfPair& q, const WptConfig& cfg);

// Inverse from the leaf level of the tree.
std::vector<double> inverse_wpt(const CoefficientTree& tree, const QmfPair& q);

// Time-domain atom of coefficient (j,k,u): inverse transform of a unit impulse.
std::vector<double> synthesize_atom(std::size_t j, std::size_t k, std::size_t u,
                                    const QmfPair& q, const WptConfig& cfg);

double node_energy(const CoefficientTree& tree, std::size_t j, std::size_t k);

}  // namespace noisesig
