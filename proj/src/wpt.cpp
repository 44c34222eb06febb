#include "noisesig/wpt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noisesig {

namespace {

void check_finite(std::span<const double> x, const char* what) {
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

// child[u] = sum_t taps[t] * parent[(2u+t) mod len], circular
void analysis_step(std::span<const double> parent, const QmfPair& q,
                   std::span<double> low, std::span<double> high) {
    const std::size_t len = parent.size();
    const std::size_t half = len / 2;
    const std::size_t taps = q.h.size();
    for (std::size_t u = 0; u < half; ++u) {
        double a = 0.0, b = 0.0;
        const std::size_t base = 2 * u;
        for (std::size_t t = 0; t < taps; ++t) {
            const double x = parent[(base + t) % len];
            a += q.h[t] * x;
            b += q.g[t] * x;
        }
        low[u] = a;
        high[u] = b;
    }
}

// adjoint of analysis_step: accumulate both children back into the parent
void synthesis_step(std::span<const double> low, std::span<const double> high,
                    const QmfPair& q, std::span<double> parent) {
    const std::size_t len = parent.size();
    const std::size_t half = len / 2;
    const std::size_t taps = q.h.size();
    std::fill(parent.begin(), parent.end(), 0.0);
    for (std::size_t u = 0; u < half; ++u) {
        const std::size_t base = 2 * u;
        for (std::size_t t = 0; t < taps; ++t)
            parent[(base + t) % len] += q.h[t] * low[u] + q.g[t] * high[u];
    }
}

}  // namespace

QmfPair derive_highpass(std::vector<double> lowpass, std::string name) {
    const std::size_t L = lowpass.size();
    if (L < 2 || L % 2 != 0)
        throw std::invalid_argument("derive_highpass: tap count must be even and >= 2");
    check_finite(lowpass, "derive_highpass");
    for (std::size_t m = 0; m < L / 2; ++m) {
        double acc = 0.0;
        for (std::size_t n = 2 * m; n < L; ++n) acc += lowpass[n] * lowpass[n - 2 * m];
        const double want = (m == 0) ? 1.0 : 0.0;
        if (std::abs(acc - want) > 1e-8)
            throw std::invalid_argument("derive_highpass: taps fail double-shift orthonormality");
    }
    QmfPair q;
    q.g.resize(L);
    for (std::size_t n = 0; n < L; ++n) {
        const double v = lowpass[L - 1 - n];
        q.g[n] = (n % 2 == 0) ? v : -v;
    }
    q.h = std::move(lowpass);
    q.name = std::move(name);
    return q;
}

const QmfPair& haar() {
    static const QmfPair q = derive_highpass(
        {0.7071067811865476, 0.7071067811865476}, "haar");
    return q;
}

const QmfPair& db4() {
    static const QmfPair q = derive_highpass(
        {0.4829629131445341, 0.8365163037378079,
         0.2241438680420134, -0.1294095225512604},
        "db4");
    return q;
}

const QmfPair& db8() {
    static const QmfPair q = derive_highpass(
        {0.23037781330885523, 0.71484657055254153,
         0.63088076792959036, -0.02798376941698385,
         -0.18703481171888114, 0.030841381835986965,
         0.032883011666982945, -0.010597401784997278},
        "db8");
    return q;
}

const QmfPair& filter_by_name(const std::string& name) {
    if (name == "haar") return haar();
    if (name == "db4") return db4();
    if (name == "db8") return db8();
    throw std::invalid_argument("unknown filter: " + name);
}

WptConfig::WptConfig(std::size_t n, std::size_t j) : frame_length(n), depth(j) {
    if (j < 1) throw std::invalid_argument("WptConfig: depth must be >= 1");
    if (j >= 64 || n == 0 || n % (std::size_t{1} << j) != 0)
        throw std::invalid_argument("WptConfig: frame_length must be a positive multiple of 2^depth");
}

CoefficientTree::CoefficientTree(std::vector<std::vector<double>> levels, std::size_t depth)
    : levels_(std::move(levels)), depth_(depth) {
    if (levels_.size() != depth_ + 1) throw std::invalid_argument("CoefficientTree: level count mismatch");
    for (const auto& lv : levels_)
        if (lv.size() != levels_[0].size())
            throw std::invalid_argument("CoefficientTree: ragged levels");
}

std::size_t CoefficientTree::node_length(std::size_t j) const {
    if (j > depth_) throw std::out_of_range("node_length: level out of range");
    return frame_length() >> j;
}

std::size_t CoefficientTree::nodes_at(std::size_t j) const {
    if (j > depth_) throw std::out_of_range("nodes_at: level out of range");
    return std::size_t{1} << j;
}

std::span<const double> CoefficientTree::level(std::size_t j) const {
    if (j > depth_) throw std::out_of_range("level: out of range");
    return levels_[j];
}

std::span<const double> CoefficientTree::node(std::size_t j, std::size_t k) const {
    if (j > depth_ || k >= nodes_at(j)) throw std::out_of_range("node: index out of range");
    const std::size_t len = node_length(j);
    return std::span<const double>(levels_[j]).subspan(k * len, len);
}

CoefficientTree forward_wpt(std::span<const double> frame, const QmfPair& q, const WptConfig& cfg) {
    if (frame.size() != cfg.frame_length)
        throw std::invalid_argument("forward_wpt: frame length does not match config");
    check_finite(frame, "forward_wpt");
    const std::size_t n = cfg.frame_length;
    std::vector<std::vector<double>> levels(cfg.depth + 1);
    levels[0].assign(frame.begin(), frame.end());
    for (std::size_t j = 1; j <= cfg.depth; ++j) {
        levels[j].resize(n);
        const std::size_t plen = n >> (j - 1);
        const std::size_t clen = plen / 2;
        for (std::size_t k = 0; k < (std::size_t{1} << (j - 1)); ++k) {
            std::span<const double> parent = std::span<const double>(levels[j - 1]).subspan(k * plen, plen);
            std::span<double> low(levels[j].data() + (2 * k) * clen, clen);
            std::span<double> high(levels[j].data() + (2 * k + 1) * clen, clen);
            analysis_step(parent, q, low, high);
        }
    }
    return CoefficientTree(std::move(levels), cfg.depth);
}

std::vector<double> inverse_from_level(std::span<const double> level, std::size_t j,
                                       const QmfPair& q, const WptConfig& cfg) {
    if (j < 1 || j > cfg.depth) throw std::invalid_argument("inverse_from_level: level out of range");
    if (level.size() != cfg.frame_length)
        throw std::invalid_argument("inverse_from_level: level size must equal frame_length");
    const std::size_t n = cfg.frame_length;
    std::vector<double> cur(level.begin(), level.end());
    std::vector<double> up(n);
    for (std::size_t jj = j; jj >= 1; --jj) {
        const std::size_t clen = n >> jj;
        const std::size_t plen = 2 * clen;
        for (std::size_t k = 0; k < (std::size_t{1} << (jj - 1)); ++k) {
            std::span<const double> low(cur.data() + (2 * k) * clen, clen);
            std::span<const double> high(cur.data() + (2 * k + 1) * clen, clen);
            std::span<double> parent(up.data() + k * plen, plen);
            synthesis_step(low, high, q, parent);
        }
        std::swap(cur, up);
    }
    return cur;
}

std::vector<double> inverse_wpt(const CoefficientTree& tree, const QmfPair& q) {
    const WptConfig cfg(tree.frame_length(), tree.depth());
    return inverse_from_level(tree.level(tree.depth()), tree.depth(), q, cfg);
}

std::vector<double> synthesize_atom(std::size_t j, std::size_t k, std::size_t u,
                                    const QmfPair& q, const WptConfig& cfg) {
    if (j < 1 || j > cfg.depth) throw std::out_of_range("synthesize_atom: level out of range");
    const std::size_t len = cfg.frame_length >> j;
    if (k >= (std::size_t{1} << j) || u >= len)
        throw std::out_of_range("synthesize_atom: coefficient index out of range");
    std::vector<double> level(cfg.frame_length, 0.0);
    level[k * len + u] = 1.0;
    return inverse_from_level(level, j, q, cfg);
}

double node_energy(const CoefficientTree& tree, std::size_t j, std::size_t k) {
    double e = 0.0;
    for (double v : tree.node(j, k)) e += v * v;
    return e;
}

}  // namespace noisesig
