#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "noisesig/hos.hpp"
#include "noisesig/wpt.hpp"

namespace noisesig {

struct NodeRef {
    std::size_t j = 0;
    std::size_t k = 0;
    bool operator==(const NodeRef&) const = default;
};

// Ordering is part of the model: feature index i maps to selection[i % |V|].
using NodeSelection = std::vector<NodeRef>;

// All nodes at level j, in index order.
NodeSelection leaf_selection(std::size_t depth);

// Nonempty, no duplicates, every node valid for the given depth.
void validate_selection(const NodeSelection& sel, std::size_t depth);

struct SignatureVector {
    std::vector<double> values;  // [energy block | cumulant-energy block | normalized block]
    std::size_t frame_index = 0;
    // Selection indices whose residual sequence was too short for the lag set.
    // Their cumulant features are zeroed instead of failing the frame.
    std::vector<std::size_t> degenerate_nodes;

    bool degenerate() const { return !degenerate_nodes.empty(); }
};

// tree holds the full frame coefficients, residual_tree the coefficients of the
// residual reconstruction. Energies come from the former, cumulant features from
// the latter. Both trees must share geometry.
SignatureVector build_signature(const CoefficientTree& tree, const CoefficientTree& residual_tree,
                                const NodeSelection& sel, const LagSet& lags, double eps = 1e-12,
                                std::size_t frame_index = 0);

struct NominalModel {
    std::vector<double> mean;        // d
    std::vector<double> covariance;  // d*d row-major, shrinkage included
    std::vector<double> whitener;    // d*d row-major lower triangular, W^T W = covariance^{-1}
    double gamma = 0.0;
    std::size_t dim = 0;
    NodeSelection selection;  // snapshot for persistence, not revalidated here
    LagSet lags;
};

// Builds the whitener via Cholesky. Covariance must be finite, symmetric and
// positive definite; throws with a hint to raise gamma otherwise.
NominalModel model_from_moments(std::vector<double> mean, std::vector<double> covariance,
                                NodeSelection sel, LagSet lags, double gamma);

// mean = sample mean, covariance = unbiased sample covariance plus
// gamma * trace/d ridge (absolute scale 1 when the trace vanishes, so identical
// inputs still yield a usable model). Needs at least d+1 signatures.
NominalModel fit_nominal(const std::vector<SignatureVector>& sigs, double gamma,
                         NodeSelection sel = {}, LagSet lags = {});

double mahalanobis_sq(std::span<const double> values, const NominalModel& model);

inline double mahalanobis_sq(const SignatureVector& f, const NominalModel& model) {
    return mahalanobis_sq(std::span<const double>(f.values), model);
}

}  // namespace noisesig
