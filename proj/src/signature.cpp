#include "noisesig/signature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <utility>

namespace noisesig {

NodeSelection leaf_selection(std::size_t depth) {
    NodeSelection sel;
    const std::size_t count = std::size_t{1} << depth;
    sel.reserve(count);
    for (std::size_t k = 0; k < count; ++k) sel.push_back({depth, k});
    return sel;
}

void validate_selection(const NodeSelection& sel, std::size_t depth) {
    if (sel.empty()) throw std::invalid_argument("node selection is empty");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& node : sel) {
        if (node.j > depth) throw std::out_of_range("selected node level exceeds tree depth");
        if (node.k >= (std::size_t{1} << node.j))
            throw std::out_of_range("selected node index out of range for its level");
        if (!seen.insert({node.j, node.k}).second)
            throw std::invalid_argument("duplicate node in selection");
    }
}

SignatureVector build_signature(const CoefficientTree& tree, const CoefficientTree& residual_tree,
                                const NodeSelection& sel, const LagSet& lags, double eps,
                                std::size_t frame_index) {
    if (tree.frame_length() != residual_tree.frame_length() ||
        tree.depth() != residual_tree.depth())
        throw std::invalid_argument("frame and residual trees disagree on geometry");
    validate_selection(sel, tree.depth());
    const int tau = max_lag(lags);
    const std::size_t m = sel.size();

    SignatureVector sig;
    sig.frame_index = frame_index;
    sig.values.assign(3 * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& node = sel[i];
        sig.values[i] = node_energy(tree, node.j, node.k);
        const auto z = residual_tree.node(node.j, node.k);
        // third_cumulant needs tau + 2 samples; shorter nodes keep zeroed features
        if (z.size() < static_cast<std::size_t>(tau) + 2) {
            sig.degenerate_nodes.push_back(i);
            continue;
        }
        const auto grid = CumulantGrid::estimate(z, tau);
        sig.values[m + i] = cumulant_energy(grid, lags);
        const double r0 = zero_lag_autocorr(z);
        sig.values[2 * m + i] = normalized_cumulant_energy(grid, lags, r0, eps);
    }
    return sig;
}

NominalModel model_from_moments(std::vector<double> mean, std::vector<double> covariance,
                                NodeSelection sel, LagSet lags, double gamma) {
    const std::size_t d = mean.size();
    if (d == 0) throw std::invalid_argument("model dimension is zero");
    if (covariance.size() != d * d) throw std::invalid_argument("covariance size mismatch");
    double max_abs = 0.0;
    for (double v : mean)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite mean entry");
    for (double v : covariance) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite covariance entry");
        max_abs = std::max(max_abs, std::abs(v));
    }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r + 1; c < d; ++c)
            if (std::abs(covariance[r * d + c] - covariance[c * d + r]) >
                1e-9 * (1.0 + max_abs))
                throw std::invalid_argument("covariance is not symmetric");

    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> cov_map(covariance.data(), static_cast<Eigen::Index>(d),
                                     static_cast<Eigen::Index>(d));
    Eigen::MatrixXd cov = 0.5 * (cov_map + cov_map.transpose());

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("covariance is not positive definite; increase gamma");
    Eigen::MatrixXd lower = llt.matrixL();
    Eigen::MatrixXd w = lower.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));

    NominalModel model;
    model.dim = d;
    model.gamma = gamma;
    model.mean = std::move(mean);
    model.selection = std::move(sel);
    model.lags = std::move(lags);
    model.covariance.resize(d * d);
    model.whitener.resize(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            model.covariance[r * d + c] =
                cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            model.whitener[r * d + c] =
                w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    return model;
}

NominalModel fit_nominal(const std::vector<SignatureVector>& sigs, double gamma,
                         NodeSelection sel, LagSet lags) {
    if (sigs.empty()) throw std::invalid_argument("no signatures to fit");
    const std::size_t d = sigs.front().values.size();
    if (d == 0) throw std::invalid_argument("zero-dimensional signatures");
    const std::size_t n = sigs.size();
    if (n < d + 1) throw std::invalid_argument("too few signatures: need at least dim + 1");
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("shrinkage must be finite and nonnegative");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < n; ++r) {
        if (sigs[r].values.size() != d)
            throw std::invalid_argument("signature dimensions disagree");
        for (std::size_t c = 0; c < d; ++c) {
            const double v = sigs[r].values[c];
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite signature entry");
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }

    Eigen::RowVectorXd mu = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mu;
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n - 1);
    double ridge_scale = cov.trace() / static_cast<double>(d);
    if (ridge_scale <= 0.0) ridge_scale = 1.0;  // degenerate cloud, absolute ridge
    cov += gamma * ridge_scale *
           Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

    std::vector<double> mean(d), covariance(d * d);
    for (std::size_t c = 0; c < d; ++c) mean[c] = mu(static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            covariance[r * d + c] =
                cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return model_from_moments(std::move(mean), std::move(covariance), std::move(sel),
                              std::move(lags), gamma);
}

double mahalanobis_sq(std::span<const double> values, const NominalModel& model) {
    const std::size_t d = model.dim;
    if (values.size() != d) throw std::invalid_argument("signature/model dimension mismatch");
    double total = 0.0;
    // whitener is lower triangular: row r only reads the first r+1 residuals
    for (std::size_t r = 0; r < d; ++r) {
        double y = 0.0;
        for (std::size_t c = 0; c <= r; ++c)
            y += model.whitener[r * d + c] * (values[c] - model.mean[c]);
        total += y * y;
    }
    return total;
}

}  // namespace noisesig
