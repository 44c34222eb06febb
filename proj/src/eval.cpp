#include "noisesig/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "noisesig/rng.hpp"
#include "noisesig/signature.hpp"
#include "noisesig/textio.hpp"

namespace noisesig {

namespace {

struct ClassCounts {
    std::size_t pos = 0;
    std::size_t neg = 0;
};

ClassCounts validate_dataset(const ScoredDataset& ds) {
    if (ds.scores.empty()) throw std::invalid_argument("scored dataset is empty");
    if (ds.scores.size() != ds.labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    ClassCounts c;
    for (std::size_t i = 0; i < ds.scores.size(); ++i) {
        if (!std::isfinite(ds.scores[i])) throw std::invalid_argument("score is not finite");
        if (ds.labels[i] > 1) throw std::invalid_argument("labels must be 0 or 1");
        ++(ds.labels[i] ? c.pos : c.neg);
    }
    return c;
}

struct SweepStep {
    double threshold;  // predict positive when score >= threshold
    std::size_t tp;
    std::size_t fp;
};

// One step per distinct score, descending, with cumulative confusion counts.
std::vector<SweepStep> threshold_sweep(const ScoredDataset& ds) {
    std::vector<std::size_t> order(ds.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ds.scores[a] > ds.scores[b]; });

    std::vector<SweepStep> steps;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = ds.scores[order[i]];
        while (i < order.size() && ds.scores[order[i]] == s) {
            ++(ds.labels[order[i]] ? tp : fp);
            ++i;
        }
        steps.push_back({s, tp, fp});
    }
    return steps;
}

double trapezoid(const std::vector<CurvePoint>& pts) {
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += (pts[i].x - pts[i - 1].x) * (pts[i].y + pts[i - 1].y) * 0.5;
    return area;
}

double interpolate_at(const std::vector<CurvePoint>& pts, double x) {
    if (x <= pts.front().x) return pts.front().y;
    if (x >= pts.back().x) return pts.back().y;
    const auto it = std::lower_bound(pts.begin(), pts.end(), x,
                                     [](const CurvePoint& p, double v) { return p.x < v; });
    if (it->x == x) return it->y;
    const auto lo = it - 1;
    const double t = (x - lo->x) / (it->x - lo->x);
    return lo->y + t * (it->y - lo->y);
}

double nearest_rank(std::vector<double>& v, double p) {
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    if (rank == 0) rank = 1;
    if (rank > v.size()) rank = v.size();
    return v[rank - 1];
}

}  // namespace

CurveReport roc_curve(const ScoredDataset& ds) {
    const auto c = validate_dataset(ds);
    if (c.pos == 0 || c.neg == 0)
        throw std::invalid_argument("ROC needs both classes present");
    const auto steps = threshold_sweep(ds);

    CurveReport rep;
    rep.kind = MetricKind::roc;
    rep.points.reserve(steps.size() + 1);
    rep.points.push_back({0.0, 0.0});
    for (const auto& s : steps)
        rep.points.push_back({static_cast<double>(s.fp) / static_cast<double>(c.neg),
                              static_cast<double>(s.tp) / static_cast<double>(c.pos)});
    rep.auc = trapezoid(rep.points);
    return rep;
}

CurveReport pr_curve(const ScoredDataset& ds) {
    const auto c = validate_dataset(ds);
    if (c.pos == 0 || c.neg == 0)
        throw std::invalid_argument("PR needs both classes present");
    const auto steps = threshold_sweep(ds);

    CurveReport rep;
    rep.kind = MetricKind::pr;
    rep.points.reserve(steps.size() + 1);
    rep.points.push_back({0.0, 1.0});
    for (const auto& s : steps)
        rep.points.push_back({static_cast<double>(s.tp) / static_cast<double>(c.pos),
                              static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp)});
    rep.auc = trapezoid(rep.points);
    return rep;
}

F1Report f1_best(const ScoredDataset& ds) {
    const auto c = validate_dataset(ds);
    if (c.pos == 0) throw std::invalid_argument("F1 sweep needs at least one positive");
    if (c.neg == 0) {
        // Everything predicted positive is the only sensible operating point.
        F1Report rep;
        rep.precision = rep.recall = rep.f1 = 1.0;
        rep.threshold = *std::min_element(ds.scores.begin(), ds.scores.end());
        rep.degenerate = true;
        return rep;
    }

    const auto steps = threshold_sweep(ds);
    F1Report best;
    best.f1 = -1.0;
    for (const auto& s : steps) {
        const std::size_t fn = c.pos - s.tp;
        const double f1 =
            2.0 * static_cast<double>(s.tp) / static_cast<double>(2 * s.tp + s.fp + fn);
        if (f1 > best.f1) {  // strict: the sweep is descending, so ties keep the higher threshold
            best.f1 = f1;
            best.threshold = s.threshold;
            best.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
            best.recall = static_cast<double>(s.tp) / static_cast<double>(c.pos);
        }
    }
    return best;
}

CurveReport latency_cdf(const std::vector<LatencyObservation>& obs) {
    if (obs.empty()) throw std::invalid_argument("latency CDF needs at least one stream");
    std::vector<double> latencies;
    latencies.reserve(obs.size());
    for (const auto& o : obs)
        if (o.alarmed)
            latencies.push_back(static_cast<double>(o.alarm_frame) -
                                static_cast<double>(o.onset_frame));
    std::sort(latencies.begin(), latencies.end());

    CurveReport rep;
    rep.kind = MetricKind::latency_cdf;
    const auto total = static_cast<double>(obs.size());
    rep.censored_mass = (total - static_cast<double>(latencies.size())) / total;
    std::size_t i = 0;
    while (i < latencies.size()) {
        const double v = latencies[i];
        while (i < latencies.size() && latencies[i] == v) ++i;
        rep.points.push_back({v, static_cast<double>(i) / total});
    }
    return rep;
}

CurveReport run_bands(const std::vector<CurveReport>& runs) {
    if (runs.size() < 2) throw std::invalid_argument("band needs at least two runs");
    for (const auto& r : runs) {
        if (r.kind != runs.front().kind)
            throw std::invalid_argument("band runs mix metric kinds");
        if (r.points.empty()) throw std::invalid_argument("band run has no points");
    }

    double lo = runs.front().points.front().x;
    double hi = runs.front().points.back().x;
    for (const auto& r : runs) {
        lo = std::min(lo, r.points.front().x);
        hi = std::max(hi, r.points.back().x);
    }

    CurveReport rep;
    rep.kind = runs.front().kind;
    const std::size_t grid = (hi > lo) ? 512 : 1;
    rep.points.reserve(grid);
    rep.band_low.reserve(grid);
    rep.band_high.reserve(grid);
    std::vector<double> column(runs.size());
    for (std::size_t g = 0; g < grid; ++g) {
        const double x =
            (grid == 1) ? lo : lo + (hi - lo) * static_cast<double>(g) / 511.0;
        for (std::size_t r = 0; r < runs.size(); ++r)
            column[r] = interpolate_at(runs[r].points, x);
        const double mean =
            std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(runs.size());
        rep.points.push_back({x, mean});
        rep.band_low.push_back(nearest_rank(column, 0.05));
        rep.band_high.push_back(nearest_rank(column, 0.95));
    }
    if (rep.kind != MetricKind::latency_cdf) rep.auc = trapezoid(rep.points);
    double censored = 0.0;
    for (const auto& r : runs) censored += r.censored_mass;
    rep.censored_mass = censored / static_cast<double>(runs.size());
    return rep;
}

double false_alarm_rate_per_unit(double fpr, double frame_rate) {
    if (!std::isfinite(fpr) || fpr < 0.0 || fpr > 1.0)
        throw std::invalid_argument("fpr must lie in [0, 1]");
    if (!std::isfinite(frame_rate) || frame_rate < 0.0)
        throw std::invalid_argument("frame_rate must be >= 0");
    return fpr * frame_rate;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::wpt_hos: return "wpt_hos";
        case Method::wpt_only: return "wpt_only";
        case Method::hos_only: return "hos_only";
        case Method::second_order_only: return "second_order_only";
        case Method::single_source: return "single_source";
        case Method::fused_source: return "fused_source";
    }
    throw std::invalid_argument("unknown method");
}

Method method_from_name(const std::string& name) {
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    throw std::invalid_argument("unknown method name: " + name);
}

std::vector<Method> all_methods() {
    return {Method::wpt_hos,           Method::wpt_only,      Method::hos_only,
            Method::second_order_only, Method::single_source, Method::fused_source};
}

std::vector<double> method_features(std::span<const double> frame, Method m, const QmfPair& q,
                                    const WptConfig& cfg, const HarnessConfig& hc) {
    const LagSet& lags = hc.lags.empty() ? default_lags() : hc.lags;
    if (m == Method::hos_only) {
        const auto grid = CumulantGrid::estimate(frame, max_lag(lags));
        const double e = cumulant_energy(grid, lags);
        const double r0 = zero_lag_autocorr(frame);
        return {e, normalized_cumulant_energy(grid, lags, r0, hc.eps)};
    }

    const auto tree = forward_wpt(frame, q, cfg);
    const auto sel = leaf_selection(tree.depth());
    if (m == Method::wpt_only) {
        std::vector<double> feats;
        feats.reserve(sel.size());
        for (const auto& node : sel) feats.push_back(node_energy(tree, node.j, node.k));
        return feats;
    }

    const auto mask = build_mask(tree, hc.policy);
    const auto split = split_and_reconstruct(tree, mask, q);
    const auto rtree = forward_wpt(split.residual, q, cfg);
    if (m == Method::second_order_only) {
        std::vector<double> feats;
        feats.reserve(2 * sel.size());
        for (const auto& node : sel) feats.push_back(node_energy(tree, node.j, node.k));
        for (const auto& node : sel) feats.push_back(zero_lag_autocorr(rtree.node(node.j, node.k)));
        return feats;
    }
    return build_signature(tree, rtree, sel, lags, hc.eps).values;
}

namespace {

std::vector<SignatureVector> wrap_features(const LabeledStream& stream, Method m,
                                           const QmfPair& q, const WptConfig& cfg,
                                           const HarnessConfig& hc) {
    std::vector<SignatureVector> sigs;
    sigs.reserve(stream.frames.size());
    for (std::size_t f = 0; f < stream.frames.size(); ++f) {
        SignatureVector sv;
        sv.values = method_features(stream.frames[f], m, q, cfg, hc);
        sv.frame_index = f;
        sigs.push_back(std::move(sv));
    }
    return sigs;
}

}  // namespace

std::vector<MethodRow> ablation_table(const ScenarioSpec& scenario,
                                      const std::vector<Method>& methods,
                                      const HarnessConfig& hc) {
    if (methods.empty()) throw std::invalid_argument("no methods requested");
    if (scenario.frames < 2) throw std::invalid_argument("harness needs at least two frames");
    const auto& q = filter_by_name(hc.filter);
    const WptConfig cfg(scenario.frame_length, hc.levels);

    const auto source_a = generate(scenario, 0);
    const auto source_b = generate(scenario, 1);
    const auto fused = fuse(source_a, source_b);

    std::vector<std::uint8_t> labels = fused.labels;
    if (scenario.anomaly.kind == AnomalyKind::none) {
        // Chance-level check: mark the tail positive so the sweep has two classes.
        const std::size_t onset =
            (scenario.onset_frame > 0 && scenario.onset_frame < scenario.frames)
                ? scenario.onset_frame
                : scenario.frames / 2;
        for (std::size_t f = onset; f < labels.size(); ++f) labels[f] = 1;
    }

    ScenarioSpec train_spec = scenario;
    train_spec.anomaly = AnomalySpec{};
    train_spec.onset_frame = 0;
    train_spec.frames = hc.train_frames;
    train_spec.seed = derive_seed(scenario.seed, 0x31a);
    const auto train_a = generate(train_spec, 0);
    const auto train_b = generate(train_spec, 1);
    const auto train_fused = fuse(train_a, train_b);

    std::vector<MethodRow> rows;
    rows.reserve(methods.size());
    for (Method m : methods) {
        const auto& train_stream = (m == Method::single_source) ? train_a : train_fused;
        const auto& eval_stream = (m == Method::single_source) ? source_a : fused;

        const auto train_sigs = wrap_features(train_stream, m, q, cfg, hc);
        const auto model = fit_nominal(train_sigs, hc.gamma);

        ScoredDataset ds;
        ds.labels = labels;
        ds.scores.reserve(eval_stream.frames.size());
        for (const auto& frame : eval_stream.frames)
            ds.scores.push_back(
                mahalanobis_sq(method_features(frame, m, q, cfg, hc), model));

        const auto roc = roc_curve(ds);
        const auto pr = pr_curve(ds);
        const auto f1 = f1_best(ds);
        rows.push_back({m, roc.auc, pr.auc, f1.precision, f1.recall, f1.f1});
    }
    return rows;
}

std::string curve_to_csv(const CurveReport& report) {
    std::string out = "x,mean,band_low,band_high\n";
    out.reserve(out.size() + report.points.size() * 40);
    const bool banded = report.band_low.size() == report.points.size() &&
                        report.band_high.size() == report.points.size();
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        append_double(out, report.points[i].x);
        out.push_back(',');
        append_double(out, report.points[i].y);
        out.push_back(',');
        append_double(out, banded ? report.band_low[i] : report.points[i].y);
        out.push_back(',');
        append_double(out, banded ? report.band_high[i] : report.points[i].y);
        out.push_back('\n');
    }
    return out;
}

std::string ablation_to_text(const std::vector<MethodRow>& rows) {
    std::size_t width = std::string("method").size();
    for (const auto& r : rows) width = std::max(width, method_name(r.method).size());

    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %9s  %9s  %9s\n",
                  static_cast<int>(width), "method", "roc_auc", "pr_auc", "precision", "recall",
                  "f1");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s  %9.4f  %9.4f  %9.4f  %9.4f  %9.4f\n",
                      static_cast<int>(width), method_name(r.method).c_str(), r.roc_auc, r.pr_auc,
                      r.precision, r.recall, r.f1);
        out += buf;
    }
    return out;
}

std::string ablation_to_json(const std::vector<MethodRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"method", method_name(r.method)},
                       {"roc_auc", r.roc_auc},
                       {"pr_auc", r.pr_auc},
                       {"precision", r.precision},
                       {"recall", r.recall},
                       {"f1", r.f1}});
    return arr.dump(2) + "\n";
}

ScenarioSpec benchmark_scenario(std::uint64_t seed, ShiftRegime regime, std::size_t frame_length) {
    ScenarioSpec s;
    s.frame_length = frame_length;
    s.frames = 400;
    s.seed = seed;
    s.structured = {{0.07, 0.8, 0.4}};
    s.baseline_slope = 0.4;
    s.noise_sigma = 1.0;
    s.anomaly.kind = AnomalyKind::skewed_impulsive;
    s.anomaly.rate = 0.005;
    s.anomaly.skew_scale = 4.0;
    s.onset_frame = 200;
    s.regime = regime;
    return s;
}

std::vector<RegimeRow> domain_shift_table(const ScenarioSpec& base_scenario, std::size_t runs,
                                          const std::vector<Method>& methods,
                                          const HarnessConfig& hc) {
    if (runs == 0) throw std::invalid_argument("need at least one run");
    if (methods.empty()) throw std::invalid_argument("no methods requested");

    const ShiftRegime regimes[] = {ShiftRegime::matched, ShiftRegime::mild, ShiftRegime::moderate,
                                   ShiftRegime::severe};
    std::vector<RegimeRow> rows;
    rows.reserve(std::size(regimes));
    for (ShiftRegime regime : regimes) {
        RegimeRow row;
        row.regime = regime;
        row.methods = methods;
        row.mean_auc.assign(methods.size(), 0.0);
        for (std::size_t r = 0; r < runs; ++r) {
            ScenarioSpec spec = base_scenario;
            spec.seed = base_scenario.seed + r;
            spec.regime = regime;
            const auto table = ablation_table(spec, methods, hc);
            for (std::size_t m = 0; m < methods.size(); ++m)
                row.mean_auc[m] += table[m].roc_auc;
        }
        for (double& v : row.mean_auc) v /= static_cast<double>(runs);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string domain_shift_to_csv(const std::vector<RegimeRow>& rows) {
    std::string out = "regime,method,mean_roc_auc\n";
    for (const auto& row : rows)
        for (std::size_t m = 0; m < row.methods.size(); ++m) {
            out += regime_name(row.regime);
            out.push_back(',');
            out += method_name(row.methods[m]);
            out.push_back(',');
            append_double(out, row.mean_auc[m]);
            out.push_back('\n');
        }
    return out;
}

std::string domain_shift_to_text(const std::vector<RegimeRow>& rows) {
    if (rows.empty()) return "";
    std::size_t width = std::string("regime").size();
    for (const auto& row : rows) width = std::max(width, std::strlen(regime_name(row.regime)));

    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), "regime");
    out += buf;
    for (Method m : rows.front().methods) {
        std::snprintf(buf, sizeof buf, "  %17s", method_name(m).c_str());
        out += buf;
    }
    out.push_back('\n');
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), regime_name(row.regime));
        out += buf;
        for (double v : row.mean_auc) {
            std::snprintf(buf, sizeof buf, "  %17.4f", v);
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

std::string domain_shift_to_json(const std::vector<RegimeRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json entry;
        entry["regime"] = regime_name(row.regime);
        for (std::size_t m = 0; m < row.methods.size(); ++m)
            entry[method_name(row.methods[m])] = row.mean_auc[m];
        arr.push_back(std::move(entry));
    }
    return arr.dump(2) + "\n";
}

}  // namespace noisesig
