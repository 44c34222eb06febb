#include "noisesig/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "noisesig/rng.hpp"
#include "noisesig/textio.hpp"

namespace noisesig {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

ojson parse_document(const std::string& text, const char* what) {
    ojson j = ojson::parse(text, nullptr, false);
    if (j.is_discarded()) config_fail(std::string(what) + " is not valid JSON");
    if (!j.is_object()) config_fail(std::string(what) + " must be a JSON object");
    return j;
}

void reject_unknown_keys(const ojson& j, std::initializer_list<const char*> allowed,
                         const char* what) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) config_fail(std::string(what) + ": unknown key '" + item.key() + "'");
    }
}

double get_number(const ojson& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) config_fail(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

std::size_t get_size(const ojson& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned())
        config_fail(std::string("'") + key + "' must be a nonnegative integer");
    return j[key].get<std::size_t>();
}

std::string get_string(const ojson& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) config_fail(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
}

bool get_bool(const ojson& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) config_fail(std::string("'") + key + "' must be a boolean");
    return j[key].get<bool>();
}

ojson pairs_to_json(const NodeSelection& sel) {
    ojson arr = ojson::array();
    for (const auto& n : sel) arr.push_back({n.j, n.k});
    return arr;
}

ojson pairs_to_json(const LagSet& lags) {
    ojson arr = ojson::array();
    for (const auto& l : lags) arr.push_back({l.t1, l.t2});
    return arr;
}

NodeSelection selection_from_json(const ojson& arr) {
    if (!arr.is_array()) config_fail("'selection' must be an array of [level, index] pairs");
    NodeSelection sel;
    sel.reserve(arr.size());
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
            !e[1].is_number_unsigned())
            config_fail("'selection' entries must be [level, index] pairs of nonnegative integers");
        sel.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
    }
    return sel;
}

LagSet lags_from_json(const ojson& arr) {
    if (!arr.is_array()) config_fail("'lags' must be an array of [t1, t2] pairs");
    LagSet lags;
    lags.reserve(arr.size());
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            config_fail("'lags' entries must be [t1, t2] integer pairs");
        lags.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return lags;
}

const char* policy_mode_name(ThresholdPolicy::Mode m) {
    return m == ThresholdPolicy::Mode::universal ? "universal" : "fixed";
}

}  // namespace

void validate_config(const PipelineConfig& cfg) {
    try {
        filter_by_name(cfg.filter);
    } catch (const std::exception&) {
        config_fail("unknown filter '" + cfg.filter + "'");
    }
    if (cfg.levels == 0) config_fail("levels must be at least 1");
    if (cfg.levels >= 64 || (std::size_t{1} << cfg.levels) > cfg.frame_length)
        config_fail("frame_length too short for the requested depth");
    if (cfg.frame_length % (std::size_t{1} << cfg.levels) != 0)
        config_fail("frame_length must be divisible by 2^levels");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) config_fail("alpha must lie strictly in (0, 1)");
    if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) config_fail("eps must be positive");
    if (cfg.gamma < 0.0 || !std::isfinite(cfg.gamma)) config_fail("gamma must be nonnegative");
    if (cfg.nu < 0.0 || !std::isfinite(cfg.nu)) config_fail("nu must be nonnegative");
    if (!(cfg.h_c > 0.0) || !std::isfinite(cfg.h_c)) config_fail("h_c must be positive");
    if (cfg.policy.mode == ThresholdPolicy::Mode::fixed &&
        (cfg.policy.fixed_lambda < 0.0 || !std::isfinite(cfg.policy.fixed_lambda)))
        config_fail("fixed threshold must be a nonnegative finite value");
    if (!cfg.selection.empty()) {
        try {
            validate_selection(cfg.selection, cfg.levels);
        } catch (const std::exception& e) {
            config_fail(std::string("bad node selection: ") + e.what());
        }
    }
    for (const auto& l : cfg.lags)
        if (l.t1 < 0 || l.t2 < 0) config_fail("lags must be nonnegative");
}

NodeSelection resolved_selection(const PipelineConfig& cfg) {
    return cfg.selection.empty() ? leaf_selection(cfg.levels) : cfg.selection;
}

const LagSet& resolved_lags(const PipelineConfig& cfg) {
    return cfg.lags.empty() ? default_lags() : cfg.lags;
}

std::string config_to_json(const PipelineConfig& cfg) {
    ojson j;
    j["filter"] = cfg.filter;
    j["levels"] = cfg.levels;
    j["frame_length"] = cfg.frame_length;
    j["threshold"] = ojson{{"mode", policy_mode_name(cfg.policy.mode)},
                           {"lambda", cfg.policy.fixed_lambda}};
    j["selection"] = pairs_to_json(cfg.selection);
    j["lags"] = pairs_to_json(cfg.lags);
    j["eps"] = cfg.eps;
    j["gamma"] = cfg.gamma;
    j["alpha"] = cfg.alpha;
    j["nu"] = cfg.nu;
    j["h_c"] = cfg.h_c;
    j["seed"] = cfg.seed;
    j["paths"] = ojson{{"input", cfg.input_path},
                       {"output", cfg.output_path},
                       {"model", cfg.model_path},
                       {"labels", cfg.labels_path}};
    return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text, bool* seed_in_file) {
    const ojson j = parse_document(text, "config");
    reject_unknown_keys(j,
                        {"filter", "levels", "frame_length", "threshold", "selection", "lags",
                         "eps", "gamma", "alpha", "nu", "h_c", "seed", "paths"},
                        "config");

    PipelineConfig cfg;
    cfg.filter = get_string(j, "filter", cfg.filter);
    cfg.levels = get_size(j, "levels", cfg.levels);
    cfg.frame_length = get_size(j, "frame_length", cfg.frame_length);
    if (j.contains("threshold")) {
        const ojson& t = j["threshold"];
        if (!t.is_object()) config_fail("'threshold' must be an object");
        reject_unknown_keys(t, {"mode", "lambda"}, "threshold");
        const std::string mode = get_string(t, "mode", "universal");
        if (mode == "universal")
            cfg.policy.mode = ThresholdPolicy::Mode::universal;
        else if (mode == "fixed")
            cfg.policy.mode = ThresholdPolicy::Mode::fixed;
        else
            config_fail("threshold mode must be 'universal' or 'fixed'");
        cfg.policy.fixed_lambda = get_number(t, "lambda", 0.0);
    }
    if (j.contains("selection")) cfg.selection = selection_from_json(j["selection"]);
    if (j.contains("lags")) cfg.lags = lags_from_json(j["lags"]);
    cfg.eps = get_number(j, "eps", cfg.eps);
    cfg.gamma = get_number(j, "gamma", cfg.gamma);
    cfg.alpha = get_number(j, "alpha", cfg.alpha);
    cfg.nu = get_number(j, "nu", cfg.nu);
    cfg.h_c = get_number(j, "h_c", cfg.h_c);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            config_fail("'seed' must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
        if (seed_in_file) *seed_in_file = true;
    } else if (seed_in_file) {
        *seed_in_file = false;
    }
    if (j.contains("paths")) {
        const ojson& p = j["paths"];
        if (!p.is_object()) config_fail("'paths' must be an object");
        reject_unknown_keys(p, {"input", "output", "model", "labels"}, "paths");
        cfg.input_path = get_string(p, "input", "");
        cfg.output_path = get_string(p, "output", "");
        cfg.model_path = get_string(p, "model", "");
        cfg.labels_path = get_string(p, "labels", "");
    }
    validate_config(cfg);
    return cfg;
}

namespace {

void hash_bytes(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
}

}  // namespace

std::uint64_t config_hash(const PipelineConfig& cfg) {
    std::string canon = "filter=" + cfg.filter;
    canon += ";levels=" + std::to_string(cfg.levels);
    canon += ";n=" + std::to_string(cfg.frame_length);
    canon += ";mode=" + std::string(policy_mode_name(cfg.policy.mode));
    canon += ";lambda=" + format_double(cfg.policy.fixed_lambda);
    canon += ";sel=";
    for (const auto& n : resolved_selection(cfg))
        canon += std::to_string(n.j) + "." + std::to_string(n.k) + ",";
    canon += ";lags=";
    for (const auto& l : resolved_lags(cfg))
        canon += std::to_string(l.t1) + "." + std::to_string(l.t2) + ",";
    canon += ";eps=" + format_double(cfg.eps);
    canon += ";gamma=" + format_double(cfg.gamma);

    std::uint64_t h = 14695981039346656037ULL;
    hash_bytes(h, canon);
    return h;
}

std::string config_hash_hex(const PipelineConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

FrameFeaturizer::FrameFeaturizer(const PipelineConfig& cfg)
    : q_(nullptr), wpt_(cfg.frame_length, cfg.levels) {
    validate_config(cfg);
    q_ = &filter_by_name(cfg.filter);
    policy_ = cfg.policy;
    selection_ = resolved_selection(cfg);
    lags_ = resolved_lags(cfg);
    eps_ = cfg.eps;
}

SignatureVector FrameFeaturizer::operator()(std::span<const double> frame,
                                            std::size_t frame_index) const {
    if (frame.size() != wpt_.frame_length)
        config_fail("frame has " + std::to_string(frame.size()) + " samples, config expects " +
                    std::to_string(wpt_.frame_length));
    const auto tree = forward_wpt(frame, *q_, wpt_);
    const auto mask = build_mask(tree, policy_);
    const auto split = split_and_reconstruct(tree, mask, *q_);
    const auto rtree = forward_wpt(split.residual, *q_, wpt_);
    return build_signature(tree, rtree, selection_, lags_, eps_, frame_index);
}

std::vector<SignatureVector> featurize_stream(const std::vector<std::vector<double>>& frames,
                                              const PipelineConfig& cfg) {
    const FrameFeaturizer feat(cfg);
    std::vector<SignatureVector> sigs;
    sigs.reserve(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) sigs.push_back(feat(frames[f], f));
    return sigs;
}

std::string model_to_json(const NominalModel& model, const PipelineConfig& cfg) {
    ojson j;
    j["dim"] = model.dim;
    j["selection"] = pairs_to_json(model.selection);
    j["lags"] = pairs_to_json(model.lags);
    j["eps"] = cfg.eps;
    j["gamma"] = model.gamma;
    j["mean"] = model.mean;
    j["covariance"] = model.covariance;
    j["config_hash"] = config_hash_hex(cfg);
    return j.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
    const ojson j = parse_document(text, "model");
    reject_unknown_keys(
        j, {"dim", "selection", "lags", "eps", "gamma", "mean", "covariance", "config_hash"},
        "model");
    for (const char* key :
         {"dim", "selection", "lags", "eps", "gamma", "mean", "covariance", "config_hash"})
        if (!j.contains(key)) config_fail(std::string("model is missing '") + key + "'");

    const std::size_t dim = get_size(j, "dim", 0);
    const NodeSelection sel = selection_from_json(j["selection"]);
    const LagSet lags = lags_from_json(j["lags"]);
    const double eps = get_number(j, "eps", 0.0);
    const double gamma = get_number(j, "gamma", 0.0);
    if (!j["mean"].is_array() || !j["covariance"].is_array())
        config_fail("model mean/covariance must be arrays");
    std::vector<double> mean, cov;
    for (const auto& v : j["mean"]) {
        if (!v.is_number()) config_fail("model mean entries must be numbers");
        mean.push_back(v.get<double>());
    }
    for (const auto& v : j["covariance"]) {
        if (!v.is_number()) config_fail("model covariance entries must be numbers");
        cov.push_back(v.get<double>());
    }
    if (mean.size() != dim) config_fail("model mean length disagrees with dim");
    if (cov.size() != dim * dim) config_fail("model covariance length disagrees with dim");
    if (dim != 3 * sel.size()) config_fail("model dim disagrees with the node selection");
    if (!(eps > 0.0)) config_fail("model eps must be positive");

    LoadedModel out;
    try {
        out.model = model_from_moments(std::move(mean), std::move(cov), sel, lags, gamma);
    } catch (const std::exception& e) {
        config_fail(std::string("model moments rejected: ") + e.what());
    }
    out.eps = eps;
    out.config_hash = get_string(j, "config_hash", "");
    return out;
}

DetectionResult run_detection(const std::vector<std::vector<double>>& frames,
                              const NominalModel& model, const PipelineConfig& cfg) {
    const FrameFeaturizer feat(cfg);
    if (feat.dim() != model.dim)
        config_fail("model dimension " + std::to_string(model.dim) +
                    " disagrees with the config feature dimension " + std::to_string(feat.dim()));
    const DetectorConfig det = make_detector_config(model.dim, cfg.alpha);
    const double nu = cfg.nu > 0.0 ? cfg.nu : default_drift(model.dim);

    DetectionResult result;
    result.eta = det.eta;
    result.nu = nu;
    result.rows.reserve(frames.size());
    CusumState st = make_cusum(nu, cfg.h_c);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const double d_sq = mahalanobis_sq(feat(frames[i], i), model);
        cusum_step(st, d_sq);
        result.rows.push_back({i, d_sq, decide(d_sq, det), st.s, st.alarmed});
    }
    result.any_alarm = st.alarmed;
    result.first_alarm_frame = st.alarmed ? st.first_alarm_frame - 1 : 0;
    return result;
}

std::string detection_log_to_csv(const DetectionResult& result, const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\n";
    out += "frame,d2,decision,s,alarm\n";
    for (const auto& r : result.rows) {
        out += std::to_string(r.frame);
        out.push_back(',');
        append_double(out, r.d_sq);
        out.push_back(',');
        out.push_back(r.decision ? '1' : '0');
        out.push_back(',');
        append_double(out, r.s);
        out.push_back(',');
        out.push_back(r.alarm ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool parse_flag(std::string_view f) {
    if (f == "0") return false;
    if (f == "1") return true;
    throw ConfigError("detection log flags must be 0 or 1");
}

}  // namespace

DetectionResult parse_detection_log(const std::string& text, std::string* hash_out) {
    constexpr std::string_view kHashPrefix = "# config_hash=";
    constexpr std::string_view kHeader = "frame,d2,decision,s,alarm";

    std::string_view rest(text);
    const std::size_t first_nl = rest.find('\n');
    if (first_nl == std::string_view::npos || rest.substr(0, kHashPrefix.size()) != kHashPrefix)
        throw ConfigError("detection log must start with a config_hash comment line");
    if (hash_out) *hash_out = std::string(rest.substr(kHashPrefix.size(), first_nl - kHashPrefix.size()));
    rest.remove_prefix(first_nl + 1);

    const std::size_t second_nl = rest.find('\n');
    if (second_nl == std::string_view::npos || rest.substr(0, second_nl) != kHeader)
        throw ConfigError("detection log header must be 'frame,d2,decision,s,alarm'");
    rest.remove_prefix(second_nl + 1);

    DetectionResult result;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        if (nl == std::string_view::npos)
            throw ConfigError("detection log lines must end with LF");
        const auto fields = split_fields(rest.substr(0, nl));
        if (fields.size() != 5) throw ConfigError("detection log rows need five fields");
        DetectionRow row;
        row.frame = parse_index(fields[0]);
        row.d_sq = parse_double(fields[1]);
        row.decision = parse_flag(fields[2]);
        row.s = parse_double(fields[3]);
        row.alarm = parse_flag(fields[4]);
        if (row.alarm && !result.any_alarm) {
            result.any_alarm = true;
            result.first_alarm_frame = row.frame;
        }
        result.rows.push_back(row);
        rest.remove_prefix(nl + 1);
    }
    return result;
}

std::string scenario_to_json(const ScenarioSpec& spec) {
    ojson j;
    j["frame_length"] = spec.frame_length;
    j["frames"] = spec.frames;
    j["seed"] = spec.seed;
    ojson tones = ojson::array();
    for (const auto& t : spec.structured)
        tones.push_back(ojson{{"freq", t.freq}, {"amplitude", t.amplitude}, {"phase", t.phase}});
    j["structured"] = std::move(tones);
    j["baseline_slope"] = spec.baseline_slope;
    j["noise_sigma"] = spec.noise_sigma;
    j["anomaly"] = ojson{{"kind", anomaly_name(spec.anomaly.kind)},
                         {"rate", spec.anomaly.rate},
                         {"skew_scale", spec.anomaly.skew_scale},
                         {"f1", spec.anomaly.f1},
                         {"f2", spec.anomaly.f2},
                         {"coupling", spec.anomaly.coupling},
                         {"phase_coupled", spec.anomaly.phase_coupled},
                         {"energy_scale", spec.anomaly.energy_scale}};
    j["onset_frame"] = spec.onset_frame;
    j["regime"] = regime_name(spec.regime);
    return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
    const ojson j = parse_document(text, "scenario");
    reject_unknown_keys(j,
                        {"frame_length", "frames", "seed", "structured", "baseline_slope",
                         "noise_sigma", "anomaly", "onset_frame", "regime"},
                        "scenario");
    ScenarioSpec spec;
    spec.frame_length = get_size(j, "frame_length", spec.frame_length);
    spec.frames = get_size(j, "frames", spec.frames);
    spec.seed = get_size(j, "seed", 0);
    if (j.contains("structured")) {
        if (!j["structured"].is_array()) config_fail("'structured' must be an array");
        for (const auto& t : j["structured"]) {
            if (!t.is_object()) config_fail("'structured' entries must be objects");
            reject_unknown_keys(t, {"freq", "amplitude", "phase"}, "structured");
            spec.structured.push_back({get_number(t, "freq", 0.0),
                                       get_number(t, "amplitude", 0.0),
                                       get_number(t, "phase", 0.0)});
        }
    }
    spec.baseline_slope = get_number(j, "baseline_slope", 0.0);
    spec.noise_sigma = get_number(j, "noise_sigma", 1.0);
    if (j.contains("anomaly")) {
        const ojson& a = j["anomaly"];
        if (!a.is_object()) config_fail("'anomaly' must be an object");
        reject_unknown_keys(
            a, {"kind", "rate", "skew_scale", "f1", "f2", "coupling", "phase_coupled",
                "energy_scale"},
            "anomaly");
        try {
            spec.anomaly.kind = anomaly_from_name(get_string(a, "kind", "none"));
        } catch (const std::exception& e) {
            config_fail(e.what());
        }
        spec.anomaly.rate = get_number(a, "rate", 0.0);
        spec.anomaly.skew_scale = get_number(a, "skew_scale", 0.0);
        spec.anomaly.f1 = get_number(a, "f1", 0.0);
        spec.anomaly.f2 = get_number(a, "f2", 0.0);
        spec.anomaly.coupling = get_number(a, "coupling", 0.0);
        spec.anomaly.phase_coupled = get_bool(a, "phase_coupled", true);
        spec.anomaly.energy_scale = get_number(a, "energy_scale", 0.0);
    }
    spec.onset_frame = get_size(j, "onset_frame", 0);
    if (j.contains("regime")) {
        try {
            spec.regime = regime_from_name(get_string(j, "regime", "matched"));
        } catch (const std::exception& e) {
            config_fail(e.what());
        }
    }
    try {
        validate_scenario(spec);
    } catch (const std::exception& e) {
        config_fail(std::string("bad scenario: ") + e.what());
    }
    return spec;
}

CurveReport run_latency_suite(const ScenarioSpec& base, std::size_t runs,
                              std::size_t train_frames, const PipelineConfig& cfg) {
    if (runs == 0) throw std::invalid_argument("need at least one run");
    if (base.anomaly.kind == AnomalyKind::none || base.onset_frame == 0 ||
        base.onset_frame >= base.frames)
        config_fail("latency suite needs an anomalous scenario with the onset inside the stream");
    if (base.frame_length != cfg.frame_length)
        config_fail("scenario frame_length disagrees with the config");

    const FrameFeaturizer feat(cfg);
    std::vector<LatencyObservation> obs;
    obs.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        ScenarioSpec spec = base;
        spec.seed = base.seed + r;

        ScenarioSpec train = spec;
        train.anomaly = AnomalySpec{};
        train.onset_frame = 0;
        train.frames = train_frames;
        train.seed = derive_seed(spec.seed, 0x31a);
        const auto train_fused = fuse(generate(train, 0), generate(train, 1));
        std::vector<SignatureVector> sigs;
        sigs.reserve(train_fused.frames.size());
        for (std::size_t f = 0; f < train_fused.frames.size(); ++f)
            sigs.push_back(feat(train_fused.frames[f], f));
        const auto model = fit_nominal(sigs, cfg.gamma, feat.selection(), feat.lags());

        const auto eval_fused = fuse(generate(spec, 0), generate(spec, 1));
        const double nu = cfg.nu > 0.0 ? cfg.nu : default_drift(model.dim);
        CusumState st = make_cusum(nu, cfg.h_c);
        LatencyObservation o;
        o.onset_frame = spec.onset_frame;
        for (std::size_t i = 0; i < eval_fused.frames.size(); ++i) {
            if (i == spec.onset_frame) cusum_reset(st);
            cusum_step(st, mahalanobis_sq(feat(eval_fused.frames[i], i), model));
            if (!o.alarmed && st.alarmed && i >= spec.onset_frame) {
                o.alarmed = true;
                o.alarm_frame = i;
            }
        }
        obs.push_back(o);
    }
    return latency_cdf(obs);
}

CurveReport banded_roc(const ScenarioSpec& base, std::size_t runs, const HarnessConfig& hc) {
    if (runs == 0) throw std::invalid_argument("need at least one run");
    const auto& q = filter_by_name(hc.filter);
    const WptConfig wcfg(base.frame_length, hc.levels);

    std::vector<CurveReport> rocs;
    rocs.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        ScenarioSpec spec = base;
        spec.seed = base.seed + r;
        const auto fused = fuse(generate(spec, 0), generate(spec, 1));

        std::vector<std::uint8_t> labels = fused.labels;
        if (spec.anomaly.kind == AnomalyKind::none) {
            const std::size_t onset = (spec.onset_frame > 0 && spec.onset_frame < spec.frames)
                                          ? spec.onset_frame
                                          : spec.frames / 2;
            for (std::size_t f = onset; f < labels.size(); ++f) labels[f] = 1;
        }

        ScenarioSpec train = spec;
        train.anomaly = AnomalySpec{};
        train.onset_frame = 0;
        train.frames = hc.train_frames;
        train.seed = derive_seed(spec.seed, 0x31a);
        const auto train_fused = fuse(generate(train, 0), generate(train, 1));

        std::vector<SignatureVector> sigs;
        sigs.reserve(train_fused.frames.size());
        for (std::size_t f = 0; f < train_fused.frames.size(); ++f) {
            SignatureVector sv;
            sv.values = method_features(train_fused.frames[f], Method::wpt_hos, q, wcfg, hc);
            sv.frame_index = f;
            sigs.push_back(std::move(sv));
        }
        const auto model = fit_nominal(sigs, hc.gamma);

        ScoredDataset ds;
        ds.labels = std::move(labels);
        ds.run_id = r;
        ds.scores.reserve(fused.frames.size());
        for (const auto& frame : fused.frames)
            ds.scores.push_back(
                mahalanobis_sq(method_features(frame, Method::wpt_hos, q, wcfg, hc), model));
        rocs.push_back(roc_curve(ds));
    }
    return runs == 1 ? rocs.front() : run_bands(rocs);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed on '" + path + "'");
    return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed on '" + path + "'");
}

}  // namespace noisesig
