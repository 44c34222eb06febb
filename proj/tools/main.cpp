#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "noisesig/hos.hpp"
#include "noisesig/pipeline.hpp"
#include "noisesig/textio.hpp"

namespace {

using namespace noisesig;

constexpr int kOk = 0;
constexpr int kAlarm = 3;
constexpr int kUsage = 64;
constexpr int kConfigErr = 65;
constexpr int kIoErr = 66;
constexpr int kInternal = 70;

std::string pick_path(const std::string& flag_value, const std::string& config_value,
                      const char* fallback) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    return fallback;
}

std::string require_path(const std::string& flag_value, const std::string& config_value,
                         const char* what) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    throw ConfigError(std::string(what) + " not given (flag or config paths entry)");
}

struct GenerateArgs {
    std::string scenario_path;
    std::string out;
    std::string labels_out;
    std::uint32_t source = 0;
    bool nominal = false;
    bool fused = false;
};

struct FitArgs {
    std::string stream;
    std::string labels;
    std::string model_out;
    bool force = false;
};

struct DetectArgs {
    std::string stream;
    std::string model;
    std::string log_out;
};

struct EvaluateArgs {
    std::string suite = "ablation";
    std::string scenario_path;
    std::string prefix = "eval";
    std::size_t runs = 5;
    std::size_t train_frames = 200;
};

struct BispectrumArgs {
    std::string stream;
    std::string out;
    std::size_t frame = 0;
    bool average = false;
    int tau = 16;
    std::size_t grid = 64;
};

ScenarioSpec load_scenario(const std::string& path, const PipelineConfig& cfg, bool seed_flag) {
    if (path.empty()) return benchmark_scenario(cfg.seed, ShiftRegime::matched, cfg.frame_length);
    ScenarioSpec spec = scenario_from_json(read_file(path));
    if (seed_flag) spec.seed = cfg.seed;  // explicit flag wins over the scenario file
    return spec;
}

int run_generate(const PipelineConfig& cfg, const GenerateArgs& args, bool seed_flag) {
    ScenarioSpec spec = load_scenario(args.scenario_path, cfg, seed_flag);
    if (args.nominal) {
        spec.anomaly = AnomalySpec{};
        spec.onset_frame = 0;
    }
    const LabeledStream stream = args.fused
                                     ? fuse(generate(spec, 0), generate(spec, 1))
                                     : generate(spec, args.source);
    const std::string out = pick_path(args.out, cfg.output_path, "stream.csv");
    const std::string labels_out = pick_path(args.labels_out, cfg.labels_path, "labels.json");
    write_file(out, stream_to_csv(stream));
    write_file(labels_out, labels_to_json(stream));
    std::printf("wrote %zu frames of %zu samples to %s (labels: %s)\n", stream.frames.size(),
                stream.frame_length, out.c_str(), labels_out.c_str());
    return kOk;
}

int run_fit(const PipelineConfig& cfg, const FitArgs& args) {
    const std::string stream_path = require_path(args.stream, cfg.input_path, "training stream");
    const auto frames = parse_stream_csv(read_file(stream_path));

    const std::string labels_path =
        !args.labels.empty() ? args.labels : cfg.labels_path;
    if (!labels_path.empty()) {
        const LabelsInfo info = parse_labels_json(read_file(labels_path));
        if (info.labels.size() != frames.size())
            throw ConfigError("labels cover " + std::to_string(info.labels.size()) +
                              " frames but the stream has " + std::to_string(frames.size()));
        std::size_t hits = 0;
        for (auto l : info.labels) hits += l;
        if (hits > 0 && !args.force)
            throw ConfigError("training stream is labeled anomalous on " + std::to_string(hits) +
                              " frames; pass --force to fit anyway");
    }

    const auto sigs = featurize_stream(frames, cfg);
    const auto model =
        fit_nominal(sigs, cfg.gamma, resolved_selection(cfg), resolved_lags(cfg));
    const std::string model_out = pick_path(args.model_out, cfg.model_path, "model.json");
    write_file(model_out, model_to_json(model, cfg));
    std::printf("fitted %zu-dimensional model on %zu frames -> %s (config %s)\n", model.dim,
                frames.size(), model_out.c_str(), config_hash_hex(cfg).c_str());
    return kOk;
}

int run_detect(const PipelineConfig& cfg, const DetectArgs& args) {
    const std::string stream_path = require_path(args.stream, cfg.input_path, "stream");
    const std::string model_path = require_path(args.model, cfg.model_path, "model");
    const auto frames = parse_stream_csv(read_file(stream_path));
    const LoadedModel loaded = model_from_json(read_file(model_path));

    const std::string current = config_hash_hex(cfg);
    if (loaded.config_hash != current)
        throw ConfigError("model config hash " + loaded.config_hash +
                          " does not match the active config " + current);

    const DetectionResult result = run_detection(frames, loaded.model, cfg);
    const std::string log_out = pick_path(args.log_out, cfg.output_path, "detect_log.csv");
    write_file(log_out, detection_log_to_csv(result, loaded.config_hash));
    if (result.any_alarm)
        std::printf("alarm at frame %zu of %zu (eta=%s nu=%s) -> %s\n", result.first_alarm_frame,
                    frames.size(), format_double(result.eta).c_str(),
                    format_double(result.nu).c_str(), log_out.c_str());
    else
        std::printf("no alarm over %zu frames (eta=%s nu=%s) -> %s\n", frames.size(),
                    format_double(result.eta).c_str(), format_double(result.nu).c_str(),
                    log_out.c_str());
    return result.any_alarm ? kAlarm : kOk;
}

std::vector<MethodRow> averaged_ablation(const ScenarioSpec& base, std::size_t runs,
                                         const HarnessConfig& hc) {
    const auto methods = all_methods();
    std::vector<MethodRow> acc;
    for (std::size_t r = 0; r < runs; ++r) {
        ScenarioSpec spec = base;
        spec.seed = base.seed + r;
        const auto rows = ablation_table(spec, methods, hc);
        if (acc.empty()) {
            acc = rows;
        } else {
            for (std::size_t m = 0; m < rows.size(); ++m) {
                acc[m].roc_auc += rows[m].roc_auc;
                acc[m].pr_auc += rows[m].pr_auc;
                acc[m].precision += rows[m].precision;
                acc[m].recall += rows[m].recall;
                acc[m].f1 += rows[m].f1;
            }
        }
    }
    const double n = static_cast<double>(runs);
    for (auto& row : acc) {
        row.roc_auc /= n;
        row.pr_auc /= n;
        row.precision /= n;
        row.recall /= n;
        row.f1 /= n;
    }
    return acc;
}

int run_evaluate(const PipelineConfig& cfg, const EvaluateArgs& args, bool seed_flag) {
    if (args.runs == 0) throw ConfigError("--runs must be at least 1");
    ScenarioSpec base = load_scenario(args.scenario_path, cfg, seed_flag);
    if (base.frame_length != cfg.frame_length)
        throw ConfigError("scenario frame_length disagrees with the config");

    HarnessConfig hc;
    hc.filter = cfg.filter;
    hc.levels = cfg.levels;
    hc.train_frames = args.train_frames;
    hc.gamma = cfg.gamma;
    hc.lags = cfg.lags;
    hc.eps = cfg.eps;
    hc.policy = cfg.policy;

    std::vector<std::string> written;
    if (args.suite == "ablation" || args.suite == "null") {
        if (args.suite == "null") base.anomaly = AnomalySpec{};
        const auto rows = averaged_ablation(base, args.runs, hc);
        const std::string stem = args.prefix + "_" + (args.suite == "null" ? "null" : "ablation");
        write_file(stem + "_table.txt", ablation_to_text(rows));
        write_file(stem + "_table.json", ablation_to_json(rows));
        write_file(stem + "_roc.csv", curve_to_csv(banded_roc(base, args.runs, hc)));
        written = {stem + "_table.txt", stem + "_table.json", stem + "_roc.csv"};
    } else if (args.suite == "domain-shift") {
        const std::vector<Method> methods = {Method::wpt_hos, Method::wpt_only,
                                             Method::single_source, Method::fused_source};
        const auto rows = domain_shift_table(base, args.runs, methods, hc);
        write_file(args.prefix + "_domain_shift.csv", domain_shift_to_csv(rows));
        write_file(args.prefix + "_domain_shift.txt", domain_shift_to_text(rows));
        write_file(args.prefix + "_domain_shift.json", domain_shift_to_json(rows));
        written = {args.prefix + "_domain_shift.csv", args.prefix + "_domain_shift.txt",
                   args.prefix + "_domain_shift.json"};
    } else {  // latency
        const CurveReport curve = run_latency_suite(base, args.runs, args.train_frames, cfg);
        write_file(args.prefix + "_latency.csv", curve_to_csv(curve));
        nlohmann::ordered_json j;
        j["runs"] = args.runs;
        j["censored_mass"] = curve.censored_mass;
        j["points"] = curve.points.size();
        write_file(args.prefix + "_latency.json", j.dump(2) + "\n");
        written = {args.prefix + "_latency.csv", args.prefix + "_latency.json"};
    }
    std::printf("suite %s over %zu runs:", args.suite.c_str(), args.runs);
    for (const auto& f : written) std::printf(" %s", f.c_str());
    std::printf("\n");
    return kOk;
}

int run_bispectrum(const PipelineConfig&, const BispectrumArgs& args) {
    if (args.stream.empty()) throw ConfigError("bispectrum needs --stream");
    if (args.tau < 1) throw ConfigError("--tau must be at least 1");
    if (args.grid < 2) throw ConfigError("--grid must be at least 2");
    const auto frames = parse_stream_csv(read_file(args.stream));
    if (frames.empty()) throw ConfigError("stream has no frames");

    CumulantGrid grid = [&] {
        if (!args.average) {
            if (args.frame >= frames.size())
                throw ConfigError("--frame is past the end of the stream");
            return CumulantGrid::estimate(frames[args.frame], args.tau);
        }
        const std::size_t cells = static_cast<std::size_t>(args.tau + 1) *
                                  static_cast<std::size_t>(args.tau + 1);
        std::vector<double> sum(cells, 0.0);
        for (const auto& frame : frames) {
            const auto g = CumulantGrid::estimate(frame, args.tau);
            std::size_t idx = 0;
            for (int t1 = 0; t1 <= args.tau; ++t1)
                for (int t2 = 0; t2 <= args.tau; ++t2) sum[idx++] += g.at(t1, t2);
        }
        for (double& v : sum) v /= static_cast<double>(frames.size());
        return CumulantGrid::from_values(args.tau, std::move(sum));
    }();

    const BispectrumGrid spec = bispectrum(grid, args.grid);
    std::string csv = "i1,i2,re,im,magnitude\n";
    double peak = -1.0;
    std::size_t p1 = 0, p2 = 0;
    for (std::size_t i1 = 0; i1 < spec.k; ++i1)
        for (std::size_t i2 = 0; i2 < spec.k; ++i2) {
            const auto v = spec.at(i1, i2);
            const double mag = std::abs(v);
            csv += std::to_string(i1);
            csv.push_back(',');
            csv += std::to_string(i2);
            csv.push_back(',');
            append_double(csv, v.real());
            csv.push_back(',');
            append_double(csv, v.imag());
            csv.push_back(',');
            append_double(csv, mag);
            csv.push_back('\n');
            if (mag > peak) {
                peak = mag;
                p1 = i1;
                p2 = i2;
            }
        }
    const std::string out = args.out.empty() ? "bispectrum.csv" : args.out;
    write_file(out, csv);
    std::printf("bispectrum %zux%zu (tau=%d, %s) peak |B|=%s at (%zu,%zu) -> %s\n", spec.k,
                spec.k, args.tau, args.average ? "averaged" : "single frame",
                format_double(peak).c_str(), p1, p2, out.c_str());
    return kOk;
}

std::uint64_t parse_env_seed(const char* text) {
    std::uint64_t v = 0;
    const std::string_view sv(text);
    const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
        throw ConfigError("NOISESIG_SEED must be a nonnegative integer");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noise-signature anomaly detection pipeline"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "pipeline config JSON");

    std::string filter, threshold_mode;
    std::size_t levels = 0, frame_length = 0;
    double fixed_lambda = 0, eps = 0, gamma = 0, alpha = 0, nu = 0, h_c = 0;
    std::uint64_t seed = 0;
    auto* o_filter = app.add_option("--filter", filter, "analysis filter: haar, db4, db8");
    auto* o_levels = app.add_option("--levels", levels, "decomposition depth");
    auto* o_frame_length = app.add_option("--frame-length", frame_length, "samples per frame");
    auto* o_mode = app.add_option("--threshold-mode", threshold_mode, "universal or fixed")
                       ->check(CLI::IsMember({"universal", "fixed"}));
    auto* o_lambda = app.add_option("--fixed-lambda", fixed_lambda, "threshold for fixed mode");
    auto* o_eps = app.add_option("--eps", eps, "normalization guard");
    auto* o_gamma = app.add_option("--gamma", gamma, "covariance shrinkage");
    auto* o_alpha = app.add_option("--alpha", alpha, "per-frame false alarm rate");
    auto* o_nu = app.add_option("--nu", nu, "CUSUM drift (0 = dim + 1)");
    auto* o_hc = app.add_option("--h-c", h_c, "CUSUM alarm threshold");
    auto* o_seed = app.add_option("--seed", seed, "base seed (NOISESIG_SEED as fallback)");

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "synthesize a labeled stream");
    c_gen->add_option("--scenario", gen.scenario_path, "scenario JSON (default: demo scenario)");
    c_gen->add_option("--out", gen.out, "stream CSV path");
    c_gen->add_option("--labels-out", gen.labels_out, "labels JSON path");
    c_gen->add_option("--source", gen.source, "source id for the noise channel");
    c_gen->add_flag("--nominal", gen.nominal, "strip the anomaly from the scenario");
    c_gen->add_flag("--fuse", gen.fused, "average sources 0 and 1");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "fit the nominal signature model");
    c_fit->add_option("--stream", fit.stream, "training stream CSV");
    c_fit->add_option("--labels", fit.labels, "labels JSON guarding against anomalous frames");
    c_fit->add_option("--model-out", fit.model_out, "model JSON path");
    c_fit->add_flag("--force", fit.force, "fit even when labels mark anomalies");

    DetectArgs det;
    auto* c_det = app.add_subcommand("detect", "score a stream against a fitted model");
    c_det->add_option("--stream", det.stream, "stream CSV");
    c_det->add_option("--model", det.model, "model JSON");
    c_det->add_option("--log-out", det.log_out, "detection log CSV path");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "run a seeded evaluation suite");
    c_ev->add_option("--suite", ev.suite, "ablation, domain-shift, latency, or null")
        ->check(CLI::IsMember({"ablation", "domain-shift", "latency", "null"}));
    c_ev->add_option("--runs", ev.runs, "seeded repetitions");
    c_ev->add_option("--scenario", ev.scenario_path, "scenario JSON (default: demo scenario)");
    c_ev->add_option("--out-prefix", ev.prefix, "prefix for report files");
    c_ev->add_option("--train-frames", ev.train_frames, "nominal frames fitted per run");

    BispectrumArgs bis;
    auto* c_bis = app.add_subcommand("bispectrum", "dump a bispectrum grid for a stream");
    c_bis->add_option("--stream", bis.stream, "stream CSV");
    c_bis->add_option("--frame", bis.frame, "frame index to analyze");
    c_bis->add_flag("--average", bis.average, "average cumulant grids over all frames");
    c_bis->add_option("--tau", bis.tau, "cumulant lag radius");
    c_bis->add_option("--grid", bis.grid, "DFT grid size");
    c_bis->add_option("--out", bis.out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        PipelineConfig cfg;
        bool seed_in_file = false;
        if (!config_path.empty()) cfg = config_from_json(read_file(config_path), &seed_in_file);
        if (o_filter->count()) cfg.filter = filter;
        if (o_levels->count()) cfg.levels = levels;
        if (o_frame_length->count()) cfg.frame_length = frame_length;
        if (o_mode->count())
            cfg.policy.mode = threshold_mode == "fixed" ? ThresholdPolicy::Mode::fixed
                                                        : ThresholdPolicy::Mode::universal;
        if (o_lambda->count()) cfg.policy.fixed_lambda = fixed_lambda;
        if (o_eps->count()) cfg.eps = eps;
        if (o_gamma->count()) cfg.gamma = gamma;
        if (o_alpha->count()) cfg.alpha = alpha;
        if (o_nu->count()) cfg.nu = nu;
        if (o_hc->count()) cfg.h_c = h_c;
        const bool seed_flag = o_seed->count() > 0;
        if (seed_flag) {
            cfg.seed = seed;
        } else if (!seed_in_file) {
            if (const char* env = std::getenv("NOISESIG_SEED")) cfg.seed = parse_env_seed(env);
        }
        validate_config(cfg);

        if (app.got_subcommand(c_gen)) return run_generate(cfg, gen, seed_flag);
        if (app.got_subcommand(c_fit)) return run_fit(cfg, fit);
        if (app.got_subcommand(c_det)) return run_detect(cfg, det);
        if (app.got_subcommand(c_ev)) return run_evaluate(cfg, ev, seed_flag);
        if (app.got_subcommand(c_bis)) return run_bispectrum(cfg, bis);
        std::fprintf(stderr, "no subcommand selected\n");
        return kUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kIoErr;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigErr;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigErr;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigErr;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
}
