#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisesig/detector.hpp"
#include "noisesig/eval.hpp"
#include "noisesig/residual.hpp"
#include "noisesig/signature.hpp"
#include "noisesig/synth.hpp"

namespace noisesig {

// Thrown for semantic problems in configs, models, scenarios, or their
// combinations. The CLI maps it to exit code 65.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a file cannot be read or written. CLI exit code 66.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::string filter = "db4";
    std::size_t levels = 3;
    std::size_t frame_length = 1024;
    ThresholdPolicy policy;
    NodeSelection selection;  // empty = every leaf at `levels`
    LagSet lags;              // empty = stock lag set
    double eps = 1e-12;
    double gamma = 1e-3;
    double alpha = 0.05;
    double nu = 0.0;  // CUSUM drift; 0 = feature dim + 1
    double h_c = 30.0;
    std::uint64_t seed = 0;
    std::string input_path;
    std::string output_path;
    std::string model_path;
    std::string labels_path;
};

// frame_length divisible by 2^levels, alpha in (0,1), known filter, positive
// eps, nonnegative gamma/nu, positive h_c, selection and lags well formed.
void validate_config(const PipelineConfig& cfg);

NodeSelection resolved_selection(const PipelineConfig& cfg);
const LagSet& resolved_lags(const PipelineConfig& cfg);

// Canonical single-document JSON. read(write(c)) == c and the second write is
// byte-identical to the first.
std::string config_to_json(const PipelineConfig& cfg);
// Missing keys fall back to defaults; unknown keys are rejected. seed_in_file
// (optional) reports whether the document pinned a seed, so the CLI can apply
// the NOISESIG_SEED fallback only when it did not.
PipelineConfig config_from_json(const std::string& text, bool* seed_in_file = nullptr);

// FNV-1a over the fields that determine feature geometry and the fitted model:
// filter, depth, frame length, threshold policy, resolved selection and lags,
// eps, gamma. Detector knobs (alpha, nu, h_c), the seed, and paths can change
// without invalidating a model.
std::uint64_t config_hash(const PipelineConfig& cfg);
std::string config_hash_hex(const PipelineConfig& cfg);

// One full-path signature per call: WPT, threshold split, residual re-analysis,
// cumulant features. Reusable across frames of one stream.
class FrameFeaturizer {
public:
    explicit FrameFeaturizer(const PipelineConfig& cfg);

    SignatureVector operator()(std::span<const double> frame, std::size_t frame_index = 0) const;

    const NodeSelection& selection() const { return selection_; }
    const LagSet& lags() const { return lags_; }
    std::size_t dim() const { return 3 * selection_.size(); }

private:
    const QmfPair* q_;
    WptConfig wpt_;
    ThresholdPolicy policy_;
    NodeSelection selection_;
    LagSet lags_;
    double eps_;
};

std::vector<SignatureVector> featurize_stream(const std::vector<std::vector<double>>& frames,
                                              const PipelineConfig& cfg);

// Model persistence: dim, node selection, lag set, eps, gamma, mean, covariance
// (row-major), and the config hash. The whitener is rebuilt from the stored
// moments on load, so write -> read -> write is byte-identical.
std::string model_to_json(const NominalModel& model, const PipelineConfig& cfg);

struct LoadedModel {
    NominalModel model;
    double eps = 0.0;
    std::string config_hash;
};

LoadedModel model_from_json(const std::string& text);

struct DetectionRow {
    std::size_t frame = 0;  // 0-based position in the stream
    double d_sq = 0.0;
    bool decision = false;  // per-frame threshold exceedance
    double s = 0.0;         // CUSUM statistic after this frame
    bool alarm = false;     // latched CUSUM alarm
};

struct DetectionResult {
    std::vector<DetectionRow> rows;
    bool any_alarm = false;
    std::size_t first_alarm_frame = 0;  // 0-based, only meaningful when any_alarm
    double eta = 0.0;
    double nu = 0.0;
};

DetectionResult run_detection(const std::vector<std::vector<double>>& frames,
                              const NominalModel& model, const PipelineConfig& cfg);

// CSV with a "# config_hash=..." comment line above the header
// frame,d2,decision,s,alarm. Byte-stable round trip with parse_detection_log.
std::string detection_log_to_csv(const DetectionResult& result, const std::string& hash);
DetectionResult parse_detection_log(const std::string& text, std::string* hash_out = nullptr);

// Canonical scenario document; same round-trip contract as the config.
std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);

// Alarm-latency distribution over `runs` seeded repetitions (run r uses seed
// base.seed + r). Each run fits a fresh model on a nominal fused stream of
// train_frames frames, then feeds the anomalous fused stream to the detector.
// The CUSUM accumulator is cleared at the onset frame so the reported latency
// measures the post-onset response, not pre-onset noise accumulation.
CurveReport run_latency_suite(const ScenarioSpec& base, std::size_t runs,
                              std::size_t train_frames, const PipelineConfig& cfg);

// Per-run ROC curves for the full method on `runs` seeded repetitions, reduced
// to a banded mean curve (runs == 1 yields the single curve, zero-width band).
CurveReport banded_roc(const ScenarioSpec& base, std::size_t runs, const HarnessConfig& hc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace noisesig
