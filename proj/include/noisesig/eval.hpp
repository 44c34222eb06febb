#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noisesig/hos.hpp"
#include "noisesig/residual.hpp"
#include "noisesig/synth.hpp"
#include "noisesig/wpt.hpp"

namespace noisesig {

struct ScoredDataset {
    std::vector<double> scores;        // per-frame score, higher = more anomalous
    std::vector<std::uint8_t> labels;  // 0 nominal, 1 anomalous
    int run_id = 0;
};

enum class MetricKind { roc, pr, latency_cdf };

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

struct CurveReport {
    MetricKind kind = MetricKind::roc;
    std::vector<CurvePoint> points;  // sorted by x
    double auc = 0.0;
    // Filled by run_bands: per-point 5th/95th percentiles across runs.
    std::vector<double> band_low;
    std::vector<double> band_high;
    // Latency curves only: fraction of streams that never alarmed.
    double censored_mass = 0.0;
};

// Threshold sweep over distinct scores (equal scores move as one step),
// decision rule score >= threshold. AUC by the trapezoid rule, which on the
// tie-grouped sweep equals the Mann-Whitney statistic with ties counted half.
CurveReport roc_curve(const ScoredDataset& ds);

// Same sweep in precision/recall coordinates. Zero predicted positives has
// precision 1 by convention, so every curve starts at (0, 1).
CurveReport pr_curve(const ScoredDataset& ds);

struct F1Report {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double threshold = 0.0;
    // All-positive labels cannot be swept meaningfully; the report is still
    // produced (everything predicted positive) but marked.
    bool degenerate = false;
};

// Maximizes F1 over the sweep, ties broken toward the higher threshold.
F1Report f1_best(const ScoredDataset& ds);

struct LatencyObservation {
    std::size_t onset_frame = 0;
    std::size_t alarm_frame = 0;  // meaningful only when alarmed
    bool alarmed = false;
};

// Empirical CDF of alarm_frame - onset_frame over streams. Streams that never
// alarm contribute censored mass instead of being dropped, so the CDF tops out
// at 1 - censored_mass.
CurveReport latency_cdf(const std::vector<LatencyObservation>& obs);

// Pointwise mean and 5th/95th percentile band across runs, computed on a fixed
// 512-point x grid with linear interpolation (constant beyond each run's range).
// Percentiles are nearest-rank, so two runs give a min/max band.
CurveReport run_bands(const std::vector<CurveReport>& runs);

// Pure unit conversion for reporting false alarms per hour or per day:
// pass frames per hour (or per day) as frame_rate.
double false_alarm_rate_per_unit(double fpr, double frame_rate);

enum class Method {
    wpt_hos,            // full signature: energies + cumulant blocks
    wpt_only,           // energy block only
    hos_only,           // cumulant energy + normalized form on the raw frame
    second_order_only,  // energies + zero-lag autocorrelations
    single_source,      // full signature, first source stream alone
    fused_source,       // full signature, two-source average
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::vector<Method> all_methods();

struct HarnessConfig {
    std::string filter = "db4";
    std::size_t levels = 3;
    std::size_t train_frames = 256;  // nominal-only frames used for fitting
    double gamma = 1e-3;
    LagSet lags;  // empty = default_lags()
    double eps = 1e-12;
    ThresholdPolicy policy;
};

struct MethodRow {
    Method method = Method::wpt_hos;
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Feature vector a given method sees for one frame. Dimensions: wpt_hos,
// single_source and fused_source share the 3|V| signature; wpt_only is |V|;
// second_order_only is 2|V|; hos_only is 2.
std::vector<double> method_features(std::span<const double> frame, Method m, const QmfPair& q,
                                    const WptConfig& cfg, const HarnessConfig& hc);

// Generates two source streams from the scenario, fits each method on a
// nominal training stream, scores the labeled evaluation stream and reports
// ROC-AUC, PR-AUC and the best-F1 operating point per method. Methods differ
// only in their feature slice and in which stream they consume (single_source
// scores source 0 alone; everything else scores the fused stream). When the
// scenario has no anomaly the frame labels are all zero, so frames at or past
// a synthetic onset (frames/2 unless the scenario sets one inside the stream)
// are relabeled positive purely to exercise the sweep; the resulting AUC
// should hover at chance level.
std::vector<MethodRow> ablation_table(const ScenarioSpec& scenario,
                                      const std::vector<Method>& methods,
                                      const HarnessConfig& hc);

// x,mean,band_low,band_high rows; bandless curves repeat the mean.
std::string curve_to_csv(const CurveReport& report);

std::string ablation_to_text(const std::vector<MethodRow>& rows);
std::string ablation_to_json(const std::vector<MethodRow>& rows);

// The stock scenario the comparison suites and CLI demo run on: one tone plus a
// slow ramp over unit noise, sparse positive shots (rate 0.005, scale 4) from
// frame 200 of 400.
ScenarioSpec benchmark_scenario(std::uint64_t seed, ShiftRegime regime = ShiftRegime::matched,
                                std::size_t frame_length = 1024);

struct RegimeRow {
    ShiftRegime regime = ShiftRegime::matched;
    std::vector<Method> methods;
    std::vector<double> mean_auc;  // aligned with methods
};

// Mean ROC-AUC per method and regime over `runs` seeded repetitions of the
// scenario (run r uses seed base_scenario.seed + r).
std::vector<RegimeRow> domain_shift_table(const ScenarioSpec& base_scenario, std::size_t runs,
                                          const std::vector<Method>& methods,
                                          const HarnessConfig& hc);

std::string domain_shift_to_csv(const std::vector<RegimeRow>& rows);
std::string domain_shift_to_text(const std::vector<RegimeRow>& rows);
std::string domain_shift_to_json(const std::vector<RegimeRow>& rows);

}  // namespace noisesig
