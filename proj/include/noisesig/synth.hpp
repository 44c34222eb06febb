#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace noisesig {

struct SinusoidSpec {
    double freq = 0.0;  // cycles/sample, strictly inside (0, 0.5)
    double amplitude = 0.0;
    double phase = 0.0;
};

enum class AnomalyKind { none, skewed_impulsive, qpc, mean_shift };

enum class ShiftRegime { matched, mild, moderate, severe };

// Separability knob: anomaly amplitude is scaled by this factor.
double regime_multiplier(ShiftRegime r);

const char* anomaly_name(AnomalyKind k);
const char* regime_name(ShiftRegime r);
AnomalyKind anomaly_from_name(const std::string& name);
ShiftRegime regime_from_name(const std::string& name);

struct AnomalySpec {
    AnomalyKind kind = AnomalyKind::none;
    // skewed_impulsive: Bernoulli(rate) shot noise with centered Exp(1) marks
    double rate = 0.0;
    double skew_scale = 0.0;
    // qpc: tones at f1, f2 plus a component at f1+f2 whose phase is the sum of
    // the other two when phase_coupled, or independent when not (control case)
    double f1 = 0.0;
    double f2 = 0.0;
    double coupling = 0.0;
    bool phase_coupled = true;
    // mean_shift: adds first-difference-colored noise (high band), scaled
    // relative to the nominal noise level
    double energy_scale = 0.0;
};

struct ScenarioSpec {
    std::size_t frame_length = 256;
    std::size_t frames = 0;
    std::uint64_t seed = 0;
    std::vector<SinusoidSpec> structured;
    double baseline_slope = 0.0;  // zero-mean linear ramp across each frame
    double noise_sigma = 1.0;
    AnomalySpec anomaly;
    std::size_t onset_frame = 0;
    ShiftRegime regime = ShiftRegime::matched;
};

void validate_scenario(const ScenarioSpec& spec);

struct LabeledStream {
    std::size_t frame_length = 0;
    std::vector<std::vector<double>> frames;
    std::vector<std::uint8_t> labels;  // 1 iff frame index >= onset and anomaly present
    ScenarioSpec spec;
};

// Deterministic: noise is seeded per (source_id, frame), the anomaly channel
// per frame only, so different sources see independent noise but the same
// anomaly realization (coherent across sources, ready for fusion).
LabeledStream generate(const ScenarioSpec& spec, std::uint32_t source_id = 0);

// Sample-wise average of two aligned streams.
LabeledStream fuse(const LabeledStream& a, const LabeledStream& b);

// CSV with header frame_index,sample_index,value; shortest round-trip floats.
std::string stream_to_csv(const LabeledStream& s);
std::vector<std::vector<double>> parse_stream_csv(const std::string& text);

struct LabelsInfo {
    std::vector<std::uint8_t> labels;
    std::size_t onset_frame = 0;
    std::size_t frame_length = 0;
    std::string anomaly;
    std::string regime;
    std::uint64_t seed = 0;
};

std::string labels_to_json(const LabeledStream& s);
LabelsInfo parse_labels_json(const std::string& text);

}  // namespace noisesig
