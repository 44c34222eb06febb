#include "noisesig/synth.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string_view>

#include "json.hpp"
#include "noisesig/rng.hpp"
#include "noisesig/textio.hpp"

namespace noisesig {

namespace {
constexpr std::uint64_t kNoiseChannelBase = 0x100;
constexpr std::uint64_t kAnomalyChannel = 0x200;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

double regime_multiplier(ShiftRegime r) {
    switch (r) {
        case ShiftRegime::matched: return 1.0;
        case ShiftRegime::mild: return 0.8;
        case ShiftRegime::moderate: return 0.6;
        case ShiftRegime::severe: return 0.4;
    }
    throw std::invalid_argument("unknown shift regime");
}

const char* anomaly_name(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::none: return "none";
        case AnomalyKind::skewed_impulsive: return "skewed_impulsive";
        case AnomalyKind::qpc: return "qpc";
        case AnomalyKind::mean_shift: return "mean_shift";
    }
    throw std::invalid_argument("unknown anomaly kind");
}

const char* regime_name(ShiftRegime r) {
    switch (r) {
        case ShiftRegime::matched: return "matched";
        case ShiftRegime::mild: return "mild";
        case ShiftRegime::moderate: return "moderate";
        case ShiftRegime::severe: return "severe";
    }
    throw std::invalid_argument("unknown shift regime");
}

AnomalyKind anomaly_from_name(const std::string& name) {
    if (name == "none") return AnomalyKind::none;
    if (name == "skewed_impulsive") return AnomalyKind::skewed_impulsive;
    if (name == "qpc") return AnomalyKind::qpc;
    if (name == "mean_shift") return AnomalyKind::mean_shift;
    throw std::invalid_argument("unknown anomaly kind: '" + name + "'");
}

ShiftRegime regime_from_name(const std::string& name) {
    if (name == "matched") return ShiftRegime::matched;
    if (name == "mild") return ShiftRegime::mild;
    if (name == "moderate") return ShiftRegime::moderate;
    if (name == "severe") return ShiftRegime::severe;
    throw std::invalid_argument("unknown shift regime: '" + name + "'");
}

void validate_scenario(const ScenarioSpec& spec) {
    if (spec.frame_length < 2) throw std::invalid_argument("frame length must be at least 2");
    if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0)
        throw std::invalid_argument("noise sigma must be finite and nonnegative");
    if (!std::isfinite(spec.baseline_slope))
        throw std::invalid_argument("baseline slope must be finite");
    for (const auto& tone : spec.structured) {
        if (!(tone.freq > 0.0) || !(tone.freq < 0.5))
            throw std::invalid_argument("structured frequency must lie inside (0, 0.5)");
        if (!std::isfinite(tone.amplitude) || !std::isfinite(tone.phase))
            throw std::invalid_argument("structured tone parameters must be finite");
    }

    const auto& a = spec.anomaly;
    switch (a.kind) {
        case AnomalyKind::none:
            break;
        case AnomalyKind::skewed_impulsive:
            if (!std::isfinite(a.rate) || a.rate < 0.0 || a.rate > 1.0)
                throw std::invalid_argument("shot rate must lie inside [0, 1]");
            if (!std::isfinite(a.skew_scale) || a.skew_scale < 0.0)
                throw std::invalid_argument("shot scale must be finite and nonnegative");
            break;
        case AnomalyKind::qpc:
            if (!(a.f1 > 0.0) || !(a.f1 < 0.5) || !(a.f2 > 0.0) || !(a.f2 < 0.5))
                throw std::invalid_argument("coupled frequencies must lie inside (0, 0.5)");
            if (!(a.f1 + a.f2 < 0.5))
                throw std::invalid_argument("sum frequency must stay below 0.5");
            if (!std::isfinite(a.coupling))
                throw std::invalid_argument("coupling amplitude must be finite");
            break;
        case AnomalyKind::mean_shift:
            if (!std::isfinite(a.energy_scale) || a.energy_scale < 0.0)
                throw std::invalid_argument("energy scale must be finite and nonnegative");
            break;
    }
    if (a.kind != AnomalyKind::none && spec.frames > 0 && spec.onset_frame >= spec.frames)
        throw std::invalid_argument("anomaly onset must precede the end of the stream");
}

LabeledStream generate(const ScenarioSpec& spec, std::uint32_t source_id) {
    validate_scenario(spec);
    const std::size_t n = spec.frame_length;

    // structured part is the same for every frame and every source
    std::vector<double> structured(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = spec.baseline_slope *
                   (static_cast<double>(i) / static_cast<double>(n - 1) - 0.5);
        for (const auto& tone : spec.structured)
            s += tone.amplitude * std::cos(kTwoPi * tone.freq * static_cast<double>(i) +
                                           tone.phase);
        structured[i] = s;
    }

    const double mult = regime_multiplier(spec.regime);
    const bool anomalous = spec.anomaly.kind != AnomalyKind::none;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    LabeledStream out;
    out.frame_length = n;
    out.spec = spec;
    out.frames.reserve(spec.frames);
    out.labels.reserve(spec.frames);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        std::vector<double> frame = structured;
        if (spec.noise_sigma > 0.0) {
            Rng noise(derive_seed(spec.seed, kNoiseChannelBase + source_id, f));
            for (std::size_t i = 0; i < n; ++i) frame[i] += spec.noise_sigma * noise.normal();
        }
        const bool label = anomalous && f >= spec.onset_frame;
        if (label) {
            // anomaly channel ignores source_id: coherent across fused sources
            Rng ar(derive_seed(spec.seed, kAnomalyChannel, f));
            const auto& a = spec.anomaly;
            switch (a.kind) {
                case AnomalyKind::none:
                    break;
                case AnomalyKind::skewed_impulsive:
                    for (std::size_t i = 0; i < n; ++i)
                        if (ar.uniform() < a.rate)
                            frame[i] += mult * (a.skew_scale * (ar.exponential() - 1.0));
                    break;
                case AnomalyKind::qpc: {
                    const double w1 = kTwoPi * a.f1;
                    const double w2 = kTwoPi * a.f2;
                    const double p1 = kTwoPi * ar.uniform();
                    const double p2 = kTwoPi * ar.uniform();
                    const double p3 = a.phase_coupled ? p1 + p2 : kTwoPi * ar.uniform();
                    for (std::size_t i = 0; i < n; ++i) {
                        const double t = static_cast<double>(i);
                        frame[i] += mult * (std::cos(w1 * t + p1) + std::cos(w2 * t + p2) +
                                            a.coupling * std::cos((w1 + w2) * t + p3));
                    }
                    break;
                }
                case AnomalyKind::mean_shift: {
                    double prev = ar.normal();
                    for (std::size_t i = 0; i < n; ++i) {
                        const double cur = ar.normal();
                        frame[i] += mult * (spec.noise_sigma * a.energy_scale *
                                            ((cur - prev) * inv_sqrt2));
                        prev = cur;
                    }
                    break;
                }
            }
        }
        out.frames.push_back(std::move(frame));
        out.labels.push_back(label ? 1 : 0);
    }
    return out;
}

LabeledStream fuse(const LabeledStream& a, const LabeledStream& b) {
    if (a.frame_length != b.frame_length || a.frames.size() != b.frames.size())
        throw std::invalid_argument("streams to fuse disagree on geometry");
    if (a.labels != b.labels) throw std::invalid_argument("streams to fuse disagree on labels");
    LabeledStream out = a;
    for (std::size_t f = 0; f < out.frames.size(); ++f)
        for (std::size_t i = 0; i < out.frame_length; ++i)
            out.frames[f][i] = 0.5 * (a.frames[f][i] + b.frames[f][i]);
    return out;
}

std::string stream_to_csv(const LabeledStream& s) {
    std::string out = "frame_index,sample_index,value\n";
    out.reserve(out.size() + s.frames.size() * s.frame_length * 24);
    for (std::size_t f = 0; f < s.frames.size(); ++f)
        for (std::size_t i = 0; i < s.frame_length; ++i) {
            out += std::to_string(f);
            out += ',';
            out += std::to_string(i);
            out += ',';
            append_double(out, s.frames[f][i]);
            out += '\n';
        }
    return out;
}

std::vector<std::vector<double>> parse_stream_csv(const std::string& text) {
    std::string_view rest(text);
    auto next_line = [&]() -> std::string_view {
        const auto pos = rest.find('\n');
        std::string_view line = pos == std::string_view::npos ? rest : rest.substr(0, pos);
        rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
        return line;
    };

    const auto header = next_line();
    if (header != "frame_index,sample_index,value")
        throw std::runtime_error("stream CSV header mismatch");

    std::vector<std::vector<double>> frames;
    while (!rest.empty()) {
        const auto line = next_line();
        if (line.empty()) continue;  // tolerates a trailing newline
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos) throw std::runtime_error("malformed stream CSV row");
        const std::size_t f = parse_index(line.substr(0, c1));
        const std::size_t i = parse_index(line.substr(c1 + 1, c2 - c1 - 1));
        const double v = parse_double(line.substr(c2 + 1));
        if (f == frames.size() && i == 0)
            frames.emplace_back();
        else if (frames.empty() || f != frames.size() - 1 || i != frames.back().size())
            throw std::runtime_error("stream CSV rows out of order");
        frames.back().push_back(v);
    }
    if (!frames.empty()) {
        const std::size_t n = frames.front().size();
        for (const auto& fr : frames)
            if (fr.size() != n) throw std::runtime_error("stream CSV frames are ragged");
    }
    return frames;
}

std::string labels_to_json(const LabeledStream& s) {
    nlohmann::json j;
    j["frame_length"] = s.frame_length;
    j["frames"] = s.frames.size();
    j["onset_frame"] = s.spec.onset_frame;
    j["anomaly"] = anomaly_name(s.spec.anomaly.kind);
    j["regime"] = regime_name(s.spec.regime);
    j["seed"] = s.spec.seed;
    j["labels"] = s.labels;
    return j.dump(2) + "\n";
}

LabelsInfo parse_labels_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    LabelsInfo info;
    info.labels = j.at("labels").get<std::vector<std::uint8_t>>();
    info.onset_frame = j.at("onset_frame").get<std::size_t>();
    info.frame_length = j.at("frame_length").get<std::size_t>();
    info.anomaly = j.at("anomaly").get<std::string>();
    info.regime = j.at("regime").get<std::string>();
    info.seed = j.at("seed").get<std::uint64_t>();
    return info;
}

}  // namespace noisesig
