#include "sear/context.hpp"

#include "sear/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace sear::context {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    struct Buffers {
        double* in = nullptr;
        fftw_complex* out = nullptr;
    };

    ~PlanCache() {
        for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(n); it != plans_.end()) return it->second;
        auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::unordered_map<std::size_t, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

/// Squared magnitudes of the one-sided spectrum of the Hann-windowed frame.
std::vector<double> power_spectrum(std::span<const double> samples) {
    const std::size_t n = samples.size();
    std::unique_ptr<double, FftwDeleter> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwDeleter> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
    for (std::size_t i = 0; i < n; ++i) {
        // periodic Hann: an on-bin tone leaks only into its two neighbours
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
        in.get()[i] = samples[i] * w;
    }
    fftw_execute_dft_r2c(plan_cache().get(n), in.get(), out.get());
    std::vector<double> power(n / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) {
        const double re = out.get()[k][0];
        const double im = out.get()[k][1];
        power[k] = re * re + im * im;
    }
    return power;
}

bool overlaps(const AudioFrame& frame, const TranscriptToken& token) {
    const double fs = static_cast<double>(frame.startMs);
    const double fe = fs + frame.duration_ms();
    const double ts = static_cast<double>(token.startMs);
    const double te = static_cast<double>(token.endMs);
    if (ts == te) return fs <= ts && ts < fe;
    return fs < te && ts < fe;
}

}  // namespace

ValidationReport validate(const AudioFrame& frame, std::size_t frameSize) {
    ValidationReport r;
    if (frame.samples.size() != frameSize) r.add("samples", "length == configured N");
    if (frame.sampleRateHz <= 0) r.add("sampleRateHz", "sampleRateHz > 0");
    for (std::size_t i = 0; i < frame.samples.size(); ++i) {
        const double s = frame.samples[i];
        if (!std::isfinite(s) || std::abs(s) > 1.0) {
            r.add("samples[" + std::to_string(i) + "]", "all samples finite, |s| ≤ 1");
            break;
        }
    }
    return r;
}

ValidationReport validate(const SpeakerCalibration& cal) {
    ValidationReport r;
    if (!(cal.ratioThreshold > 0.0 && cal.ratioThreshold < 1.0)) r.add("ratioThreshold", "ratioThreshold ∈ (0,1)");
    if (!(cal.silenceFloor > 0.0)) r.add("silenceFloor", "silenceFloor > 0");
    if (!(cal.bandLowHz >= 0.0 && cal.bandLowHz < cal.bandHighHz)) r.add("bandLowHz", "0 ≤ bandLowHz < bandHighHz");
    return r;
}

BandEnergy compute_band_energy(const AudioFrame& frame, double lowHz, double highHz, double silenceFloor) {
    const double nyquist = frame.sampleRateHz / 2.0;
    if (!(lowHz >= 0.0 && lowHz < highHz && highHz <= nyquist))
        throw ArgumentError("band bounds must satisfy 0 <= low < high <= sampleRateHz/2");
    if (frame.samples.empty()) return {};

    const auto power = power_spectrum(frame.samples);
    const double binHz = static_cast<double>(frame.sampleRateHz) / static_cast<double>(frame.samples.size());
    BandEnergy e;
    for (std::size_t k = 0; k < power.size(); ++k) {
        const double f = binHz * static_cast<double>(k);
        e.totalEnergy += power[k];
        if (f >= lowHz && f <= highHz) e.bandEnergy += power[k];
    }
    e.bandFraction = e.totalEnergy < silenceFloor ? 0.0 : std::clamp(e.bandEnergy / e.totalEnergy, 0.0, 1.0);
    return e;
}

std::string_view to_string(SpeakerLabel v) {
    switch (v) {
        case SpeakerLabel::Primary: return "Primary";
        case SpeakerLabel::Other: return "Other";
        case SpeakerLabel::Silence: return "Silence";
    }
    return "?";
}

SpeakerLabel attribute_speaker(const AudioFrame& frame, const SpeakerCalibration& cal) {
    const double high = std::min(cal.bandHighHz, frame.sampleRateHz / 2.0);
    const auto e = compute_band_energy(frame, cal.bandLowHz, high, cal.silenceFloor);
    if (e.totalEnergy < cal.silenceFloor) return SpeakerLabel::Silence;
    return e.bandFraction >= cal.ratioThreshold ? SpeakerLabel::Primary : SpeakerLabel::Other;
}

SpeakerCalibration calibrate_speaker(std::span<const AudioFrame> wearerFrames,
                                     std::span<const AudioFrame> otherFrames,
                                     SpeakerCalibration base) {
    auto mean_fraction = [&](std::span<const AudioFrame> frames) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& f : frames) {
            const double high = std::min(base.bandHighHz, f.sampleRateHz / 2.0);
            const auto e = compute_band_energy(f, base.bandLowHz, high, base.silenceFloor);
            if (e.totalEnergy < base.silenceFloor) continue;
            sum += e.bandFraction;
            ++n;
        }
        if (n == 0) throw ArgumentError("calibration needs at least one non-silent frame per speaker class");
        return sum / static_cast<double>(n);
    };
    const double wearer = mean_fraction(wearerFrames);
    const double other = mean_fraction(otherFrames);
    if (!(wearer > other)) throw ArgumentError("wearer frames must carry more low-band energy than other speakers");
    base.ratioThreshold = 0.5 * (wearer + other);
    return base;
}

std::vector<Segment> segment_transcript(std::span<const AudioFrame> frames,
                                        std::span<const TranscriptToken> tokens,
                                        const SpeakerCalibration& cal) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].endMs < tokens[i].startMs)
            throw ArgumentError("token '" + tokens[i].text + "' ends before it starts");
        if (i > 0 && tokens[i].startMs < tokens[i - 1].endMs)
            throw ArgumentError("tokens must be time-ordered and non-overlapping");
    }

    std::vector<SpeakerLabel> labels(frames.size());
    std::vector<bool> labelled(frames.size(), false);

    std::vector<Segment> segments;
    for (const auto& token : tokens) {
        int primary = 0;
        int other = 0;
        bool any = false;
        for (std::size_t f = 0; f < frames.size(); ++f) {
            if (!overlaps(frames[f], token)) continue;
            any = true;
            if (!labelled[f]) {
                labels[f] = attribute_speaker(frames[f], cal);
                labelled[f] = true;
            }
            if (labels[f] == SpeakerLabel::Primary) ++primary;
            else if (labels[f] == SpeakerLabel::Other) ++other;
        }
        if (!any) {
            throw AttributionError("no audio frame overlaps token '" + token.text + "' [" +
                                   std::to_string(token.startMs) + ", " + std::to_string(token.endMs) + "]");
        }
        if (primary == 0 && other == 0) continue;
        const Speaker speaker = primary >= other ? Speaker::Primary : Speaker::Other;
        if (!segments.empty() && segments.back().speaker == speaker) {
            segments.back().text += " " + token.text;
            segments.back().endMs = token.endMs;
        } else {
            segments.push_back({speaker, token.text, token.startMs, token.endMs});
        }
    }
    return segments;
}

EnvironmentVocabulary default_environment_vocabulary() {
    EnvironmentVocabulary v;
    for (const char* label : {"sofa", "couch", "lamp", "chair", "table", "desk", "bed", "tv", "bookshelf", "book",
                              "refrigerator", "microwave", "oven", "laptop", "keyboard", "monitor", "cup",
                              "coffee machine", "window blind", "ceiling", "dining table", "potted plant"})
        v[label] = Setting::Indoor;
    for (const char* label : {"tree", "car", "traffic light", "bicycle", "bus", "truck", "motorcycle", "street sign",
                              "stop sign", "bench", "sky", "parking meter", "fire hydrant", "road", "sidewalk",
                              "building", "grass"})
        v[label] = Setting::Outdoor;
    return v;
}

EmotionTable default_emotion_table() {
    return {
        {"expression.smile", "happy"},
        {"expression.laugh", "happy"},
        {"expression.frown", "displeased"},
        {"expression.brow_furrow", "confused"},
        {"expression.surprise", "surprised"},
        {"expression.sad", "sad"},
        {"expression.neutral", "neutral"},
    };
}

Setting classify_environment(std::span<const std::string> objectLabels, const EnvironmentVocabulary& vocabulary) {
    int indoor = 0;
    int outdoor = 0;
    for (const auto& label : objectLabels) {
        auto it = vocabulary.find(label);
        if (it == vocabulary.end()) continue;
        if (it->second == Setting::Indoor) ++indoor;
        else if (it->second == Setting::Outdoor) ++outdoor;
    }
    if (indoor > outdoor) return Setting::Indoor;
    if (outdoor > indoor) return Setting::Outdoor;
    return Setting::Unknown;
}

Emotion estimate_emotion(const std::map<std::string, double>& expressionScores, const EmotionTable& table) {
    Emotion best{"neutral", 0.0};
    bool found = false;
    // map iteration is key-ordered, so strict > keeps the smaller key on ties
    for (const auto& [key, score] : expressionScores) {
        auto it = table.find(key);
        if (it == table.end()) continue;
        if (!found || score > best.confidence) {
            best = {it->second, score};
            found = true;
        }
    }
    best.confidence = std::clamp(best.confidence, 0.0, 1.0);
    return best;
}

SocialContextFrame synthesize_context_frame(std::span<const CueEvent> events,
                                            std::span<const AudioFrame> frames,
                                            std::span<const TranscriptToken> tokens,
                                            Window window,
                                            const SynthesisConfig& config) {
    if (!(window.startMs < window.endMs)) throw ArgumentError("window must satisfy start < end");

    SocialContextFrame out;
    out.windowStartMs = window.startMs;
    out.windowEndMs = window.endMs;

    std::map<std::string, FaceTrack> tracks;
    std::vector<std::string> objects;
    for (const auto& e : events) {
        if (e.timestampMs < window.startMs || e.timestampMs >= window.endMs) continue;
        if (e.modality == Modality::Visual && e.trackId) {
            auto& track = tracks[*e.trackId];
            track.trackId = *e.trackId;
            for (const auto& [key, value] : e.payload) {
                const auto* score = std::get_if<double>(&value);
                if (!score || !key.starts_with(kExpressionPrefix)) continue;
                track.expressionScores[key] = std::clamp(*score, 0.0, 1.0);
            }
        } else if (e.modality == Modality::Environment) {
            if (auto it = e.payload.find(std::string(kObjectLabelKey)); it != e.payload.end()) {
                if (const auto* label = std::get_if<std::string>(&it->second)) objects.push_back(*label);
            }
        }
    }

    for (auto& [id, track] : tracks) {
        std::string dominant;
        double best = -1.0;
        for (const auto& [key, score] : track.expressionScores) {
            if (score > best) {
                best = score;
                dominant = key.substr(kExpressionPrefix.size());
            }
        }
        track.dominantExpression = dominant;
        track.emotion = estimate_emotion(track.expressionScores, config.emotions);
        out.faceTracks.push_back(std::move(track));
    }

    std::vector<AudioFrame> inFrames;
    for (const auto& f : frames) {
        const double fs = static_cast<double>(f.startMs);
        if (fs < static_cast<double>(window.endMs) && fs + f.duration_ms() > static_cast<double>(window.startMs))
            inFrames.push_back(f);
    }
    std::vector<TranscriptToken> inTokens;
    for (const auto& t : tokens) {
        if (t.startMs >= window.startMs && t.endMs <= window.endMs) inTokens.push_back(t);
    }
    out.transcript = segment_transcript(inFrames, inTokens, config.calibration);

    std::sort(objects.begin(), objects.end());
    out.environment.setting = classify_environment(objects, config.environment);
    out.environment.objectLabels = std::move(objects);
    return out;
}

}  // namespace sear::context
