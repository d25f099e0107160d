#pragma once

// Stage 1: raw AR audio frames plus annotated cue streams become
// SocialContextFrames. Everything here is a pure function of its inputs.

#include "sear/model.hpp"
#include "sear/validate.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace sear::context {

constexpr std::size_t kDefaultFrameSize = 1024;
constexpr int kDefaultSampleRateHz = 16000;

struct AudioFrame {
    std::vector<double> samples;
    int sampleRateHz = kDefaultSampleRateHz;
    Millis startMs = 0;

    double duration_ms() const {
        return sampleRateHz > 0 ? 1000.0 * static_cast<double>(samples.size()) / sampleRateHz : 0.0;
    }
};

/// Checks length == frameSize, finite samples with |s| <= 1, positive sample rate.
ValidationReport validate(const AudioFrame& frame, std::size_t frameSize = kDefaultFrameSize);

struct SpeakerCalibration {
    double ratioThreshold = 0.60;
    double silenceFloor = 1e-6;
    double bandLowHz = 0.0;
    double bandHighHz = 1000.0;
};

ValidationReport validate(const SpeakerCalibration& cal);

struct BandEnergy {
    double bandEnergy = 0.0;
    double totalEnergy = 0.0;
    double bandFraction = 0.0;
};

/// Hann-windowed magnitude spectrum; sums |X_k|^2 over bins k in [0, N/2]
/// whose center frequency k*fs/N lies in [lowHz, highHz] (inclusive), and
/// over all bins up to Nyquist. bandFraction is 0 below the silence floor.
/// Throws ArgumentError unless 0 <= lowHz < highHz <= fs/2.
BandEnergy compute_band_energy(const AudioFrame& frame, double lowHz, double highHz, double silenceFloor = 1e-6);

enum class SpeakerLabel { Primary, Other, Silence };

std::string_view to_string(SpeakerLabel v);

/// Wearer speech (bone + air conduction) concentrates energy below 1 kHz.
SpeakerLabel attribute_speaker(const AudioFrame& frame, const SpeakerCalibration& cal);

/// Per-user calibration: threshold at the midpoint between the mean low-band
/// fractions of enrollment frames from the wearer and from other speakers.
/// Silent frames are ignored; throws ArgumentError if either set has none left.
SpeakerCalibration calibrate_speaker(std::span<const AudioFrame> wearerFrames,
                                     std::span<const AudioFrame> otherFrames,
                                     SpeakerCalibration base = {});

struct TranscriptToken {
    std::string text;
    Millis startMs = 0;
    Millis endMs = 0;

    bool operator==(const TranscriptToken&) const = default;
};

/// Majority vote of frame labels under each token (ties go to Primary),
/// merging adjacent equal-speaker tokens. Tokens heard only over silence are
/// dropped; a token with no overlapping frame raises AttributionError.
std::vector<Segment> segment_transcript(std::span<const AudioFrame> frames,
                                        std::span<const TranscriptToken> tokens,
                                        const SpeakerCalibration& cal);

/// Object label → Indoor/Outdoor vote. Labels absent from the map are neutral.
using EnvironmentVocabulary = std::map<std::string, Setting>;
/// Expression key (e.g. "expression.smile") → emotion label.
using EmotionTable = std::map<std::string, std::string>;

EnvironmentVocabulary default_environment_vocabulary();
EmotionTable default_emotion_table();

Setting classify_environment(std::span<const std::string> objectLabels, const EnvironmentVocabulary& vocabulary);

/// Arg-max over expression keys known to the table; ties go to the
/// lexicographically smaller key. No known key gives ("neutral", 0).
Emotion estimate_emotion(const std::map<std::string, double>& expressionScores, const EmotionTable& table);

struct Window {
    Millis startMs = 0;
    Millis endMs = 0;
};

struct SynthesisConfig {
    SpeakerCalibration calibration;
    EnvironmentVocabulary environment = default_environment_vocabulary();
    EmotionTable emotions = default_emotion_table();
};

/// Payload key prefix for expression scores on Visual cues.
inline constexpr std::string_view kExpressionPrefix = "expression.";
/// Payload key carrying a detected object on Environment cues.
inline constexpr std::string_view kObjectLabelKey = "object.label";

/// Cues and frames are taken from the half-open window [start, end); tokens
/// must lie entirely inside it. Visual cues are grouped by track (latest
/// score per key wins), Environment labels feed classify_environment.
SocialContextFrame synthesize_context_frame(std::span<const CueEvent> events,
                                            std::span<const AudioFrame> frames,
                                            std::span<const TranscriptToken> tokens,
                                            Window window,
                                            const SynthesisConfig& config = {});

}  // namespace sear::context
