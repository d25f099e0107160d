#include "dft_oracle.hpp"
#include "generators.hpp"

#include "sear/context.hpp"
#include "sear/errors.hpp"

#include <doctest.h>

using namespace sear;
using namespace sear::context;

namespace {

AudioFrame frame_of(std::vector<double> samples, Millis startMs = 0) {
    return AudioFrame{std::move(samples), 16000, startMs};
}

AudioFrame primary_frame(Millis startMs) { return frame_of(oracle::sine(300.0, 0.8), startMs); }
AudioFrame other_frame(Millis startMs) { return frame_of(oracle::sine(3000.0, 0.8), startMs); }
AudioFrame silent_frame(Millis startMs) { return frame_of(std::vector<double>(1024, 0.0), startMs); }

std::vector<double> mix(double a, double b) {
    auto x = oracle::sine(a, 0.5);
    const auto y = oracle::sine(b, 0.5);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return x;
}

}  // namespace

TEST_CASE("band energy: zero frame is (0, 0, 0)") {
    const auto e = compute_band_energy(silent_frame(0), 0, 1000);
    CHECK(e.bandEnergy == 0.0);
    CHECK(e.totalEnergy == 0.0);
    CHECK(e.bandFraction == 0.0);
}

TEST_CASE("band energy: matches the direct DFT oracle") {
    // frozen from the oracle: 500 Hz -> 1.0, 2000 Hz -> 3e-29, 300 Hz -> 0.99999999997,
    // 300+3000 Hz equal amplitude -> 0.499999999
    struct Case {
        std::vector<double> x;
        double frozen;
    };
    const std::vector<Case> cases{{oracle::sine(500.0), 1.0},
                                  {oracle::sine(2000.0), 0.0},
                                  {oracle::sine(300.0), 0.999999999971},
                                  {mix(300.0, 3000.0), 0.499999998945}};
    for (const auto& c : cases) {
        const auto ref = oracle::dft_band(c.x, 16000, 0, 1000);
        const auto got = compute_band_energy(frame_of(c.x), 0, 1000);
        CHECK(got.bandFraction == doctest::Approx(ref.fraction()).epsilon(1e-9));
        CHECK(got.totalEnergy == doctest::Approx(ref.total).epsilon(1e-9));
        CHECK(got.bandFraction == doctest::Approx(c.frozen).epsilon(1e-9));
    }
}

TEST_CASE("band energy: 500 Hz in band, 2000 Hz out of band") {
    CHECK(compute_band_energy(frame_of(oracle::sine(500.0)), 0, 1000).bandFraction >= 0.999);
    CHECK(compute_band_energy(frame_of(oracle::sine(2000.0)), 0, 1000).bandFraction <= 0.001);
}

TEST_CASE("band energy: invalid band bounds") {
    const auto f = frame_of(oracle::sine(500.0));
    CHECK_THROWS_AS(compute_band_energy(f, 1000, 1000), ArgumentError);
    CHECK_THROWS_AS(compute_band_energy(f, -1, 1000), ArgumentError);
    CHECK_THROWS_AS(compute_band_energy(f, 0, 8001), ArgumentError);
    CHECK_NOTHROW(compute_band_energy(f, 0, 8000));
}

TEST_CASE("band edge at 1000 Hz is bin 64, inclusive") {
    // on-bin 1000 Hz tone: Hann powers 1/16, 1/4, 1/16 on bins 63..65; 63 and 64 are in band
    const auto x = oracle::sine(1000.0);
    const auto e = compute_band_energy(frame_of(x), 0, 1000);
    const auto ref = oracle::dft_band(x, 16000, 0, 1000);
    CHECK(e.bandFraction == doctest::Approx(ref.fraction()).epsilon(1e-9));
    CHECK(e.bandFraction == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("attribute speaker") {
    const SpeakerCalibration cal;
    CHECK(attribute_speaker(silent_frame(0), cal) == SpeakerLabel::Silence);
    CHECK(attribute_speaker(frame_of(oracle::sine(300.0)), cal) == SpeakerLabel::Primary);
    CHECK(attribute_speaker(frame_of(mix(300.0, 3000.0)), cal) == SpeakerLabel::Other);
}

TEST_CASE("property: Parseval bounds, amplitude invariance, monotone band") {
    testgen::Gen g(11);
    const SpeakerCalibration cal;
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<double> x(1024, 0.0);
        const int tones = g.integer(1, 3);
        for (int t = 0; t < tones; ++t) {
            const auto s = oracle::sine(g.real(50.0, 7900.0), 0.9 / tones);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += s[i];
        }
        for (auto& v : x) v += 0.01 * g.gauss() / tones;
        for (auto& v : x) v = std::clamp(v, -1.0, 1.0);

        const auto e = compute_band_energy(frame_of(x), 0, 1000);
        CHECK(e.bandEnergy <= e.totalEnergy);
        CHECK(e.bandFraction >= 0.0);
        CHECK(e.bandFraction <= 1.0);

        const double c = g.real(0.05, 0.95);
        auto scaled = x;
        for (auto& v : scaled) v *= c;
        const auto es = compute_band_energy(frame_of(scaled), 0, 1000);
        CHECK(es.bandFraction == doctest::Approx(e.bandFraction).epsilon(1e-9));
        if (std::abs(e.bandFraction - cal.ratioThreshold) > 1e-9)
            CHECK(attribute_speaker(frame_of(scaled), cal) == attribute_speaker(frame_of(x), cal));

        const double lo = g.real(0.0, 2000.0);
        const double hi = lo + g.real(10.0, 2000.0);
        const auto narrow = compute_band_energy(frame_of(x), lo, hi);
        const auto wide = compute_band_energy(frame_of(x), std::max(0.0, lo - 300.0), std::min(8000.0, hi + 300.0));
        CHECK(wide.bandEnergy >= narrow.bandEnergy);
    }
}

TEST_CASE("calibration threshold sits between wearer and other speakers") {
    std::vector<AudioFrame> wearer{primary_frame(0), silent_frame(64)};
    std::vector<AudioFrame> others{frame_of(mix(200.0, 2500.0))};
    const auto cal = calibrate_speaker(wearer, others);
    CHECK(cal.ratioThreshold > 0.5);
    CHECK(cal.ratioThreshold < 1.0);
    CHECK(validate(cal).ok());
    CHECK_THROWS_AS(calibrate_speaker(std::vector<AudioFrame>{silent_frame(0)}, others), ArgumentError);
}

TEST_CASE("segment transcript") {
    const SpeakerCalibration cal;

    SUBCASE("unanimous primary") {
        std::vector<AudioFrame> frames{primary_frame(0), primary_frame(64), primary_frame(128)};
        std::vector<TranscriptToken> tokens{{"hello", 0, 190}};
        const auto segs = segment_transcript(frames, tokens, cal);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0] == Segment{Speaker::Primary, "hello", 0, 190});
    }

    SUBCASE("primary, primary, other merges the first two") {
        std::vector<AudioFrame> frames{primary_frame(0), primary_frame(64), other_frame(128)};
        std::vector<TranscriptToken> tokens{{"nice", 0, 60}, {"day", 64, 120}, {"indeed", 130, 190}};
        const auto segs = segment_transcript(frames, tokens, cal);
        REQUIRE(segs.size() == 2);
        CHECK(segs[0] == Segment{Speaker::Primary, "nice day", 0, 120});
        CHECK(segs[1] == Segment{Speaker::Other, "indeed", 130, 190});
    }

    SUBCASE("tie goes to primary") {
        std::vector<AudioFrame> frames{primary_frame(0), other_frame(64)};
        std::vector<TranscriptToken> tokens{{"well", 30, 100}};
        const auto segs = segment_transcript(frames, tokens, cal);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].speaker == Speaker::Primary);
    }

    SUBCASE("silence-only tokens are dropped") {
        std::vector<AudioFrame> frames{silent_frame(0), other_frame(64)};
        std::vector<TranscriptToken> tokens{{"uh", 0, 60}, {"yes", 70, 100}};
        const auto segs = segment_transcript(frames, tokens, cal);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].text == "yes");
    }

    SUBCASE("token without audio is an attribution error") {
        std::vector<AudioFrame> frames{primary_frame(0)};
        std::vector<TranscriptToken> tokens{{"late", 500, 600}};
        CHECK_THROWS_AS(segment_transcript(frames, tokens, cal), AttributionError);
    }

    SUBCASE("overlapping tokens violate the precondition") {
        std::vector<AudioFrame> frames{primary_frame(0)};
        std::vector<TranscriptToken> tokens{{"a", 0, 40}, {"b", 30, 60}};
        CHECK_THROWS_AS(segment_transcript(frames, tokens, cal), ArgumentError);
    }
}

TEST_CASE("classify environment") {
    const auto vocab = default_environment_vocabulary();
    CHECK(classify_environment(std::vector<std::string>{"sofa", "lamp"}, vocab) == Setting::Indoor);
    CHECK(classify_environment(std::vector<std::string>{"tree", "car", "traffic light"}, vocab) == Setting::Outdoor);
    CHECK(classify_environment(std::vector<std::string>{"sofa", "tree"}, vocab) == Setting::Unknown);
    CHECK(classify_environment(std::vector<std::string>{}, vocab) == Setting::Unknown);
    CHECK(classify_environment(std::vector<std::string>{"person", "sofa"}, vocab) == Setting::Indoor);
}

TEST_CASE("estimate emotion") {
    const auto table = default_emotion_table();
    CHECK(estimate_emotion({}, table) == Emotion{"neutral", 0.0});
    CHECK(estimate_emotion({{"expression.smile", 0.9}}, table) == Emotion{"happy", 0.9});
    CHECK(estimate_emotion({{"expression.smile", 0.4}, {"expression.frown", 0.7}}, table) ==
          Emotion{"displeased", 0.7});
    CHECK(estimate_emotion({{"expression.wink", 0.9}}, table) == Emotion{"neutral", 0.0});
}

TEST_CASE("synthesize context frame") {
    SUBCASE("empty inputs") {
        const auto f = synthesize_context_frame({}, {}, {}, {0, 1000});
        CHECK(f.faceTracks.empty());
        CHECK(f.transcript.empty());
        CHECK(f.environment.setting == Setting::Unknown);
        CHECK(validate(f).ok());
    }

    SUBCASE("one track, one indoor object, one primary token") {
        std::vector<CueEvent> events{
            {10, "t1", Modality::Visual, {{"expression.smile", 0.8}}},
            {20, std::nullopt, Modality::Environment, {{"object.label", std::string("sofa")}}},
        };
        std::vector<AudioFrame> frames{primary_frame(0), primary_frame(64)};
        std::vector<TranscriptToken> tokens{{"hi there", 5, 100}};
        const auto f = synthesize_context_frame(events, frames, tokens, {0, 1000});
        REQUIRE(f.faceTracks.size() == 1);
        CHECK(f.faceTracks[0].trackId == "t1");
        CHECK(f.faceTracks[0].dominantExpression == "smile");
        CHECK(f.faceTracks[0].emotion == Emotion{"happy", 0.8});
        REQUIRE(f.transcript.size() == 1);
        CHECK(f.transcript[0] == Segment{Speaker::Primary, "hi there", 5, 100});
        CHECK(f.environment.setting == Setting::Indoor);
        CHECK(f.environment.objectLabels == std::vector<std::string>{"sofa"});
        CHECK(validate(f).ok());
    }

    SUBCASE("events outside the window are excluded") {
        std::vector<CueEvent> events{
            {1500, "t1", Modality::Visual, {{"expression.smile", 0.8}}},
            {1000, std::nullopt, Modality::Environment, {{"object.label", std::string("tree")}}},
        };
        std::vector<TranscriptToken> tokens{{"later", 1200, 1300}};
        const auto f = synthesize_context_frame(events, {}, tokens, {0, 1000});
        CHECK(f.faceTracks.empty());
        CHECK(f.transcript.empty());
        CHECK(f.environment.objectLabels.empty());
    }

    SUBCASE("attribution errors propagate") {
        std::vector<TranscriptToken> tokens{{"orphan", 100, 200}};
        CHECK_THROWS_AS(synthesize_context_frame({}, {}, tokens, {0, 1000}), AttributionError);
    }

    SUBCASE("malformed window") { CHECK_THROWS_AS(synthesize_context_frame({}, {}, {}, {5, 5}), ArgumentError); }
}

TEST_CASE("property: synthesized frames validate and are deterministic") {
    testgen::Gen g(3);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<CueEvent> events;
        for (int i = 0; i < 12; ++i) {
            auto e = g.cue();
            e.timestampMs = g.integer(0, 2000);
            if (e.modality == Modality::Visual) e.payload["expression.frown"] = g.real(-0.5, 1.5);
            events.push_back(e);
        }
        std::vector<AudioFrame> frames;
        for (int i = 0; i < 16; ++i) frames.push_back(g.coin() ? primary_frame(i * 64) : other_frame(i * 64));
        std::vector<TranscriptToken> tokens;
        for (Millis t = 0; t + 50 < 1024; t += 100) tokens.push_back({g.word(), t, t + 50});
        const Window w{static_cast<Millis>(g.integer(0, 300)), static_cast<Millis>(g.integer(500, 1024))};
        const auto a = synthesize_context_frame(events, frames, tokens, w);
        const auto b = synthesize_context_frame(events, frames, tokens, w);
        CHECK(validate(a).ok());
        CHECK(a == b);
    }
}
