#pragma once

// Hand-rolled random generators for property tests. Reals are multiples of
// 1/100 so they survive the 9-significant-digit writers unchanged.

#include "sear/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace sear::testgen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }
    double unit() { return integer(0, 100) / 100.0; }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    std::mt19937_64& engine() { return rng_; }

    std::string word() {
        static const char* words[] = {"video", "games", "coffee", "hiking", "tax", "law", "cmu", "graduate",
                                      "wukong", "music", "jazz", "cat", "dog", "travel", "paris", "chess",
                                      "soccer", "ramen", "startup", "robotics", "novel", "sci", "fi"};
        return words[integer(0, static_cast<int>(std::size(words)) - 1)];
    }

    std::string sentence(int minWords = 1, int maxWords = 5) {
        std::string s;
        const int n = integer(minWords, maxWords);
        for (int i = 0; i < n; ++i) s += (i ? " " : "") + word();
        return s;
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
    }

    FactCategory category() { return static_cast<FactCategory>(integer(0, 4)); }
    SourceModality sourceModality() { return static_cast<SourceModality>(integer(0, 2)); }

    Fact fact() {
        return Fact{category(), sentence(), unit(), sourceModality(), static_cast<Millis>(integer(0, 1'000'000))};
    }

    CueEvent cue() {
        CueEvent e;
        e.timestampMs = integer(0, 100000);
        e.modality = static_cast<Modality>(integer(0, 2));
        if (e.modality == Modality::Visual || (e.modality == Modality::Audio && coin()))
            e.trackId = "t" + std::to_string(integer(0, 3));
        if (coin()) e.payload["expression.smile"] = unit();
        if (coin()) e.payload["object.label"] = word();
        return e;
    }

    SocialContextFrame frame() {
        SocialContextFrame f;
        f.windowStartMs = integer(0, 1000);
        f.windowEndMs = f.windowStartMs + integer(1, 5000);
        for (int i = integer(0, 3); i > 0; --i) {
            FaceTrack t;
            t.trackId = "t" + std::to_string(i);
            t.expressionScores["expression.smile"] = unit();
            t.dominantExpression = "smile";
            t.emotion = {"happy", unit()};
            f.faceTracks.push_back(t);
        }
        for (int i = integer(0, 3); i > 0; --i) {
            const Millis s = f.windowStartMs + integer(0, static_cast<int>(f.windowEndMs - f.windowStartMs));
            f.transcript.push_back({coin() ? Speaker::Primary : Speaker::Other, sentence(), s, s});
        }
        f.environment.objectLabels = {word(), word()};
        f.environment.setting = static_cast<Setting>(integer(0, 2));
        return f;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace sear::testgen
