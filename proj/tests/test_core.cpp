#include "generators.hpp"

#include "sear/codec.hpp"
#include "sear/text.hpp"
#include "sear/validate.hpp"

#include <doctest.h>

#include <cmath>

using namespace sear;

namespace {

template <typename T>
T round_trip(const T& v) {
    const Json j = v;
    return decode<T>(parse_json(dump_line(j)));
}

const TraitVocabulary kVocab{"name", "profession", "ageBand", "residence"};

}  // namespace

TEST_CASE("validate: CueEvent invariants") {
    CueEvent e;
    e.timestampMs = -1;
    e.modality = Modality::Environment;
    auto r = validate(e);
    CHECK(r.mentions("timestampMs ≥ 0"));

    e.timestampMs = 10;
    CHECK(validate(e).ok());

    e.modality = Modality::Visual;
    CHECK(validate(e).mentions("Visual cues must carry a trackId"));
    e.trackId = "t1";
    CHECK(validate(e).ok());

    e.modality = Modality::Environment;
    CHECK(validate(e).mentions("Environment cues must not"));
}

TEST_CASE("validate: unit-norm embedding passes, others fail") {
    EmbeddingEntry e;
    e.vector = {1.0, 0.0, 0.0};
    CHECK(validate(e, 3).ok());
    e.vector = {0.6, 0.8, 0.0};
    CHECK(validate(e, 3).ok());
    e.vector = {0.6, 0.9, 0.0};
    CHECK(validate(e, 3).mentions("‖vector‖₂"));
    CHECK(validate(EmbeddingEntry{0, {1.0, 0.0}, "r", "d", SourceModality::Text}, 3).mentions("dimension"));
}

TEST_CASE("validate: consecutive agent utterances violate alternation") {
    ConversationState s;
    s.history = {{Author::Agent, "hi", "Opening", 0}, {Author::Agent, "hello?", "Opening", 1}};
    CHECK(validate(s).mentions("authors alternate"));

    s.history[1].author = Author::Target;
    CHECK(validate(s).ok());

    s.history[1].turnIndex = 0;
    CHECK(validate(s).mentions("turnIndex strictly increasing"));
}

TEST_CASE("validate: conversation stage index bounded by template") {
    StrategyTemplate t{"t", 0, {}, {{"Opening", "", "x", {}, 0}}};
    ConversationState s;
    s.currentStageIndex = 1;
    CHECK(validate(s, t).ok());
    s.currentStageIndex = 2;
    CHECK(validate(s, t).mentions("currentStageIndex ≤"));
}

TEST_CASE("validate: strategy template invariants") {
    StrategyTemplate t;
    t.templateId = "x";
    CHECK(validate(t).mentions("at least one stage"));
    t.stages = {{"A", "", "p", {}, 0}, {"A", "", "p", {}, 0}};
    CHECK(validate(t).mentions("stage names unique"));
    t.stages.pop_back();
    t.requirements = {{PredicateKind::FactKeyword, "games", 0.0}};
    CHECK(validate(t).mentions("all weights > 0"));
    t.requirements = {{PredicateKind::HasFactCategory, "Hobby", 1.0}};
    CHECK_FALSE(validate(t).ok());
    t.requirements = {{PredicateKind::HasFactCategory, "Interest", 1.0}};
    CHECK(validate(t).ok());
}

TEST_CASE("validate: role records use the declared trait vocabulary") {
    RoleRecord r{"jonny", "Jonny", {{"profession", "engineer"}}, {}, {}};
    CHECK(validate(r, kVocab).ok());
    r.traits["shoeSize"] = "44";
    CHECK(validate(r, kVocab).mentions("trait key not in the declared vocabulary"));

    std::vector<RoleRecord> db{{"a", "A", {}, {}, {}}, {"a", "A2", {}, {}, {}}};
    CHECK(validate(db, kVocab).mentions("roleId unique"));
}

TEST_CASE("validate: facts, profiles, frames and responses") {
    CHECK(validate(Fact{FactCategory::Interest, "  \t ", 0.5, SourceModality::Text, 0}).mentions("text non-empty"));
    CHECK(validate(Fact{FactCategory::Interest, "x", 1.5, SourceModality::Text, 0}).mentions("salience"));

    SocialProfile p;
    p.rankedFacts = {{Fact{FactCategory::Interest, "b", 0.5, SourceModality::Text, 0}, 0.5},
                     {Fact{FactCategory::Interest, "a", 0.5, SourceModality::Text, 0}, 0.5}};
    CHECK(validate(p).mentions("ties by text"));
    std::swap(p.rankedFacts[0], p.rankedFacts[1]);
    CHECK(validate(p).ok());

    SocialContextFrame f;
    f.windowStartMs = 10;
    f.windowEndMs = 10;
    CHECK(validate(f).mentions("windowStartMs < windowEndMs"));
    f.windowEndMs = 20;
    f.transcript = {{Speaker::Primary, "hi", 5, 12}};
    CHECK(validate(f).mentions("within the window"));

    QuestionnaireResponse q{"P-1", Section::SEEffectiveness, "PhotoLink", 6};
    CHECK(validate(q).mentions("Likert values"));
    q.value = 5;
    CHECK(validate(q).ok());
}

TEST_CASE("validate is total over random values") {
    testgen::Gen g(7);
    for (int i = 0; i < 300; ++i) {
        CHECK_NOTHROW(validate(g.cue()));
        CHECK_NOTHROW(validate(g.frame()));
        CHECK_NOTHROW(validate(g.fact()));
    }
}

TEST_CASE("property: decode(encode(x)) == x for every domain type") {
    testgen::Gen g(42);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cue = g.cue();
        CHECK(round_trip(cue) == cue);
        const auto frame = g.frame();
        CHECK(round_trip(frame) == frame);

        RoleRecord role{"r" + std::to_string(trial), g.word(), {{"profession", g.word()}}, {}, {}};
        for (int i = g.integer(0, 4); i > 0; --i) {
            role.facts.push_back(g.fact());
            role.embeddingIds.push_back(g.integer(0, 99));
        }
        CHECK(round_trip(role) == role);

        EmbeddingEntry entry{trial, {0.6, 0.0, 0.8}, role.roleId, "doc", g.sourceModality()};
        CHECK(round_trip(entry) == entry);

        SocialProfile profile{role.roleId, role.traits, {}, frame.environment, g.integer(0, 9999)};
        for (const auto& f : role.facts) profile.rankedFacts.push_back({f, g.unit()});
        CHECK(round_trip(profile) == profile);

        StrategyTemplate tpl{"tpl", g.integer(-2, 2),
                             {{PredicateKind::FactKeyword, g.word(), g.integer(1, 100) / 100.0}},
                             {{"Opening", g.sentence(), "Say {FACT_0} {HISTORY}", {g.word()}, g.integer(0, 3)}}};
        CHECK(round_trip(tpl) == tpl);

        ConversationState state;
        for (int i = 0; i < g.integer(0, 6); ++i)
            state.history.push_back({i % 2 ? Author::Target : Author::Agent, g.sentence(), "Opening", i});
        state.topicWeights[g.word()] = g.integer(0, 5);
        if (g.coin()) state.outcome = static_cast<Outcome>(g.integer(0, 2));
        CHECK(round_trip(state) == state);

        QuestionnaireResponse q{"P-" + std::to_string(trial), static_cast<Section>(g.integer(0, 3)), "Q", 0};
        switch (g.integer(0, 2)) {
            case 0: q.value = g.integer(1, 5); break;
            case 1: q.value = g.coin(); break;
            default: q.value = g.sentence(); break;
        }
        CHECK(round_trip(q) == q);
    }
}

TEST_CASE("codec: reals are written with at most 9 significant digits") {
    const Json j = Fact{FactCategory::Event, "x", 1.0 / 3.0, SourceModality::Text, 0};
    CHECK(dump_line(j).find("0.333333333,") != std::string::npos);
    // re-encoding a decoded value is byte-stable
    const auto once = dump_line(j);
    CHECK(dump_line(Json(decode<Fact>(parse_json(once)))) == once);
}

TEST_CASE("codec: unknown enum names are format errors") {
    auto j = parse_json(R"({"category":"Hobby","text":"x","salience":0.5,"sourceModality":"Text","observedAtMs":0})");
    CHECK_THROWS_AS(decode<Fact>(j), FormatError);
    CHECK_THROWS_AS(parse_json("{not json"), FormatError);
}

TEST_CASE("text helpers") {
    CHECK(text::tokenize("Video-Games, GAMER!") == std::vector<std::string>{"video", "games", "gamer"});
    CHECK(text::contains_phrase("Do you play video games?", "video games"));
    CHECK_FALSE(text::contains_phrase("videogames", "video games"));
    CHECK_FALSE(text::contains_phrase("stopwatch", "stop"));
    CHECK(text::normalize_whitespace("  a \t b\n") == "a b");
    CHECK(text::token_jaccard("a b c", "c b a") == doctest::Approx(1.0));
    CHECK(text::token_jaccard("a b", "b c") == doctest::Approx(1.0 / 3.0));
    CHECK(text::utf8_prefix("h\xc3\xa9llo", 2) == "h\xc3\xa9");
    CHECK(text::hash64("") == 0xcbf29ce484222325ULL);
}
