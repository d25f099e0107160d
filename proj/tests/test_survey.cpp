#include <doctest.h>

#include "generators.hpp"
#include "sear/errors.hpp"
#include "sear/survey.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace sear;
using namespace sear::survey;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(SEAR_DATA_DIR) / "survey" / "responses_n60.ndjson";

QuestionnaireResponse likert(std::string who, std::string q, int v, Section s = Section::SEEffectiveness) {
    return {std::move(who), s, std::move(q), v};
}

std::vector<QuestionnaireResponse> from_counts(const std::string& q, std::map<int, int> counts,
                                               Section s = Section::SEEffectiveness) {
    std::vector<QuestionnaireResponse> out;
    int i = 0;
    for (const auto& [v, c] : counts) {
        for (int k = 0; k < c; ++k) out.push_back(likert("P-" + std::to_string(i++), q, v, s));
    }
    return out;
}

// Independent rendering: floating point with an explicit half-up nudge.
std::string percent_oracle(double num, double den) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", std::floor(num / den * 1000.0 + 0.5 + 1e-9) / 10.0);
    return buf;
}

}  // namespace

TEST_CASE("fraction formatting rounds half up") {
    CHECK(format_decimal(Fraction::of(271, 60), 2) == "4.52");
    CHECK(format_decimal(Fraction::of(9, 2), 2) == "4.50");
    CHECK(format_decimal(Fraction::of(1, 8), 2) == "0.13");   // 0.125
    CHECK(format_decimal(Fraction::of(5, 1), 2) == "5.00");
    CHECK(format_decimal(Fraction::of(1, 3), 0) == "0");
    CHECK(format_percent(Fraction::of(56, 60)) == "93.3%");
    CHECK(format_percent(Fraction::of(1, 2000)) == "0.1%");    // 0.05% → 0.1
    CHECK(format_percent(Fraction::of(0, 7)) == "0.0%");
    CHECK(Fraction::of(56, 60) == Fraction{14, 15});
    CHECK(Fraction::of(1, 3) + Fraction::of(1, 6) == Fraction{1, 2});
    CHECK_THROWS_AS(Fraction::of(1, 0), ArgumentError);
}

TEST_CASE("default schema") {
    const auto s = default_schema();
    CHECK(validate(s).ok());
    CHECK(s.questions.size() == 3 + 11 + 6 + 1);
    CHECK(s.find("Relevance")->section == Section::SubjectiveExperience);
    CHECK(s.find("Feedback")->kind == QuestionKind::Text);
    CHECK(s.find(kTrustAfter) != nullptr);
    auto dup = s;
    dup.questions.push_back(dup.questions.front());
    CHECK(validate(dup).mentions("unique"));
    Json j = s;
    CHECK(j.get<QuestionnaireSchema>() == s);
}

TEST_CASE("loading responses with rejects") {
    std::istringstream empty("");
    auto r = load_responses(empty);
    CHECK(r.records.empty());
    CHECK(r.rejects.empty());

    std::istringstream in(
        R"({"participantPseudonym":"P-1","section":"SEEffectiveness","questionId":"SMS","value":5})" "\n"
        R"({"participantPseudonym":"P-1","section":"SEEffectiveness","questionId":"SMS","value":6})" "\n"
        R"({"participantPseudonym":"P-2","section":"SEEffectiveness","questionId":"Nope","value":4})" "\n"
        "not json\n"
        R"({"participantPseudonym":"P-2","section":"SEEffectiveness","questionId":"SMS","value":"yes"})" "\n"
        R"({"participantPseudonym":"P-1","section":"SEEffectiveness","questionId":"SMS","value":4})" "\n"
        R"({"participantPseudonym":"P-3","section":"OpenText","questionId":"SMS","value":4})" "\n"
        "\n"
        R"({"participantPseudonym":"P-3","section":"OpenText","questionId":"Feedback","value":"fine"})" "\n");
    r = load_responses(in);
    CHECK(r.records.size() == 2);
    REQUIRE(r.rejects.size() == 6);
    CHECK(r.rejects[0].line == 2);
    CHECK(r.rejects[0].reason.find("Likert") != std::string::npos);
    CHECK(r.rejects[1].line == 3);
    CHECK(r.rejects[2].line == 4);
    CHECK(r.rejects[3].line == 5);
    CHECK(r.rejects[4].reason.find("repeated") != std::string::npos);
    CHECK(r.rejects[5].line == 7);

    CHECK_THROWS_AS(load_responses(std::filesystem::path("/nonexistent/x.ndjson")), IoError);
}

TEST_CASE("bundled fixture loads cleanly") {
    const auto r = load_responses(kFixture);
    CHECK(r.rejects.empty());
    CHECK(r.records.size() == 20 * 60 + 12);
}

TEST_CASE("likert aggregation") {
    auto recs = from_counts("Relevance", {{5, 36}, {4, 18}, {3, 6}}, Section::SubjectiveExperience);
    auto st = aggregate_likert(recs, "Relevance");
    CHECK(st.n == 60);
    CHECK(st.counts == std::array<std::int64_t, 5>{0, 0, 6, 18, 36});
    REQUIRE(st.mean);
    CHECK(*st.mean == Fraction::of(180 + 72 + 18, 60));
    CHECK(format_decimal(*st.mean, 2) == "4.50");

    st = aggregate_likert(from_counts("Relevance", {{5, 60}}, Section::SubjectiveExperience), "Relevance");
    CHECK(format_decimal(*st.mean, 2) == "5.00");
    st = aggregate_likert(from_counts("Relevance", {{3, 1}}, Section::SubjectiveExperience), "Relevance");
    CHECK(st.counts[2] == 1);
    CHECK(format_decimal(*st.mean, 2) == "3.00");

    st = aggregate_likert({}, "Relevance");
    CHECK(st.n == 0);
    CHECK_FALSE(st.mean);
    CHECK_FALSE(st.topTwo);

    CHECK_THROWS_AS(aggregate_likert(recs, "Feedback"), ArgumentError);
    CHECK_THROWS_AS(aggregate_likert(recs, "Unknown"), ArgumentError);
}

TEST_CASE("top-two fractions at the published susceptibility rates") {
    struct Case {
        const char* q;
        int fives, fours, others;
        const char* printed;
    } cases[] = {{"PhotoLink", 24, 32, 4, "93.3%"},
                 {"SMS", 27, 28, 5, "91.7%"},
                 {"PhoneCall", 21, 30, 9, "85.0%"},
                 {"SocialApp", 26, 30, 4, "93.3%"}};
    for (const auto& c : cases) {
        const auto recs = from_counts(c.q, {{5, c.fives}, {4, c.fours}, {2, c.others}});
        const auto f = top_two_fraction(recs, c.q);
        REQUIRE(f);
        CHECK(format_percent(*f) == c.printed);
        CHECK(format_percent(*f) == percent_oracle(c.fives + c.fours, 60));
    }
    const auto none = from_counts("SMS", {{1, 10}, {3, 5}});
    CHECK(format_percent(*top_two_fraction(none, "SMS")) == "0.0%");
}

TEST_CASE("trust shift") {
    auto before = from_counts("TrustBefore", {{5, 16}, {4, 12}, {3, 11}, {2, 13}, {1, 8}});
    auto after = from_counts("TrustAfter", {{5, 25}, {4, 21}, {3, 10}, {2, 4}});
    auto all = before;
    all.insert(all.end(), after.begin(), after.end());
    auto t = trust_shift(all);
    CHECK(t.paired == 60);
    CHECK(t.excluded.empty());
    CHECK(format_percent(*t.atLeast4After) == "76.7%");
    CHECK(format_percent(*t.strongBefore) == "26.7%");
    CHECK(t.before[0] + t.before[1] == 21);  // 35% distrustful

    all.push_back(likert("P-extra", "TrustAfter", 5));
    t = trust_shift(all);
    CHECK(t.paired == 60);
    CHECK(t.excluded == std::vector<std::string>{"P-extra"});

    // Same answers before and after: zero shift in every bin.
    auto same = before;
    for (auto r : before) {
        r.questionId = std::string(kTrustAfter);
        same.push_back(r);
    }
    t = trust_shift(same);
    CHECK(t.before == t.after);

    QuestionnaireSchema noTrust{{default_schema().questions.front()}};
    CHECK_THROWS_AS(trust_shift(all, noTrust), ArgumentError);
}

TEST_CASE("reconstructed subjective means") {
    // Mean values printed for four dimensions; counts chosen to match the
    // accompanying percentages.
    struct Case {
        const char* q;
        std::map<int, int> counts;
        const char* mean;
    } cases[] = {{"Naturalness", {{5, 37}, {4, 17}, {3, 6}}, "4.52"},
                 {"Pacing", {{5, 33}, {4, 25}, {3, 2}}, "4.52"},
                 {"Acceptance", {{5, 32}, {4, 25}, {3, 3}}, "4.48"},
                 {"Depth", {{5, 30}, {4, 28}, {3, 2}}, "4.47"}};
    for (const auto& c : cases) {
        const auto st = aggregate_likert(from_counts(c.q, c.counts, Section::SubjectiveExperience), c.q);
        CHECK(format_decimal(*st.mean, 2) == c.mean);
    }
}

TEST_CASE("aggregation properties") {
    testgen::Gen g(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<QuestionnaireResponse> recs;
        const int n = g.integer(1, 80);
        for (int i = 0; i < n; ++i) recs.push_back(likert("P-" + std::to_string(i), "SMS", g.integer(1, 5)));
        const auto st = aggregate_likert(recs, "SMS");

        auto shuffled = recs;
        std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
        CHECK(aggregate_likert(shuffled, "SMS") == st);

        const auto bottom = Fraction::of(st.counts[0] + st.counts[1] + st.counts[2], st.n);
        CHECK(*st.topTwo + bottom == Fraction{1, 1});
        CHECK(st.mean->value() >= 1.0);
        CHECK(st.mean->value() <= 5.0);

        recs.push_back(likert("P-new", "SMS", 5));
        const auto more = aggregate_likert(recs, "SMS");
        // a/b <= c/d  ⇔  a·d <= c·b
        CHECK(st.mean->num * more.mean->den <= more.mean->num * st.mean->den);
    }
}

TEST_CASE("report and exports") {
    const auto loaded = load_responses(kFixture);
    const auto report = aggregate(loaded.records);
    CHECK(report.respondents == 60);
    REQUIRE(report.trust);
    CHECK(format_percent(*report.trust->atLeast4After) == "76.7%");
    const auto fb = std::find_if(report.questions.begin(), report.questions.end(),
                                 [](const QuestionSummary& q) { return q.questionId == "Feedback"; });
    REQUIRE(fb != report.questions.end());
    CHECK(fb->n == 12);
    CHECK(fb->missing == 48);

    const auto csv = report_to_csv(report);
    CHECK(csv.find("PhotoLink,top_two,14/15,93.3%\n") != std::string::npos);
    CHECK(csv.find("TrustShift,strong_before,4/15,26.7%\n") != std::string::npos);
    CHECK(report_to_csv(report_from_json(report_to_json(report))) == csv);
    CHECK(report_from_json(report_to_json(report)) == report);

    CHECK(report_to_csv(AggregateReport{}) == "questionId,statistic,value,display\n");
    CHECK(aggregate({}) == AggregateReport{});

    const auto dir = std::filesystem::temp_directory_path() / "sear_survey_export";
    std::filesystem::create_directories(dir);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream b;
        b << in.rdbuf();
        return b.str();
    };
    export_summary(report, ExportFormat::Json, dir / "a.json");
    export_summary(report, ExportFormat::Json, dir / "b.json");
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    export_summary(report, ExportFormat::Csv, dir / "a.csv");
    CHECK(slurp(dir / "a.csv") == csv);
    CHECK(report_to_csv(report_from_json(Json::parse(slurp(dir / "a.json")))) == csv);
    CHECK_THROWS_AS(export_summary(report, ExportFormat::Csv, dir / "missing" / "x.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("yes/no questions aggregate as a yes fraction") {
    QuestionnaireSchema s{{{"Occurred", Section::BaselineComparison, QuestionKind::YesNo, "?"}}};
    std::vector<QuestionnaireResponse> recs{{"P-1", Section::BaselineComparison, "Occurred", true},
                                            {"P-2", Section::BaselineComparison, "Occurred", false},
                                            {"P-3", Section::BaselineComparison, "Occurred", true}};
    const auto report = aggregate(recs, s);
    REQUIRE(report.questions.size() == 1);
    CHECK(report.questions[0].counts.at("yes") == 2);
    CHECK(*report.questions[0].yes == Fraction::of(2, 3));
    CHECK_FALSE(report.trust);
    CHECK(report_to_csv(report).find("Occurred,yes,2/3,66.7%") != std::string::npos);
}
