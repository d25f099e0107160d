#include "sear/survey.hpp"

#include "sear/errors.hpp"
#include "sear/text.hpp"
#include "sear/validate.hpp"

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace sear::survey {

Fraction Fraction::of(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) throw ArgumentError("fraction needs num >= 0 and den > 0");
    const auto g = std::gcd(num, den);
    return {num / g, den / g};
}

std::string Fraction::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Fraction operator+(const Fraction& a, const Fraction& b) {
    return Fraction::of(a.num * b.den + b.num * a.den, a.den * b.den);
}

std::string format_decimal(const Fraction& f, int decimals) {
    std::int64_t scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    const std::int64_t q = (2 * f.num * scale + f.den) / (2 * f.den);
    std::string out = std::to_string(q / scale);
    if (decimals > 0) {
        std::string frac = std::to_string(q % scale);
        out += "." + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
    }
    return out;
}

std::string format_percent(const Fraction& f, int decimals) {
    return format_decimal(Fraction::of(f.num * 100, f.den), decimals) + "%";
}

std::string_view to_string(QuestionKind k) {
    switch (k) {
        case QuestionKind::Likert5: return "Likert5";
        case QuestionKind::YesNo: return "YesNo";
        case QuestionKind::Text: return "Text";
    }
    return "Text";
}

const Question* QuestionnaireSchema::find(std::string_view questionId) const {
    for (const auto& q : questions) {
        if (q.questionId == questionId) return &q;
    }
    return nullptr;
}

ValidationReport validate(const QuestionnaireSchema& s) {
    ValidationReport r;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < s.questions.size(); ++i) {
        const auto& q = s.questions[i];
        const auto path = "questions[" + std::to_string(i) + "]";
        if (q.questionId.empty()) r.add(path + ".questionId", "questionId non-empty");
        if (!ids.insert(q.questionId).second) r.add(path + ".questionId", "questionIds unique");
    }
    return r;
}

QuestionnaireSchema default_schema() {
    using S = Section;
    using K = QuestionKind;
    return {{
        {"Q1_Bare", S::BaselineComparison, K::Likert5, "How is your experience with bare conversation?"},
        {"Q2_ARLLM", S::BaselineComparison, K::Likert5, "How is your experience with AR + Multimodal LLM conversation?"},
        {"Q3_SEAR", S::BaselineComparison, K::Likert5, "How is your experience with SEAR?"},
        {"Relevance", S::SubjectiveExperience, K::Likert5, "How well does the conversation match your social information?"},
        {"Appropriateness", S::SubjectiveExperience, K::Likert5, "How proper are the questions in the conversation?"},
        {"Naturalness", S::SubjectiveExperience, K::Likert5, "How natural is the opening part?"},
        {"Pacing", S::SubjectiveExperience, K::Likert5, "How does the pace of the conversation feel?"},
        {"Sincerity", S::SubjectiveExperience, K::Likert5,
         "How sincere do you feel about the person's interest in the conversation?"},
        {"EmotionalProgression", S::SubjectiveExperience, K::Likert5,
         "How did your feeling change as the conversation proceed?"},
        {"ARComfort", S::SubjectiveExperience, K::Likert5, "With AR, do you feel more relaxed?"},
        {"BareWillingness", S::SubjectiveExperience, K::Likert5, "Without AR, will you take-up this conversation?"},
        {"FutureIntent", S::SubjectiveExperience, K::Likert5, "Will you have conversation with this person in the future?"},
        {"Depth", S::SubjectiveExperience, K::Likert5, "Do you think SEAR have added depth to the conversation?"},
        {"Acceptance", S::SubjectiveExperience, K::Likert5, "Will you interact with SEAR in the future?"},
        {"PhotoLink", S::SEEffectiveness, K::Likert5, "Will you click and open shared photo links from the person?"},
        {"SocialApp", S::SEEffectiveness, K::Likert5,
         "Will you add the person as friend on your social mobile apps (such as wechat)?"},
        {"SMS", S::SEEffectiveness, K::Likert5, "Will you click and open SMS from the person?"},
        {"PhoneCall", S::SEEffectiveness, K::Likert5, "Will you pick up phone call from the person?"},
        {std::string(kTrustBefore), S::SEEffectiveness, K::Likert5,
         "How much do you trust the person before you have the conversation?"},
        {std::string(kTrustAfter), S::SEEffectiveness, K::Likert5,
         "How much do you trust the person before you have the conversation?"},
        {"Feedback", S::OpenText, K::Text, "Any other thoughts about the interaction?"},
    }};
}

void to_json(Json& j, const Question& v) {
    j = Json{{"questionId", v.questionId},
             {"section", to_string(v.section)},
             {"kind", to_string(v.kind)},
             {"prompt", v.prompt}};
}

void from_json(const Json& j, Question& v) {
    v.questionId = j.at("questionId").get<std::string>();
    v.section = enum_from_json<Section>(j, "section");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "Likert5") v.kind = QuestionKind::Likert5;
    else if (kind == "YesNo") v.kind = QuestionKind::YesNo;
    else if (kind == "Text") v.kind = QuestionKind::Text;
    else throw FormatError("unknown question kind '" + kind + "'");
    v.prompt = j.value("prompt", std::string());
}

void to_json(Json& j, const QuestionnaireSchema& v) { j = Json{{"questions", v.questions}}; }

void from_json(const Json& j, QuestionnaireSchema& v) { v.questions = j.at("questions").get<std::vector<Question>>(); }

QuestionnaireSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read schema " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto schema = decode<QuestionnaireSchema>(parse_json(buf.str()));
    if (auto r = validate(schema); !r.ok()) throw FormatError("schema: " + r.summary());
    return schema;
}

namespace {

std::optional<std::string> kind_mismatch(const Question& q, const ResponseValue& v) {
    switch (q.kind) {
        case QuestionKind::Likert5:
            if (!std::holds_alternative<int>(v)) return "question " + q.questionId + " expects a Likert value";
            break;
        case QuestionKind::YesNo:
            if (!std::holds_alternative<bool>(v)) return "question " + q.questionId + " expects a yes/no value";
            break;
        case QuestionKind::Text:
            if (!std::holds_alternative<std::string>(v)) return "question " + q.questionId + " expects text";
            break;
    }
    return std::nullopt;
}

const Question& likert_question(const QuestionnaireSchema& schema, std::string_view questionId) {
    const auto* q = schema.find(questionId);
    if (!q) throw ArgumentError("unknown question " + std::string(questionId));
    if (q->kind != QuestionKind::Likert5) throw ArgumentError("question " + std::string(questionId) + " is not Likert5");
    return *q;
}

std::array<std::int64_t, 5> likert_counts(const std::vector<QuestionnaireResponse>& records, std::string_view id) {
    std::array<std::int64_t, 5> counts{};
    for (const auto& r : records) {
        if (r.questionId != id) continue;
        if (const auto* v = std::get_if<int>(&r.value); v && *v >= 1 && *v <= 5) ++counts[static_cast<std::size_t>(*v - 1)];
    }
    return counts;
}

LikertStats stats_from_counts(const std::array<std::int64_t, 5>& counts) {
    LikertStats s;
    s.counts = counts;
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        s.n += counts[i];
        sum += counts[i] * static_cast<std::int64_t>(i + 1);
    }
    if (s.n > 0) {
        s.mean = Fraction::of(sum, s.n);
        s.topTwo = Fraction::of(counts[3] + counts[4], s.n);
    }
    return s;
}

}  // namespace

LoadResult load_responses(std::istream& in, const QuestionnaireSchema& schema) {
    LoadResult out;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::normalize_whitespace(line).empty()) continue;
        QuestionnaireResponse rec;
        try {
            rec = decode<QuestionnaireResponse>(parse_json(line, n), n);
        } catch (const FormatError& e) {
            out.rejects.push_back({n, e.what()});
            continue;
        }
        if (auto r = validate(rec); !r.ok()) {
            out.rejects.push_back({n, r.summary()});
            continue;
        }
        const auto* q = schema.find(rec.questionId);
        if (!q) {
            out.rejects.push_back({n, "unknown questionId " + rec.questionId});
            continue;
        }
        if (auto why = kind_mismatch(*q, rec.value)) {
            out.rejects.push_back({n, *why});
            continue;
        }
        if (q->section != rec.section) {
            out.rejects.push_back({n, "section does not match schema for " + rec.questionId});
            continue;
        }
        if (!seen.emplace(rec.participantPseudonym, rec.questionId).second) {
            out.rejects.push_back({n, "repeated answer to " + rec.questionId + " by " + rec.participantPseudonym});
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

LoadResult load_responses(const std::filesystem::path& path, const QuestionnaireSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read responses " + path.string());
    return load_responses(in, schema);
}

void write_responses(std::ostream& out, const std::vector<QuestionnaireResponse>& records) {
    for (const auto& r : records) out << dump_line(Json(r)) << '\n';
}

LikertStats aggregate_likert(const std::vector<QuestionnaireResponse>& records, std::string_view questionId,
                             const QuestionnaireSchema& schema) {
    likert_question(schema, questionId);
    return stats_from_counts(likert_counts(records, questionId));
}

std::optional<Fraction> top_two_fraction(const std::vector<QuestionnaireResponse>& records,
                                         std::string_view questionId, const QuestionnaireSchema& schema) {
    return aggregate_likert(records, questionId, schema).topTwo;
}

TrustShift trust_shift(const std::vector<QuestionnaireResponse>& records, const QuestionnaireSchema& schema) {
    likert_question(schema, kTrustBefore);
    likert_question(schema, kTrustAfter);
    std::map<std::string, std::pair<std::optional<int>, std::optional<int>>> byPerson;
    for (const auto& r : records) {
        const auto* v = std::get_if<int>(&r.value);
        if (!v) continue;
        if (r.questionId == kTrustBefore) byPerson[r.participantPseudonym].first = *v;
        else if (r.questionId == kTrustAfter) byPerson[r.participantPseudonym].second = *v;
    }
    TrustShift t;
    for (const auto& [who, answers] : byPerson) {
        if (!answers.first || !answers.second) {
            t.excluded.push_back(who);
            continue;
        }
        ++t.before[static_cast<std::size_t>(*answers.first - 1)];
        ++t.after[static_cast<std::size_t>(*answers.second - 1)];
        ++t.paired;
    }
    if (t.paired > 0) {
        t.atLeast4After = Fraction::of(t.after[3] + t.after[4], t.paired);
        t.strongBefore = Fraction::of(t.before[4], t.paired);
    }
    return t;
}

AggregateReport aggregate(const std::vector<QuestionnaireResponse>& records, const QuestionnaireSchema& schema) {
    AggregateReport report;
    if (records.empty()) return report;  // nothing to summarise, not a table of zeros
    std::set<std::string> people;
    for (const auto& r : records) people.insert(r.participantPseudonym);
    report.respondents = static_cast<std::int64_t>(people.size());

    for (const auto& q : schema.questions) {
        QuestionSummary s;
        s.questionId = q.questionId;
        s.kind = q.kind;
        switch (q.kind) {
            case QuestionKind::Likert5: {
                const auto st = stats_from_counts(likert_counts(records, q.questionId));
                s.n = st.n;
                for (std::size_t i = 0; i < 5; ++i) s.counts[std::to_string(i + 1)] = st.counts[i];
                s.mean = st.mean;
                s.topTwo = st.topTwo;
                break;
            }
            case QuestionKind::YesNo: {
                std::int64_t yes = 0, no = 0;
                for (const auto& r : records) {
                    if (r.questionId != q.questionId) continue;
                    if (const auto* b = std::get_if<bool>(&r.value)) ++(*b ? yes : no);
                }
                s.n = yes + no;
                s.counts = {{"yes", yes}, {"no", no}};
                if (s.n > 0) s.yes = Fraction::of(yes, s.n);
                break;
            }
            case QuestionKind::Text:
                for (const auto& r : records) {
                    if (r.questionId == q.questionId && std::holds_alternative<std::string>(r.value)) ++s.n;
                }
                break;
        }
        s.missing = report.respondents - s.n;
        report.questions.push_back(std::move(s));
    }
    if (schema.find(kTrustBefore) && schema.find(kTrustAfter)) report.trust = trust_shift(records, schema);
    return report;
}

namespace {

Json fraction_json(const std::optional<Fraction>& f, bool percent, int decimals) {
    if (!f) return nullptr;
    return Json{{"num", f->num},
                {"den", f->den},
                {"display", percent ? format_percent(*f, decimals) : format_decimal(*f, decimals)}};
}

std::optional<Fraction> fraction_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return Fraction::of(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

Json dist_json(const std::array<std::int64_t, 5>& d) {
    Json j = Json::object();
    for (std::size_t i = 0; i < 5; ++i) j[std::to_string(i + 1)] = d[i];
    return j;
}

std::array<std::int64_t, 5> dist_from(const Json& j) {
    std::array<std::int64_t, 5> d{};
    for (std::size_t i = 0; i < 5; ++i) d[i] = j.at(std::to_string(i + 1)).get<std::int64_t>();
    return d;
}

QuestionKind kind_from(const std::string& s) {
    if (s == "Likert5") return QuestionKind::Likert5;
    if (s == "YesNo") return QuestionKind::YesNo;
    if (s == "Text") return QuestionKind::Text;
    throw FormatError("unknown question kind '" + s + "'");
}

}  // namespace

Json report_to_json(const AggregateReport& r) {
    Json questions = Json::array();
    for (const auto& q : r.questions) {
        questions.push_back(Json{{"questionId", q.questionId},
                                 {"kind", to_string(q.kind)},
                                 {"n", q.n},
                                 {"missing", q.missing},
                                 {"counts", q.counts},
                                 {"mean", fraction_json(q.mean, false, 2)},
                                 {"topTwoFraction", fraction_json(q.topTwo, true, 1)},
                                 {"yesFraction", fraction_json(q.yes, true, 1)}});
    }
    Json j{{"respondents", r.respondents}, {"questions", questions}, {"trustShift", nullptr}};
    if (r.trust) {
        j["trustShift"] = Json{{"paired", r.trust->paired},
                               {"excluded", r.trust->excluded},
                               {"beforeDist", dist_json(r.trust->before)},
                               {"afterDist", dist_json(r.trust->after)},
                               {"fractionAtLeast4After", fraction_json(r.trust->atLeast4After, true, 1)},
                               {"fractionStrongBefore", fraction_json(r.trust->strongBefore, true, 1)}};
    }
    return j;
}

AggregateReport report_from_json(const Json& j) {
    try {
        AggregateReport r;
        r.respondents = j.at("respondents").get<std::int64_t>();
        for (const auto& q : j.at("questions")) {
            QuestionSummary s;
            s.questionId = q.at("questionId").get<std::string>();
            s.kind = kind_from(q.at("kind").get<std::string>());
            s.n = q.at("n").get<std::int64_t>();
            s.missing = q.at("missing").get<std::int64_t>();
            s.counts = q.at("counts").get<std::map<std::string, std::int64_t>>();
            s.mean = fraction_from(q.at("mean"));
            s.topTwo = fraction_from(q.at("topTwoFraction"));
            s.yes = fraction_from(q.at("yesFraction"));
            r.questions.push_back(std::move(s));
        }
        if (const auto& t = j.at("trustShift"); !t.is_null()) {
            TrustShift ts;
            ts.paired = t.at("paired").get<std::int64_t>();
            ts.excluded = t.at("excluded").get<std::vector<std::string>>();
            ts.before = dist_from(t.at("beforeDist"));
            ts.after = dist_from(t.at("afterDist"));
            ts.atLeast4After = fraction_from(t.at("fractionAtLeast4After"));
            ts.strongBefore = fraction_from(t.at("fractionStrongBefore"));
            r.trust = std::move(ts);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("summary: ") + e.what());
    }
}

std::string report_to_csv(const AggregateReport& r) {
    std::ostringstream out;
    out << "questionId,statistic,value,display\n";
    auto row = [&](const std::string& id, const std::string& stat, const std::string& value, const std::string& display) {
        out << id << ',' << stat << ',' << value << ',' << display << '\n';
    };
    auto count = [&](const std::string& id, const std::string& stat, std::int64_t v) {
        row(id, stat, std::to_string(v), std::to_string(v));
    };
    auto frac = [&](const std::string& id, const std::string& stat, const std::optional<Fraction>& f, bool percent,
                    int decimals) {
        if (!f) row(id, stat, "", "undefined");
        else row(id, stat, f->str(), percent ? format_percent(*f, decimals) : format_decimal(*f, decimals));
    };
    for (const auto& q : r.questions) {
        count(q.questionId, "n", q.n);
        count(q.questionId, "missing", q.missing);
        for (const auto& [k, v] : q.counts) count(q.questionId, "count_" + k, v);
        if (q.kind == QuestionKind::Likert5) {
            frac(q.questionId, "mean", q.mean, false, 2);
            frac(q.questionId, "top_two", q.topTwo, true, 1);
        } else if (q.kind == QuestionKind::YesNo) {
            frac(q.questionId, "yes", q.yes, true, 1);
        }
    }
    if (r.trust) {
        const std::string id = "TrustShift";
        count(id, "paired", r.trust->paired);
        count(id, "excluded", static_cast<std::int64_t>(r.trust->excluded.size()));
        for (std::size_t i = 0; i < 5; ++i) count(id, "before_" + std::to_string(i + 1), r.trust->before[i]);
        for (std::size_t i = 0; i < 5; ++i) count(id, "after_" + std::to_string(i + 1), r.trust->after[i]);
        frac(id, "at_least_4_after", r.trust->atLeast4After, true, 1);
        frac(id, "strong_before", r.trust->strongBefore, true, 1);
    }
    return out.str();
}

void export_summary(const AggregateReport& r, ExportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    if (format == ExportFormat::Json) out << dump_pretty(report_to_json(r));
    else out << report_to_csv(r);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sear::survey
