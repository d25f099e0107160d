#pragma once

// Questionnaire schema and descriptive aggregates over responses.

#include "sear/codec.hpp"
#include "sear/model.hpp"
#include "sear/validate.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sear::survey {

/// Exact non-negative fraction, always reduced.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Fraction of(std::int64_t num, std::int64_t den);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;  // "271/60"

    bool operator==(const Fraction&) const = default;
};

Fraction operator+(const Fraction& a, const Fraction& b);

/// Half-up decimal rendering: format_decimal({271,60}, 2) == "4.52".
std::string format_decimal(const Fraction& f, int decimals);
/// Percent with half-up rounding: format_percent({56,60}) == "93.3%".
std::string format_percent(const Fraction& f, int decimals = 1);

enum class QuestionKind { Likert5, YesNo, Text };

std::string_view to_string(QuestionKind k);

struct Question {
    std::string questionId;
    Section section = Section::SEEffectiveness;
    QuestionKind kind = QuestionKind::Likert5;
    std::string prompt;

    bool operator==(const Question&) const = default;
};

struct QuestionnaireSchema {
    std::vector<Question> questions;  // declaration order is report order

    const Question* find(std::string_view questionId) const;
    bool operator==(const QuestionnaireSchema&) const = default;
};

ValidationReport validate(const QuestionnaireSchema& s);

inline constexpr std::string_view kTrustBefore = "TrustBefore";
inline constexpr std::string_view kTrustAfter = "TrustAfter";

/// Baseline Q1–Q3, the eleven subjective dimensions, six SE questions, open text.
QuestionnaireSchema default_schema();

void to_json(Json& j, const Question& v);
void from_json(const Json& j, Question& v);
void to_json(Json& j, const QuestionnaireSchema& v);
void from_json(const Json& j, QuestionnaireSchema& v);

QuestionnaireSchema load_schema(const std::filesystem::path& path);

struct Reject {
    std::size_t line = 0;
    std::string reason;

    bool operator==(const Reject&) const = default;
};

struct LoadResult {
    std::vector<QuestionnaireResponse> records;
    std::vector<Reject> rejects;
};

/// NDJSON, one QuestionnaireResponse per line. Bad lines (syntax, unknown
/// question, value outside the question's kind, repeated answer) are listed
/// in rejects; the rest is returned.
LoadResult load_responses(std::istream& in, const QuestionnaireSchema& schema = default_schema());
LoadResult load_responses(const std::filesystem::path& path, const QuestionnaireSchema& schema = default_schema());

void write_responses(std::ostream& out, const std::vector<QuestionnaireResponse>& records);

struct LikertStats {
    std::array<std::int64_t, 5> counts{};  // counts[v-1]
    std::int64_t n = 0;
    std::optional<Fraction> mean;     // nullopt when n == 0
    std::optional<Fraction> topTwo;   // (n5 + n4) / n

    bool operator==(const LikertStats&) const = default;
};

/// ArgumentError unless the question is Likert5 in the schema.
LikertStats aggregate_likert(const std::vector<QuestionnaireResponse>& records, std::string_view questionId,
                             const QuestionnaireSchema& schema = default_schema());

std::optional<Fraction> top_two_fraction(const std::vector<QuestionnaireResponse>& records,
                                         std::string_view questionId,
                                         const QuestionnaireSchema& schema = default_schema());

struct TrustShift {
    std::array<std::int64_t, 5> before{};
    std::array<std::int64_t, 5> after{};
    std::int64_t paired = 0;
    std::vector<std::string> excluded;           // respondents missing one of the two answers
    std::optional<Fraction> atLeast4After;
    std::optional<Fraction> strongBefore;        // share of 5s before

    bool operator==(const TrustShift&) const = default;
};

/// Pairs Trust-Before and Trust-After by participant. ArgumentError if the
/// schema lacks either question.
TrustShift trust_shift(const std::vector<QuestionnaireResponse>& records,
                       const QuestionnaireSchema& schema = default_schema());

struct QuestionSummary {
    std::string questionId;
    QuestionKind kind = QuestionKind::Likert5;
    std::int64_t n = 0;
    std::int64_t missing = 0;                    // respondents without an answer
    std::map<std::string, std::int64_t> counts;  // "1".."5" or "yes"/"no"
    std::optional<Fraction> mean;
    std::optional<Fraction> topTwo;
    std::optional<Fraction> yes;

    bool operator==(const QuestionSummary&) const = default;
};

struct AggregateReport {
    std::int64_t respondents = 0;
    std::vector<QuestionSummary> questions;
    std::optional<TrustShift> trust;

    bool operator==(const AggregateReport&) const = default;
};

/// No records give an empty report (no question rows, no trust block).
AggregateReport aggregate(const std::vector<QuestionnaireResponse>& records,
                          const QuestionnaireSchema& schema = default_schema());

Json report_to_json(const AggregateReport& r);
AggregateReport report_from_json(const Json& j);

/// questionId,statistic,value,display; one row per statistic.
std::string report_to_csv(const AggregateReport& r);

enum class ExportFormat { Json, Csv };

/// Writes the summary; IoError when the path cannot be written.
void export_summary(const AggregateReport& r, ExportFormat format, const std::filesystem::path& path);

}  // namespace sear::survey
