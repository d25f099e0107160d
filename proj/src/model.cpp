#include "sear/model.hpp"

#include <array>
#include <utility>

namespace sear {

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Modality, 3> kModality{{
    {Modality::Visual, "Visual"}, {Modality::Audio, "Audio"}, {Modality::Environment, "Environment"}}};
constexpr NameTable<Speaker, 2> kSpeaker{{{Speaker::Primary, "Primary"}, {Speaker::Other, "Other"}}};
constexpr NameTable<Setting, 3> kSetting{{
    {Setting::Indoor, "Indoor"}, {Setting::Outdoor, "Outdoor"}, {Setting::Unknown, "Unknown"}}};
constexpr NameTable<FactCategory, 5> kFactCategory{{{FactCategory::Demographic, "Demographic"},
                                                    {FactCategory::Relational, "Relational"},
                                                    {FactCategory::Interest, "Interest"},
                                                    {FactCategory::Event, "Event"},
                                                    {FactCategory::Vulnerability, "Vulnerability"}}};
constexpr NameTable<SourceModality, 3> kSourceModality{{{SourceModality::Text, "Text"},
                                                        {SourceModality::ImageCaption, "ImageCaption"},
                                                        {SourceModality::VideoCaption, "VideoCaption"}}};
constexpr NameTable<PredicateKind, 3> kPredicateKind{{{PredicateKind::TraitEquals, "TraitEquals"},
                                                      {PredicateKind::HasFactCategory, "HasFactCategory"},
                                                      {PredicateKind::FactKeyword, "FactKeyword"}}};
constexpr NameTable<Author, 2> kAuthor{{{Author::Agent, "Agent"}, {Author::Target, "Target"}}};
constexpr NameTable<Outcome, 3> kOutcome{{{Outcome::Completed, "Completed"},
                                          {Outcome::AbortedByTarget, "AbortedByTarget"},
                                          {Outcome::Exhausted, "Exhausted"}}};
constexpr NameTable<Section, 4> kSection{{{Section::BaselineComparison, "BaselineComparison"},
                                          {Section::SubjectiveExperience, "SubjectiveExperience"},
                                          {Section::SEEffectiveness, "SEEffectiveness"},
                                          {Section::OpenText, "OpenText"}}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E v) {
    for (const auto& [e, name] : table) {
        if (e == v) return name;
    }
    return "?";
}

template <typename E, std::size_t N>
std::optional<E> lookup(const NameTable<E, N>& table, std::string_view name) {
    for (const auto& [e, n] : table) {
        if (n == name) return e;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Modality v) { return name_of(kModality, v); }
std::string_view to_string(Speaker v) { return name_of(kSpeaker, v); }
std::string_view to_string(Setting v) { return name_of(kSetting, v); }
std::string_view to_string(FactCategory v) { return name_of(kFactCategory, v); }
std::string_view to_string(SourceModality v) { return name_of(kSourceModality, v); }
std::string_view to_string(PredicateKind v) { return name_of(kPredicateKind, v); }
std::string_view to_string(Author v) { return name_of(kAuthor, v); }
std::string_view to_string(Outcome v) { return name_of(kOutcome, v); }
std::string_view to_string(Section v) { return name_of(kSection, v); }

template <> std::optional<Modality> parse_enum(std::string_view n) { return lookup(kModality, n); }
template <> std::optional<Speaker> parse_enum(std::string_view n) { return lookup(kSpeaker, n); }
template <> std::optional<Setting> parse_enum(std::string_view n) { return lookup(kSetting, n); }
template <> std::optional<FactCategory> parse_enum(std::string_view n) { return lookup(kFactCategory, n); }
template <> std::optional<SourceModality> parse_enum(std::string_view n) { return lookup(kSourceModality, n); }
template <> std::optional<PredicateKind> parse_enum(std::string_view n) { return lookup(kPredicateKind, n); }
template <> std::optional<Author> parse_enum(std::string_view n) { return lookup(kAuthor, n); }
template <> std::optional<Outcome> parse_enum(std::string_view n) { return lookup(kOutcome, n); }
template <> std::optional<Section> parse_enum(std::string_view n) { return lookup(kSection, n); }

}  // namespace sear
