#include "sear/corpus.hpp"

#include "sear/text.hpp"

namespace sear {

void to_json(Json& j, const SocialCorpusDoc& v) {
    j = Json{{"docId", v.docId},
             {"personRef", v.personRef},
             {"kind", v.kind == DocKind::Trait ? "trait" : "fact"},
             {"modality", to_string(v.modality)},
             {"content", v.content},
             {"timestamp", v.timestamp},
             {"source", v.source}};
    if (v.category) j["category"] = to_string(*v.category);
    if (v.salience) j["salience"] = text::round9(*v.salience);
}

void from_json(const Json& j, SocialCorpusDoc& v) {
    v.docId = j.at("docId").get<std::string>();
    v.personRef = j.value("personRef", std::string{});
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "trait") v.kind = DocKind::Trait;
    else if (kind == "fact") v.kind = DocKind::Fact;
    else throw FormatError("unknown doc kind '" + kind + "'");
    v.modality = j.contains("modality") ? enum_from_json<SourceModality>(j, "modality") : SourceModality::Text;
    v.content = j.at("content").get<std::string>();
    v.category.reset();
    if (j.contains("category") && !j.at("category").is_null()) v.category = enum_from_json<FactCategory>(j, "category");
    v.timestamp = j.value<Millis>("timestamp", 0);
    v.source = j.value("source", std::string{});
    v.salience.reset();
    if (j.contains("salience") && !j.at("salience").is_null()) v.salience = j.at("salience").get<double>();
}

}  // namespace sear
