#pragma once

#include "sear/codec.hpp"
#include "sear/model.hpp"

#include <optional>
#include <string>

namespace sear {

enum class DocKind { Trait, Fact };

/// One item of a (pseudonymized) social corpus. Trait docs hold
/// "key=value" lines; fact docs hold a sentence or a media caption.
struct SocialCorpusDoc {
    std::string docId;
    std::string personRef;
    DocKind kind = DocKind::Fact;
    SourceModality modality = SourceModality::Text;
    std::string content;
    std::optional<FactCategory> category;
    Millis timestamp = 0;
    std::string source;
    std::optional<double> salience;

    bool operator==(const SocialCorpusDoc&) const = default;
};

void to_json(Json& j, const SocialCorpusDoc& v);
void from_json(const Json& j, SocialCorpusDoc& v);

}  // namespace sear
