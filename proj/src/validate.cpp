#include "sear/validate.hpp"

#include "sear/text.hpp"

#include <cmath>
#include <set>

namespace sear {

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string idx(std::string_view base, std::size_t i) {
    return std::string(base) + "[" + std::to_string(i) + "]";
}

}  // namespace

bool ValidationReport::mentions(std::string_view message) const {
    for (const auto& v : violations) {
        if (v.message.find(message) != std::string::npos) return true;
    }
    return false;
}

void ValidationReport::add(std::string path, std::string message) {
    violations.push_back({std::move(path), std::move(message)});
}

void ValidationReport::merge(const ValidationReport& other, std::string_view prefix) {
    for (const auto& v : other.violations) {
        std::string path(prefix);
        if (!v.path.empty()) {
            if (!path.empty()) path += ".";
            path += v.path;
        }
        violations.push_back({std::move(path), v.message});
    }
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += (v.path.empty() ? std::string() : v.path + ": ") + v.message;
    }
    return out;
}

ValidationReport validate(const CueEvent& v) {
    ValidationReport r;
    if (v.timestampMs < 0) r.add("timestampMs", "timestampMs ≥ 0");
    if (v.modality == Modality::Visual && !v.trackId) r.add("trackId", "Visual cues must carry a trackId");
    if (v.modality == Modality::Environment && v.trackId) r.add("trackId", "Environment cues must not carry a trackId");
    for (const auto& [key, value] : v.payload) {
        if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d))
            r.add("payload." + key, "payload scalars must be finite");
    }
    return r;
}

ValidationReport validate(const SocialContextFrame& v) {
    ValidationReport r;
    if (!(v.windowStartMs < v.windowEndMs)) r.add("windowStartMs", "windowStartMs < windowEndMs");
    for (std::size_t i = 0; i < v.transcript.size(); ++i) {
        const auto& s = v.transcript[i];
        if (s.startMs < v.windowStartMs || s.endMs > v.windowEndMs || s.startMs > s.endMs)
            r.add(idx("transcript", i), "transcript segment must lie within the window");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < v.faceTracks.size(); ++i) {
        const auto& t = v.faceTracks[i];
        if (!seen.insert(t.trackId).second) r.add(idx("faceTracks", i), "trackId unique within a frame");
        if (!in_unit_interval(t.emotion.confidence))
            r.add(idx("faceTracks", i) + ".emotion.confidence", "confidence ∈ [0,1]");
        for (const auto& [key, score] : t.expressionScores) {
            if (!in_unit_interval(score))
                r.add(idx("faceTracks", i) + ".expressionScores." + key, "expression scores ∈ [0,1]");
        }
    }
    return r;
}

ValidationReport validate(const Fact& v) {
    ValidationReport r;
    if (text::normalize_whitespace(v.text).empty()) r.add("text", "text non-empty after whitespace normalization");
    if (!in_unit_interval(v.salience)) r.add("salience", "salience ∈ [0,1]");
    return r;
}

ValidationReport validate(const RoleRecord& v, const TraitVocabulary& vocabulary) {
    ValidationReport r;
    if (v.roleId.empty()) r.add("roleId", "roleId non-empty");
    for (const auto& [key, value] : v.traits) {
        if (!vocabulary.count(key)) r.add("traits." + key, "trait key not in the declared vocabulary");
    }
    for (std::size_t i = 0; i < v.facts.size(); ++i) r.merge(validate(v.facts[i]), idx("facts", i));
    if (!v.embeddingIds.empty() && v.embeddingIds.size() != v.facts.size())
        r.add("embeddingIds", "embeddingIds parallel to facts");
    return r;
}

ValidationReport validate(const std::vector<RoleRecord>& roles, const TraitVocabulary& vocabulary) {
    ValidationReport r;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        r.merge(validate(roles[i], vocabulary), idx("roles", i));
        if (!ids.insert(roles[i].roleId).second) r.add(idx("roles", i) + ".roleId", "roleId unique within a role database");
    }
    return r;
}

ValidationReport validate(const EmbeddingEntry& v, std::size_t dimension) {
    ValidationReport r;
    if (v.vector.size() != dimension) r.add("vector", "dimension equals the store's configured D");
    double sq = 0.0;
    for (double x : v.vector) sq += x * x;
    if (!std::isfinite(sq) || std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance) r.add("vector", "|‖vector‖₂ − 1| ≤ 1e-6");
    if (v.entryId < 0) r.add("entryId", "entryId ≥ 0");
    return r;
}

ValidationReport validate(const SocialProfile& v) {
    ValidationReport r;
    for (std::size_t i = 0; i < v.rankedFacts.size(); ++i) {
        r.merge(validate(v.rankedFacts[i].fact), idx("rankedFacts", i) + ".fact");
        if (i == 0) continue;
        const auto& prev = v.rankedFacts[i - 1];
        const auto& cur = v.rankedFacts[i];
        if (prev.rankScore < cur.rankScore ||
            (prev.rankScore == cur.rankScore && cur.fact.text < prev.fact.text))
            r.add(idx("rankedFacts", i), "rankedFacts sorted by rankScore non-increasing, ties by text");
    }
    return r;
}

ValidationReport validate(const StrategyTemplate& v) {
    ValidationReport r;
    if (v.templateId.empty()) r.add("templateId", "templateId non-empty");
    if (v.stages.empty()) r.add("stages", "at least one stage");
    std::set<std::string> names;
    for (std::size_t i = 0; i < v.stages.size(); ++i) {
        if (!names.insert(v.stages[i].name).second) r.add(idx("stages", i) + ".name", "stage names unique within template");
        if (v.stages[i].maxRetries < 0) r.add(idx("stages", i) + ".maxRetries", "maxRetries ≥ 0");
    }
    for (std::size_t i = 0; i < v.requirements.size(); ++i) {
        const auto& p = v.requirements[i];
        if (!(p.weight > 0.0) || !std::isfinite(p.weight)) r.add(idx("requirements", i) + ".weight", "all weights > 0");
        if (p.kind == PredicateKind::TraitEquals && p.argument.find('=') == std::string::npos)
            r.add(idx("requirements", i) + ".argument", "TraitEquals argument has the form key=value");
        if (p.kind == PredicateKind::HasFactCategory && !parse_enum<FactCategory>(p.argument))
            r.add(idx("requirements", i) + ".argument", "HasFactCategory argument names a fact category");
    }
    return r;
}

ValidationReport validate(const ConversationState& v) {
    ValidationReport r;
    if (v.currentStageIndex < 0) r.add("currentStageIndex", "currentStageIndex ≥ 0");
    for (std::size_t i = 0; i < v.history.size(); ++i) {
        const auto& u = v.history[i];
        const Author expected = (i % 2 == 0) ? Author::Agent : Author::Target;
        if (u.author != expected) r.add(idx("history", i) + ".author", "authors alternate Agent, Target, Agent, ...");
        if (i > 0 && u.turnIndex <= v.history[i - 1].turnIndex)
            r.add(idx("history", i) + ".turnIndex", "turnIndex strictly increasing");
    }
    for (const auto& [topic, weight] : v.topicWeights) {
        if (!(weight >= 0.0)) r.add("topicWeights." + topic, "topic weights ≥ 0");
    }
    return r;
}

ValidationReport validate(const ConversationState& v, const StrategyTemplate& active) {
    auto r = validate(v);
    if (v.currentStageIndex > static_cast<int>(active.stages.size()))
        r.add("currentStageIndex", "currentStageIndex ≤ number of stages in the active template");
    return r;
}

ValidationReport validate(const QuestionnaireResponse& v) {
    ValidationReport r;
    if (v.questionId.empty()) r.add("questionId", "questionId non-empty");
    if (const auto* likert = std::get_if<int>(&v.value); likert && (*likert < 1 || *likert > 5))
        r.add("value", "Likert values ∈ {1,2,3,4,5}");
    return r;
}

}  // namespace sear
