#include "sear/agent.hpp"

#include "sear/codec.hpp"
#include "sear/errors.hpp"
#include "sear/text.hpp"
#include "sear/validate.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

namespace sear::agent {

namespace {

std::set<std::string> token_set(std::string_view s) {
    auto tokens = text::tokenize(s);
    return {tokens.begin(), tokens.end()};
}

bool any_phrase(const std::vector<std::string>& tokens, std::span<const std::string> phrases) {
    return std::any_of(phrases.begin(), phrases.end(),
                       [&](const std::string& p) { return text::contains_phrase(tokens, p); });
}

std::string_view author_label(Author a) { return a == Author::Agent ? "Agent" : "Target"; }

}  // namespace

bool predicate_holds(const Predicate& predicate, const SocialProfile& profile) {
    switch (predicate.kind) {
        case PredicateKind::TraitEquals: {
            const auto eq = predicate.argument.find('=');
            if (eq == std::string::npos) throw ArgumentError("TraitEquals argument must be key=value: " + predicate.argument);
            const auto key = text::normalize_whitespace(predicate.argument.substr(0, eq));
            const auto value = text::normalize_whitespace(predicate.argument.substr(eq + 1));
            const auto it = profile.coreIdentity.find(key);
            return it != profile.coreIdentity.end() &&
                   text::to_lower(text::normalize_whitespace(it->second)) == text::to_lower(value);
        }
        case PredicateKind::HasFactCategory: {
            const auto category = parse_enum<FactCategory>(predicate.argument);
            if (!category) throw ArgumentError("unknown fact category: " + predicate.argument);
            return std::any_of(profile.rankedFacts.begin(), profile.rankedFacts.end(),
                               [&](const RankedFact& f) { return f.fact.category == *category; });
        }
        case PredicateKind::FactKeyword:
            return std::any_of(profile.rankedFacts.begin(), profile.rankedFacts.end(), [&](const RankedFact& f) {
                return text::contains_phrase(f.fact.text, predicate.argument);
            });
    }
    return false;
}

StrategyScore score_template(const StrategyTemplate& tpl, const SocialProfile& profile) {
    StrategyScore score{tpl.templateId, 0.0, {}};
    double total = 0.0, satisfied = 0.0;
    for (const auto& p : tpl.requirements) {
        if (!(p.weight > 0.0)) throw ArgumentError("predicate weight must be > 0 in template " + tpl.templateId);
        const bool holds = predicate_holds(p, profile);
        score.perPredicate.emplace_back(p, holds);
        total += p.weight;
        if (holds) satisfied += p.weight;
    }
    if (total > 0.0) score.confidence = std::clamp(satisfied / total, 0.0, 1.0);
    return score;
}

Selection check_se_strategies(std::span<const StrategyTemplate> templates, const SocialProfile& profile) {
    if (templates.empty()) throw ArgumentError("no strategy templates to choose from");
    Selection sel;
    std::size_t best = 0;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        sel.scores.push_back(score_template(templates[i], profile));
        if (i == 0) continue;
        const auto& a = sel.scores[i];
        const auto& b = sel.scores[best];
        const auto& ta = templates[i];
        const auto& tb = templates[best];
        if (a.confidence != b.confidence) {
            if (a.confidence > b.confidence) best = i;
        } else if (ta.priority != tb.priority) {
            if (ta.priority > tb.priority) best = i;
        } else if (ta.templateId < tb.templateId) {
            best = i;
        }
    }
    sel.selected = &templates[best];
    return sel;
}

std::vector<std::string> prompt_facts(const SocialProfile& profile, const std::map<std::string, double>& topicWeights) {
    std::vector<std::pair<double, std::string>> facts;
    for (const auto& rf : profile.rankedFacts) {
        double boost = 0.0;
        for (const auto& token : token_set(rf.fact.text)) {
            if (auto it = topicWeights.find(token); it != topicWeights.end()) boost += it->second;
        }
        facts.emplace_back(boost, rf.fact.text);
    }
    std::stable_sort(facts.begin(), facts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> out;
    out.reserve(facts.size());
    for (auto& f : facts) out.push_back(std::move(f.second));
    return out;
}

std::string fill_prompt(const ConversationState& state, const SocialProfile& profile, const StageSpec& stage,
                        std::size_t historyWindow) {
    const auto facts = prompt_facts(profile, state.topicWeights);

    std::string history;
    const auto& h = state.history;
    const std::size_t from = h.size() > historyWindow ? h.size() - historyWindow : 0;
    for (std::size_t i = from; i < h.size(); ++i) {
        if (!history.empty()) history += '\n';
        history += std::string(author_label(h[i].author)) + ": " + h[i].text;
    }
    if (history.empty()) history = kEmptyMarker;

    static const std::regex placeholder(R"(\{(FACT_(\d+)|HISTORY|STAGE_OBJECTIVE)\})");
    std::string out;
    auto begin = std::sregex_iterator(stage.promptSkeleton.begin(), stage.promptSkeleton.end(), placeholder);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        out.append(stage.promptSkeleton, last, static_cast<std::size_t>(m.position()) - last);
        if (m[1] == "HISTORY") {
            out += history;
        } else if (m[1] == "STAGE_OBJECTIVE") {
            out += stage.objective;
        } else {
            const auto index = std::stoul(m[2].str());
            out += index < facts.size() ? facts[index] : std::string(kEmptyMarker);
        }
        last = static_cast<std::size_t>(m.position() + m.length());
    }
    out.append(stage.promptSkeleton, last);
    return out;
}

dialogue::ChatRequest build_request(const ConversationState& state, const SocialProfile& profile,
                                    const StageSpec& stage, std::size_t historyWindow) {
    dialogue::ChatRequest request;
    request.turns.push_back({dialogue::ChatRole::System,
                             "You are a conversational agent. Reply with one short, natural utterance. Current stage: " +
                                 stage.name + ". Objective: " + stage.objective});
    request.turns.push_back({dialogue::ChatRole::User, fill_prompt(state, profile, stage, historyWindow)});
    return request;
}

Generated gen_conv(const ConversationState& state, const SocialProfile& profile, const StageSpec& stage,
                   dialogue::DialogueBackend& backend, std::size_t historyWindow) {
    Generated g;
    g.request = build_request(state, profile, stage, historyWindow);
    g.text = backend.complete(g.request);
    return g;
}

std::string se_interact(std::string_view utterance, dialogue::TargetInterface& target,
                        const std::vector<Utterance>& history) {
    return target.respond(utterance, history);
}

std::string_view to_string(Receptiveness r) {
    switch (r) {
        case Receptiveness::Receptive: return "Receptive";
        case Receptiveness::Resistant: return "Resistant";
        case Receptiveness::Neutral: break;
    }
    return "Neutral";
}

Receptiveness classify_receptiveness(std::string_view response, std::span<const std::string> successCues,
                                     const Lexicon& lexicon) {
    const auto tokens = text::tokenize(response);
    if (any_phrase(tokens, successCues)) return Receptiveness::Receptive;
    const std::set<std::string> pos(lexicon.positive.begin(), lexicon.positive.end());
    const std::set<std::string> neg(lexicon.negative.begin(), lexicon.negative.end());
    int score = 0;
    for (const auto& t : tokens) {
        if (pos.count(t)) ++score;
        if (neg.count(t)) --score;
    }
    if (score > 0) return Receptiveness::Receptive;
    if (score < 0) return Receptiveness::Resistant;
    return Receptiveness::Neutral;
}

ValidationReport validate(const LoopPolicy& p) {
    ValidationReport r;
    if (p.maxRetriesOverride && *p.maxRetriesOverride < 0) r.add("maxRetriesOverride", "retries ≥ 0");
    if (p.historyWindow == 0) r.add("historyWindow", "historyWindow > 0");
    if (!(p.topicBoost >= 0.0)) r.add("topicBoost", "topicBoost ≥ 0");
    return r;
}

ConversationEngine::ConversationEngine(StrategyTemplate tpl, SocialProfile profile, dialogue::DialogueBackend& backend,
                                       LoopPolicy policy)
    : tpl_(std::move(tpl)), profile_(std::move(profile)), backend_(backend), policy_(std::move(policy)) {
    if (auto r = validate(tpl_); !r.ok()) throw ArgumentError("template " + tpl_.templateId + ": " + r.summary());
    if (auto r = validate(policy_); !r.ok()) throw ArgumentError("loop policy: " + r.summary());
}

const StageSpec* ConversationEngine::current_stage() const {
    const auto i = static_cast<std::size_t>(state_.currentStageIndex);
    return i < tpl_.stages.size() ? &tpl_.stages[i] : nullptr;
}

const std::string& ConversationEngine::next_utterance() {
    if (done()) throw StateError("conversation already finished");
    if (pending_) return *pending_;
    const StageSpec& stage = *current_stage();
    try {
        auto g = gen_conv(state_, profile_, stage, backend_, policy_.historyWindow);
        prompts_.push_back({stage.name, g.request.turns.back().content, g.text});
        pending_ = std::move(g.text);
    } catch (...) {
        state_.outcome = Outcome::Exhausted;
        throw;
    }
    return *pending_;
}

void ConversationEngine::fail() {
    pending_.reset();
    if (!done()) state_.outcome = Outcome::Exhausted;
}

void ConversationEngine::boost_topics(std::string_view response) {
    const auto said = token_set(response);
    std::set<std::string> factTokens;
    for (const auto& rf : profile_.rankedFacts) {
        for (auto& t : text::tokenize(rf.fact.text)) factTokens.insert(std::move(t));
    }
    for (const auto& t : factTokens) {
        if (t.size() >= 3 && said.count(t)) state_.topicWeights[t] += policy_.topicBoost;
    }
}

void ConversationEngine::advance() {
    const StageSpec& stage = *current_stage();
    stageOutcomes_.push_back({stage.name, attemptsThisStage_, Receptiveness::Neutral});
    attemptsThisStage_ = 0;
    ++state_.currentStageIndex;
    if (static_cast<std::size_t>(state_.currentStageIndex) >= tpl_.stages.size()) state_.outcome = Outcome::Completed;
}

Receptiveness ConversationEngine::accept(std::string response) {
    if (!pending_) throw StateError("no agent utterance awaiting a response");
    const StageSpec& stage = *current_stage();
    const int next = static_cast<int>(state_.history.size());
    state_.history.push_back({Author::Agent, std::move(*pending_), stage.name, next});
    state_.history.push_back({Author::Target, response, stage.name, next + 1});
    pending_.reset();
    ++attemptsThisStage_;

    const auto tokens = text::tokenize(response);
    if (any_phrase(tokens, policy_.abortTokens)) {
        stageOutcomes_.push_back({stage.name, attemptsThisStage_, Receptiveness::Resistant});
        state_.outcome = Outcome::AbortedByTarget;
        return Receptiveness::Resistant;
    }

    const auto verdict = classify_receptiveness(response, stage.successCues, policy_.lexicon);
    const int maxRetries = policy_.maxRetriesOverride.value_or(stage.maxRetries);
    if (verdict == Receptiveness::Resistant && attemptsThisStage_ <= maxRetries) return verdict;
    if (verdict == Receptiveness::Receptive) boost_topics(response);
    advance();
    stageOutcomes_.back().last = verdict;
    return verdict;
}

RunResult run_conversation(const StrategyTemplate& tpl, const SocialProfile& profile,
                           dialogue::TargetInterface& target, dialogue::DialogueBackend& backend,
                           const LoopPolicy& policy) {
    ConversationEngine engine(tpl, profile, backend, policy);
    RunResult result;
    while (!engine.done()) {
        try {
            const std::string utterance = engine.next_utterance();
            engine.accept(se_interact(utterance, target, engine.state().history));
        } catch (const Error& e) {
            engine.fail();
            result.error = e.what();
        }
    }
    result.state = engine.state();
    result.prompts = engine.prompts();
    result.stages = engine.stage_outcomes();
    return result;
}

StrategyTemplate default_template() {
    StrategyTemplate t;
    t.templateId = "three-stage-default";
    t.priority = 1;
    t.requirements = {{PredicateKind::HasFactCategory, "Interest", 1.0}};
    t.stages = {
        {"Opening",
         "Establish rapport with a natural greeting suited to the setting.",
         "Open a friendly, casual conversation. Objective: {STAGE_OBJECTIVE}\nHistory:\n{HISTORY}",
         {"nice to meet"},
         1},
        {"Engage",
         "Discuss the target's interests to build common ground.",
         "Ask about {FACT_0} and connect it to {FACT_1}. Objective: {STAGE_OBJECTIVE}\nHistory:\n{HISTORY}",
         {"me too"},
         1},
        {"Win-Trust",
         "Deepen trust and ask to keep in touch.",
         "Recall {FACT_0} and suggest staying in touch. Objective: {STAGE_OBJECTIVE}\nHistory:\n{HISTORY}",
         {"sounds good", "add me"},
         1},
    };
    return t;
}

std::vector<StrategyTemplate> load_templates(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read templates " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto templates = decode<std::vector<StrategyTemplate>>(parse_json(buf.str()));
    std::set<std::string> ids;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        if (auto r = validate(templates[i]); !r.ok())
            throw FormatError("template " + std::to_string(i) + ": " + r.summary());
        if (!ids.insert(templates[i].templateId).second)
            throw FormatError("duplicate templateId " + templates[i].templateId);
    }
    return templates;
}

void write_transcript(std::ostream& out, const std::vector<Utterance>& history) {
    for (const auto& u : history) out << dump_line(Json(u)) << '\n';
}

std::vector<Utterance> read_transcript(std::istream& in) {
    std::vector<Utterance> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::normalize_whitespace(line).empty()) continue;
        out.push_back(decode<Utterance>(parse_json(line, n), n));
    }
    return out;
}

}  // namespace sear::agent
