#pragma once

// Stage 3: strategy selection and the staged reasoning/interaction loop.

#include "sear/dialogue.hpp"
#include "sear/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sear::agent {

struct StrategyScore {
    std::string templateId;
    double confidence = 0.0;
    std::vector<std::pair<Predicate, bool>> perPredicate;

    bool operator==(const StrategyScore&) const = default;
};

struct Selection {
    const StrategyTemplate* selected = nullptr;
    std::vector<StrategyScore> scores;  // same order as the input templates
};

/// Whether one requirement holds against the profile. Throws ArgumentError
/// for a malformed argument ("key=value" missing '=', unknown category).
bool predicate_holds(const Predicate& predicate, const SocialProfile& profile);

/// Σ wᵢ·satᵢ / Σ wᵢ, 0 for a template without requirements.
StrategyScore score_template(const StrategyTemplate& tpl, const SocialProfile& profile);

/// Highest confidence wins; ties go to higher priority, then smaller templateId.
/// Throws ArgumentError for an empty list.
Selection check_se_strategies(std::span<const StrategyTemplate> templates, const SocialProfile& profile);

inline constexpr std::string_view kEmptyMarker = "<none>";

/// Profile facts in prompt order: rank order, with facts sharing tokens with
/// boosted topics moved ahead (stable, by summed topic weight).
std::vector<std::string> prompt_facts(const SocialProfile& profile, const std::map<std::string, double>& topicWeights);

/// Fills {FACT_i}, {HISTORY} (last `historyWindow` utterances) and {STAGE_OBJECTIVE}.
std::string fill_prompt(const ConversationState& state, const SocialProfile& profile, const StageSpec& stage,
                        std::size_t historyWindow = 6);

dialogue::ChatRequest build_request(const ConversationState& state, const SocialProfile& profile,
                                    const StageSpec& stage, std::size_t historyWindow = 6);

struct Generated {
    dialogue::ChatRequest request;
    std::string text;
};

/// Builds the prompt and asks the backend. Backend errors propagate.
Generated gen_conv(const ConversationState& state, const SocialProfile& profile, const StageSpec& stage,
                   dialogue::DialogueBackend& backend, std::size_t historyWindow = 6);

std::string se_interact(std::string_view utterance, dialogue::TargetInterface& target,
                        const std::vector<Utterance>& history);

enum class Receptiveness { Receptive, Neutral, Resistant };

std::string_view to_string(Receptiveness r);

struct Lexicon {
    std::vector<std::string> positive{"love", "great", "yes", "sure", "awesome", "cool", "nice", "definitely",
                                      "absolutely", "glad", "fun", "interesting", "amazing", "thanks"};
    std::vector<std::string> negative{"no", "stop", "busy", "not", "never", "nope", "leave", "weird",
                                      "suspicious", "uncomfortable", "creepy"};
};

/// +1 per positive token, −1 per negative token; a success cue forces Receptive.
Receptiveness classify_receptiveness(std::string_view response, std::span<const std::string> successCues = {},
                                     const Lexicon& lexicon = {});

struct LoopPolicy {
    std::optional<int> maxRetriesOverride;
    std::vector<std::string> abortTokens{"leave me alone", "stop"};
    std::size_t historyWindow = 6;
    double topicBoost = 1.0;
    Lexicon lexicon;
};

ValidationReport validate(const LoopPolicy& p);

struct PromptRecord {
    std::string stageName;
    std::string prompt;  // filled skeleton sent as the user turn
    std::string reply;   // agent utterance produced from it

    bool operator==(const PromptRecord&) const = default;
};

struct StageOutcome {
    std::string stageName;
    int attempts = 0;
    Receptiveness last = Receptiveness::Neutral;

    bool operator==(const StageOutcome&) const = default;
};

/// Step-wise form of the loop, so a caller can drive the target side itself.
/// Usage: while (!done()) { auto u = next_utterance(); accept(reply_to(u)); }
class ConversationEngine {
public:
    ConversationEngine(StrategyTemplate tpl, SocialProfile profile, dialogue::DialogueBackend& backend,
                       LoopPolicy policy = {});

    bool done() const { return state_.outcome.has_value(); }
    bool awaiting_response() const { return pending_.has_value(); }

    /// Generates the agent turn for the current stage. A backend failure ends
    /// the conversation as Exhausted and rethrows.
    const std::string& next_utterance();

    /// Records the target reply for the pending utterance and advances.
    Receptiveness accept(std::string response);

    /// Ends the conversation as Exhausted without recording the pending turn.
    void fail();

    const ConversationState& state() const { return state_; }
    const StrategyTemplate& strategy() const { return tpl_; }
    const StageSpec* current_stage() const;
    const SocialProfile& profile() const { return profile_; }
    const std::vector<PromptRecord>& prompts() const { return prompts_; }
    const std::vector<StageOutcome>& stage_outcomes() const { return stageOutcomes_; }

private:
    void boost_topics(std::string_view response);
    void advance();

    StrategyTemplate tpl_;
    SocialProfile profile_;
    dialogue::DialogueBackend& backend_;
    LoopPolicy policy_;
    ConversationState state_;
    std::optional<std::string> pending_;
    int attemptsThisStage_ = 0;
    std::vector<PromptRecord> prompts_;
    std::vector<StageOutcome> stageOutcomes_;
};

struct RunResult {
    ConversationState state;
    std::vector<PromptRecord> prompts;
    std::vector<StageOutcome> stages;
    std::string error;  // set when the outcome is Exhausted
};

/// Runs every stage against the target. Backend and interaction errors end
/// the run as Exhausted with the paired history kept.
RunResult run_conversation(const StrategyTemplate& tpl, const SocialProfile& profile,
                           dialogue::TargetInterface& target, dialogue::DialogueBackend& backend,
                           const LoopPolicy& policy = {});

/// Opening / Engage / Win-Trust.
StrategyTemplate default_template();

std::vector<StrategyTemplate> load_templates(const std::filesystem::path& path);

void write_transcript(std::ostream& out, const std::vector<Utterance>& history);
std::vector<Utterance> read_transcript(std::istream& in);

}  // namespace sear::agent
