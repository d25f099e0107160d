#pragma once

// Declarative run configuration shared by every CLI verb.

#include "sear/agent.hpp"
#include "sear/context.hpp"
#include "sear/dataset.hpp"
#include "sear/dialogue.hpp"
#include "sear/rag.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sear::config {

enum class BackendKind { Scripted, Http };

struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    std::optional<std::filesystem::path> script;  // scripted replies; none = echo
    dialogue::EndpointConfig endpoint;             // apiKeyRef names an env var, never the key
};

struct Config {
    std::size_t dimension = rag::kDefaultDimension;
    double tau = rag::kDefaultRoleThreshold;
    std::optional<Millis> nowMs;  // none = newest fact of the role
    rag::BuildOptions build;
    rag::RankingOptions ranking;
    rag::AdaptOptions adapt;
    context::SynthesisConfig synthesis;
    agent::LoopPolicy loop;
    BackendConfig backend;
    std::string anonymizeKeyRef = "SEAR_ANON_KEY";
    dataset::AnonymizeOptions anonymize;  // key stays empty until resolved
};

/// Defaults as a JSON document; every accepted key appears here.
Json default_config_json();

/// Applies "a.b.c=value" overrides. The value is parsed as JSON when it
/// parses, otherwise taken as a string. Unknown keys are an ArgumentError.
void apply_overrides(Json& doc, const std::vector<std::string>& overrides);

/// Strict decode: unknown keys and wrong types raise FormatError. Relative
/// paths resolve against `baseDir`.
Config config_from_json(const Json& doc, const std::filesystem::path& baseDir = {});

/// Defaults, then the file (if given), then overrides.
Config load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides = {});

}  // namespace sear::config
