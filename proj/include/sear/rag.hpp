#pragma once

// Stage 2: role database construction, exact vector retrieval, role
// identification from live context, and ranked social profiles.

#include "sear/corpus.hpp"
#include "sear/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sear::rag {

constexpr std::size_t kDefaultDimension = 256;

/// Deterministic text encoder producing unit vectors of a fixed dimension.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Hashed bag of tokens: each token adds 1 at hash64(token) mod D, then the
/// vector is L2-normalised. Text without tokens maps to e0.
std::vector<double> mock_embed(std::string_view text, std::size_t dimension = kDefaultDimension);

class MockEmbedder final : public Embedder {
public:
    explicit MockEmbedder(std::size_t dimension = kDefaultDimension);
    std::size_t dimension() const override { return dimension_; }
    std::vector<double> embed(std::string_view text) const override { return mock_embed(text, dimension_); }

private:
    std::size_t dimension_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Exact-scan vector store. Const member functions may be called
/// concurrently; mutation requires exclusive access (one writer).
class VectorStore {
public:
    struct Hit {
        const EmbeddingEntry* entry = nullptr;
        double cosine = 0.0;
    };

    explicit VectorStore(std::size_t dimension = kDefaultDimension);

    /// Rebuilds a store from persisted entries; ids must be strictly increasing.
    static VectorStore from_entries(std::size_t dimension, std::vector<EmbeddingEntry> entries);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<EmbeddingEntry>& entries() const noexcept { return entries_; }
    const EmbeddingEntry* find(EntryId id) const;

    /// Appends the entry, assigning previous max id + 1 (0 when empty).
    /// Throws ArgumentError on dimension or norm violations.
    EntryId insert(EmbeddingEntry entry);

    /// Cosine descending, ties by smaller entryId; min(k, size) results.
    /// When `roleId` is given only that role's entries are considered.
    std::vector<Hit> query_top_k(std::span<const double> query, std::size_t k,
                                 const std::optional<std::string>& roleId = std::nullopt) const;

    bool operator==(const VectorStore& other) const {
        return dimension_ == other.dimension_ && entries_ == other.entries_;
    }

private:
    std::size_t dimension_;
    std::vector<EmbeddingEntry> entries_;
};

struct RoleDatabase {
    std::vector<RoleRecord> roles;  // sorted by roleId
    VectorStore store;

    const RoleRecord* find(std::string_view roleId) const;
    bool operator==(const RoleDatabase&) const = default;
};

struct BuildOptions {
    TraitVocabulary traitVocabulary{"name", "profession", "ageBand", "residence", "education", "employer", "gender"};
    double dedupeJaccard = 0.9;
    double defaultSalience = 0.5;
};

/// Role id derived from a person reference: lowercase, non-alphanumerics → '-'.
std::string role_id_for(std::string_view personRef);

/// Groups docs by person, extracts traits and facts, drops near-duplicate
/// facts (token Jaccard >= threshold keeps the earlier doc) and indexes each
/// kept fact. Throws CorpusError (carrying the 1-based doc position) for docs
/// without personRef, distinct personRefs colliding on one roleId, unknown
/// trait keys, facts without category or text, and duplicate docIds.
RoleDatabase build_role_database(std::span<const SocialCorpusDoc> corpus, const Embedder& embedder,
                                 const BuildOptions& options = {});

struct RoleMatch {
    std::optional<std::string> roleId;  // nullopt = Unknown
    double similarity = 0.0;

    bool operator==(const RoleMatch&) const = default;
};

/// Candidate similarities per track, each list in any order.
using RoleCandidates = std::map<std::string, std::vector<std::pair<std::string, double>>>;

/// Injective assignment: candidates >= tau are taken greedily by descending
/// similarity (ties: trackId, then roleId), so when two tracks want the same
/// role the stronger keeps it and the weaker falls back to its next candidate.
/// Tracks left without a role get Unknown with their best observed similarity.
std::map<std::string, RoleMatch> assign_roles(const RoleCandidates& candidates, double tau);

/// Text used to identify the person behind a face track: dominant expression,
/// the Other-speaker transcript (attributed only when the frame has exactly
/// one face track), and the environment labels.
std::string role_query_text(const SocialContextFrame& frame, const FaceTrack& track);

constexpr double kDefaultRoleThreshold = 0.35;

std::map<std::string, RoleMatch> identify_roles(const RoleDatabase& db, const SocialContextFrame& frame,
                                                const Embedder& embedder, double tau = kDefaultRoleThreshold);

struct RankingOptions {
    std::map<FactCategory, double> categoryWeights{{FactCategory::Interest, 1.0},
                                                   {FactCategory::Vulnerability, 1.0},
                                                   {FactCategory::Event, 0.8},
                                                   {FactCategory::Relational, 0.5},
                                                   {FactCategory::Demographic, 0.2}};
    double halfLifeDays = 30.0;
};

/// categoryWeight × salience × 2^(−ageDays/halfLife); future facts count as age 0.
double rank_score(const Fact& fact, Millis nowMs, const RankingOptions& options = {});

/// Score-descending, ties by fact text.
std::vector<RankedFact> rank_facts(std::vector<Fact> facts, Millis nowMs, const RankingOptions& options = {});

SocialProfile generate_profile(const RoleRecord& role, const EnvironmentContext& environment, Millis nowMs,
                               const RankingOptions& options = {});

struct AdaptOptions {
    std::size_t topK = 3;
    double salienceBump = 0.1;
    RankingOptions ranking;
};

/// Each transcript segment of the frame retrieves the role's top-k facts
/// (positive cosine only); those facts gain salience (capped at 1). The
/// environment is replaced and facts are re-ranked at nowMs. Throws
/// StateError when the profile's roleId is not in the database.
SocialProfile adapt_profile(const SocialProfile& profile, const SocialContextFrame& frame, const RoleDatabase& db,
                            const Embedder& embedder, Millis nowMs, const AdaptOptions& options = {});

/// roles.json (array of RoleRecord) and embeddings.ndjson (one entry per line).
void save_role_database(const RoleDatabase& db, const std::filesystem::path& dir);
RoleDatabase load_role_database(const std::filesystem::path& dir, std::size_t dimension = kDefaultDimension);

}  // namespace sear::rag
