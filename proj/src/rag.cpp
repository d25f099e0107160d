#include "sear/rag.hpp"

#include "sear/codec.hpp"
#include "sear/errors.hpp"
#include "sear/text.hpp"
#include "sear/validate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace sear::rag {

std::vector<double> mock_embed(std::string_view input, std::size_t dimension) {
    if (dimension == 0) throw ArgumentError("embedding dimension must be positive");
    std::vector<double> v(dimension, 0.0);
    const auto tokens = text::tokenize(input);
    if (tokens.empty()) {
        v[0] = 1.0;
        return v;
    }
    for (const auto& t : tokens) v[text::hash64(t) % dimension] += 1.0;
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    for (double& x : v) x /= norm;
    return v;
}

MockEmbedder::MockEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw ArgumentError("embedding dimension must be positive");
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

VectorStore::VectorStore(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw ArgumentError("store dimension must be positive");
}

VectorStore VectorStore::from_entries(std::size_t dimension, std::vector<EmbeddingEntry> entries) {
    VectorStore store(dimension);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto r = validate(entries[i], dimension);
        if (!r.ok()) throw FormatError("embedding entry invalid: " + r.summary(), i + 1);
        if (i > 0 && entries[i].entryId <= entries[i - 1].entryId)
            throw FormatError("entryId strictly increasing in insertion order", i + 1);
    }
    store.entries_ = std::move(entries);
    return store;
}

const EmbeddingEntry* VectorStore::find(EntryId id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const EmbeddingEntry& e, EntryId v) { return e.entryId < v; });
    return it != entries_.end() && it->entryId == id ? &*it : nullptr;
}

EntryId VectorStore::insert(EmbeddingEntry entry) {
    const auto r = validate(entry, dimension_);
    // entryId is assigned here, so only the vector checks matter
    for (const auto& v : r.violations) {
        if (v.path == "vector") throw ArgumentError("cannot insert: " + v.message);
    }
    entry.entryId = entries_.empty() ? 0 : entries_.back().entryId + 1;
    entries_.push_back(std::move(entry));
    return entries_.back().entryId;
}

std::vector<VectorStore::Hit> VectorStore::query_top_k(std::span<const double> query, std::size_t k,
                                                       const std::optional<std::string>& roleId) const {
    if (k == 0) throw ArgumentError("k must be >= 1");
    if (query.size() != dimension_) throw ArgumentError("query dimension must equal the store dimension");
    const double norm = std::sqrt(dot(query, query));
    if (std::abs(norm - 1.0) > kUnitNormTolerance) throw ArgumentError("query vector must be unit-norm");

    std::vector<Hit> hits;
    hits.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (roleId && e.roleId != *roleId) continue;
        hits.push_back({&e, std::clamp(dot(query, e.vector), -1.0, 1.0)});
    }
    const auto better = [](const Hit& a, const Hit& b) {
        if (a.cosine != b.cosine) return a.cosine > b.cosine;
        return a.entry->entryId < b.entry->entryId;
    };
    const std::size_t n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);
    hits.resize(n);
    return hits;
}

const RoleRecord* RoleDatabase::find(std::string_view roleId) const {
    auto it = std::lower_bound(roles.begin(), roles.end(), roleId,
                               [](const RoleRecord& r, std::string_view id) { return r.roleId < id; });
    return it != roles.end() && it->roleId == roleId ? &*it : nullptr;
}

std::string role_id_for(std::string_view personRef) {
    std::string out;
    bool dash = false;
    for (unsigned char c : text::normalize_whitespace(personRef)) {
        const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (alnum) {
            if (dash && !out.empty()) out.push_back('-');
            dash = false;
            out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
        } else {
            dash = true;
        }
    }
    return out;
}

RoleDatabase build_role_database(std::span<const SocialCorpusDoc> corpus, const Embedder& embedder,
                                 const BuildOptions& options) {
    struct Pending {
        std::string personRef;
        RoleRecord role;
        std::vector<std::string> sourceRefs;
    };
    std::map<std::string, Pending> byRole;
    std::set<std::string> docIds;

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& doc = corpus[i];
        const std::size_t line = i + 1;
        if (text::normalize_whitespace(doc.personRef).empty()) throw CorpusError("doc without personRef", line);
        if (!docIds.insert(doc.docId).second) throw CorpusError("duplicate docId '" + doc.docId + "'", line);
        const std::string roleId = role_id_for(doc.personRef);
        if (roleId.empty()) throw CorpusError("personRef yields an empty roleId", line);

        auto [it, fresh] = byRole.try_emplace(roleId);
        auto& pending = it->second;
        if (fresh) {
            pending.personRef = doc.personRef;
            pending.role.roleId = roleId;
            pending.role.pseudonym = doc.personRef;
        } else if (pending.personRef != doc.personRef) {
            throw CorpusError("duplicate roleId '" + roleId + "' from personRefs '" + pending.personRef + "' and '" +
                                  doc.personRef + "'",
                              line);
        }

        if (doc.kind == DocKind::Trait) {
            std::istringstream lines(doc.content);
            std::string kv;
            while (std::getline(lines, kv)) {
                kv = text::normalize_whitespace(kv);
                if (kv.empty()) continue;
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw CorpusError("trait line without '=': " + kv, line);
                const auto key = text::normalize_whitespace(kv.substr(0, eq));
                const auto value = text::normalize_whitespace(kv.substr(eq + 1));
                if (!options.traitVocabulary.count(key))
                    throw CorpusError("trait key '" + key + "' not in the declared vocabulary", line);
                pending.role.traits[key] = value;
            }
            continue;
        }

        Fact fact;
        fact.text = text::normalize_whitespace(doc.content);
        if (fact.text.empty()) throw CorpusError("fact doc with empty content", line);
        if (!doc.category) throw CorpusError("fact doc without category", line);
        fact.category = *doc.category;
        fact.salience = std::clamp(doc.salience.value_or(options.defaultSalience), 0.0, 1.0);
        fact.sourceModality = doc.modality;
        fact.observedAtMs = doc.timestamp;

        const bool redundant = std::any_of(pending.role.facts.begin(), pending.role.facts.end(), [&](const Fact& kept) {
            return text::token_jaccard(kept.text, fact.text) >= options.dedupeJaccard;
        });
        if (redundant) continue;
        pending.role.facts.push_back(std::move(fact));
        pending.sourceRefs.push_back(doc.docId);
    }

    RoleDatabase db{{}, VectorStore(embedder.dimension())};
    for (auto& [roleId, pending] : byRole) {
        auto& role = pending.role;
        if (auto name = role.traits.find("name"); name != role.traits.end() && !name->second.empty())
            role.pseudonym = name->second;
        for (std::size_t f = 0; f < role.facts.size(); ++f) {
            EmbeddingEntry entry;
            entry.vector = embedder.embed(role.facts[f].text);
            entry.roleId = role.roleId;
            entry.sourceRef = pending.sourceRefs[f];
            entry.modality = role.facts[f].sourceModality;
            role.embeddingIds.push_back(db.store.insert(std::move(entry)));
        }
        db.roles.push_back(std::move(role));
    }
    return db;
}

std::map<std::string, RoleMatch> assign_roles(const RoleCandidates& candidates, double tau) {
    struct Edge {
        double similarity;
        std::string trackId;
        std::string roleId;
    };
    std::vector<Edge> edges;
    std::map<std::string, RoleMatch> out;
    for (const auto& [trackId, list] : candidates) {
        double best = 0.0;
        bool any = false;
        for (const auto& [roleId, sim] : list) {
            if (!any || sim > best) best = sim;
            any = true;
            if (sim >= tau) edges.push_back({sim, trackId, roleId});
        }
        out[trackId] = RoleMatch{std::nullopt, any ? best : 0.0};
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return std::tie(a.trackId, a.roleId) < std::tie(b.trackId, b.roleId);
    });
    std::set<std::string> takenRoles;
    std::set<std::string> doneTracks;
    for (const auto& e : edges) {
        if (doneTracks.count(e.trackId) || takenRoles.count(e.roleId)) continue;
        out[e.trackId] = RoleMatch{e.roleId, e.similarity};
        doneTracks.insert(e.trackId);
        takenRoles.insert(e.roleId);
    }
    return out;
}

std::string role_query_text(const SocialContextFrame& frame, const FaceTrack& track) {
    std::vector<std::string> parts;
    if (!track.dominantExpression.empty()) parts.push_back(track.dominantExpression);
    if (frame.faceTracks.size() == 1) {
        for (const auto& seg : frame.transcript) {
            if (seg.speaker == Speaker::Other) parts.push_back(seg.text);
        }
    }
    for (const auto& label : frame.environment.objectLabels) parts.push_back(label);
    return text::join(parts, " ");
}

std::map<std::string, RoleMatch> identify_roles(const RoleDatabase& db, const SocialContextFrame& frame,
                                                const Embedder& embedder, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in (0, 1]");
    RoleCandidates candidates;
    for (const auto& track : frame.faceTracks) {
        auto& list = candidates[track.trackId];
        if (db.store.empty()) continue;
        const auto query = embedder.embed(role_query_text(frame, track));
        // full scan, best entry per role
        std::map<std::string, double> bestPerRole;
        for (const auto& hit : db.store.query_top_k(query, db.store.size())) {
            bestPerRole.try_emplace(hit.entry->roleId, hit.cosine);
        }
        for (const auto& [roleId, sim] : bestPerRole) list.emplace_back(roleId, sim);
    }
    return assign_roles(candidates, tau);
}

double rank_score(const Fact& fact, Millis nowMs, const RankingOptions& options) {
    const auto it = options.categoryWeights.find(fact.category);
    const double weight = it == options.categoryWeights.end() ? 0.0 : it->second;
    const double ageDays = std::max<double>(0.0, static_cast<double>(nowMs - fact.observedAtMs)) / 86'400'000.0;
    return weight * fact.salience * std::exp2(-ageDays / options.halfLifeDays);
}

std::vector<RankedFact> rank_facts(std::vector<Fact> facts, Millis nowMs, const RankingOptions& options) {
    std::vector<RankedFact> ranked;
    ranked.reserve(facts.size());
    for (auto& f : facts) {
        const double score = rank_score(f, nowMs, options);
        ranked.push_back({std::move(f), score});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedFact& a, const RankedFact& b) {
        if (a.rankScore != b.rankScore) return a.rankScore > b.rankScore;
        return a.fact.text < b.fact.text;
    });
    return ranked;
}

SocialProfile generate_profile(const RoleRecord& role, const EnvironmentContext& environment, Millis nowMs,
                               const RankingOptions& options) {
    SocialProfile p;
    p.roleId = role.roleId;
    p.coreIdentity = role.traits;
    p.rankedFacts = rank_facts(role.facts, nowMs, options);
    p.environmentContext = environment;
    p.lastUpdatedMs = nowMs;
    return p;
}

SocialProfile adapt_profile(const SocialProfile& profile, const SocialContextFrame& frame, const RoleDatabase& db,
                            const Embedder& embedder, Millis nowMs, const AdaptOptions& options) {
    const RoleRecord* role = db.find(profile.roleId);
    if (!role) throw StateError("profile roleId '" + profile.roleId + "' does not resolve in the role database");

    std::vector<Fact> facts;
    facts.reserve(profile.rankedFacts.size());
    for (const auto& rf : profile.rankedFacts) facts.push_back(rf.fact);

    const auto same_fact = [](const Fact& a, const Fact& b) {
        return a.text == b.text && a.category == b.category && a.sourceModality == b.sourceModality &&
               a.observedAtMs == b.observedAtMs;
    };

    if (options.topK > 0 && !role->facts.empty()) {
        for (const auto& seg : frame.transcript) {
            const auto query = embedder.embed(seg.text);
            for (const auto& hit : db.store.query_top_k(query, options.topK, role->roleId)) {
                if (!(hit.cosine > 0.0)) continue;
                const auto pos = std::find(role->embeddingIds.begin(), role->embeddingIds.end(), hit.entry->entryId);
                if (pos == role->embeddingIds.end()) continue;
                const Fact& source = role->facts[static_cast<std::size_t>(pos - role->embeddingIds.begin())];
                for (auto& f : facts) {
                    if (same_fact(f, source)) f.salience = std::min(1.0, f.salience + options.salienceBump);
                }
            }
        }
    }

    SocialProfile out = profile;
    out.rankedFacts = rank_facts(std::move(facts), nowMs, options.ranking);
    out.environmentContext = frame.environment;
    out.lastUpdatedMs = nowMs;
    return out;
}

void save_role_database(const RoleDatabase& db, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        std::ofstream out(dir / "roles.json", std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + (dir / "roles.json").string());
        out << dump_pretty(Json(db.roles));
        if (!out) throw IoError("write failed: " + (dir / "roles.json").string());
    }
    std::ofstream out(dir / "embeddings.ndjson", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / "embeddings.ndjson").string());
    for (const auto& e : db.store.entries()) out << dump_line(Json(e)) << '\n';
    if (!out) throw IoError("write failed: " + (dir / "embeddings.ndjson").string());
}

RoleDatabase load_role_database(const std::filesystem::path& dir, std::size_t dimension) {
    std::ifstream rolesIn(dir / "roles.json", std::ios::binary);
    if (!rolesIn) throw IoError("cannot read " + (dir / "roles.json").string());
    std::stringstream buffer;
    buffer << rolesIn.rdbuf();
    auto roles = decode<std::vector<RoleRecord>>(parse_json(buffer.str()));
    std::sort(roles.begin(), roles.end(), [](const RoleRecord& a, const RoleRecord& b) { return a.roleId < b.roleId; });

    std::ifstream embIn(dir / "embeddings.ndjson", std::ios::binary);
    if (!embIn) throw IoError("cannot read " + (dir / "embeddings.ndjson").string());
    std::vector<EmbeddingEntry> entries;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(embIn, line)) {
        ++lineNo;
        if (text::normalize_whitespace(line).empty()) continue;
        entries.push_back(decode<EmbeddingEntry>(parse_json(line, lineNo), lineNo));
    }
    RoleDatabase db{std::move(roles), VectorStore::from_entries(dimension, std::move(entries))};
    for (const auto& role : db.roles) {
        for (EntryId id : role.embeddingIds) {
            if (!db.store.find(id)) throw FormatError("role '" + role.roleId + "' references missing entry " + std::to_string(id));
        }
    }
    return db;
}

}  // namespace sear::rag
