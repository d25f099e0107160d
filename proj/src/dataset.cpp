#include "sear/dataset.hpp"

#include "sear/errors.hpp"
#include "sear/text.hpp"
#include "sear/validate.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sear::dataset {

namespace {

constexpr std::string_view kAmbientTrack = "\x01ambient";

bool valid_rate(int hz) { return hz == 8000 || hz == 16000 || hz == 48000; }

SessionHeader parse_header(const std::string& line) {
    const Json j = parse_json(line, 1);
    try {
        if (!j.is_object() || j.value("type", std::string()) != "header")
            throw FormatError("first line must be the session header", 1);
        SessionHeader h;
        h.sessionId = j.at("sessionId").get<std::string>();
        h.sampleRateHz = j.at("sampleRateHz").get<int>();
        h.frameSize = j.value("frameSize", std::size_t{1024});
        h.participants = j.value("participants", std::vector<std::string>{});
        if (h.sessionId.empty()) throw FormatError("sessionId non-empty", 1);
        if (!valid_rate(h.sampleRateHz)) throw FormatError("sampleRateHz ∈ {8000, 16000, 48000}", 1);
        if (h.frameSize == 0) throw FormatError("frameSize > 0", 1);
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("header: ") + e.what(), 1);
    }
}

Json header_json(const SessionHeader& h) {
    return Json{{"type", "header"},
                {"sessionId", h.sessionId},
                {"sampleRateHz", h.sampleRateHz},
                {"frameSize", h.frameSize},
                {"participants", h.participants}};
}

}  // namespace

SessionLoad load_session(std::istream& in) {
    SessionLoad out;
    std::string line;
    if (!std::getline(in, line) || text::normalize_whitespace(line).empty())
        throw FormatError("missing session header", 1);
    out.session.header = parse_header(line);

    std::map<std::string, Millis> lastByTrack;
    Millis lastAudio = -1;
    Millis lastToken = -1;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (text::normalize_whitespace(line).empty()) continue;
        try {
            Json j = parse_json(line, n);
            if (!j.is_object()) throw FormatError("record must be an object", n);
            const auto type = j.value("type", std::string());
            if (type == "cue") {
                auto cue = decode<CueEvent>(j, n);
                if (auto r = validate(cue); !r.ok()) throw FormatError(r.summary(), n);
                const std::string track = cue.trackId ? *cue.trackId : std::string(kAmbientTrack);
                if (auto it = lastByTrack.find(track); it != lastByTrack.end() && cue.timestampMs < it->second) {
                    const auto name = cue.trackId ? "track " + *cue.trackId : std::string("ambient cues");
                    throw FormatError("timestamps non-decreasing per trackId (" + name + " went from " +
                                          std::to_string(it->second) + " to " + std::to_string(cue.timestampMs) + ")",
                                      n);
                }
                lastByTrack[track] = cue.timestampMs;
                out.session.cues.push_back(std::move(cue));
            } else if (type == "audio_ref") {
                AudioFrameRef ref;
                ref.startMs = j.at("startMs").get<Millis>();
                ref.path = j.at("path").get<std::string>();
                ref.offset = j.at("offset").get<std::uint64_t>();
                ref.count = j.at("count").get<std::size_t>();
                if (ref.startMs < 0) throw FormatError("startMs ≥ 0", n);
                if (ref.path.empty()) throw FormatError("audio path non-empty", n);
                if (ref.count != out.session.header.frameSize)
                    throw FormatError("audio frame length must equal the header frameSize", n);
                if (ref.startMs < lastAudio) throw FormatError("audio frames must not go back in time", n);
                lastAudio = ref.startMs;
                out.session.audio.push_back(std::move(ref));
            } else if (type == "token") {
                context::TranscriptToken t{j.at("text").get<std::string>(), j.at("startMs").get<Millis>(),
                                           j.at("endMs").get<Millis>()};
                if (t.startMs < 0 || t.endMs < t.startMs) throw FormatError("token needs 0 ≤ startMs ≤ endMs", n);
                if (t.startMs < lastToken) throw FormatError("tokens must not go back in time", n);
                lastToken = t.startMs;
                out.session.tokens.push_back(std::move(t));
            } else {
                throw FormatError("unknown record type '" + type + "'", n);
            }
        } catch (const FormatError& e) {
            out.errors.push_back({n, e.what()});
        } catch (const nlohmann::json::exception& e) {
            out.errors.push_back({n, "line " + std::to_string(n) + ": " + e.what()});
        }
    }
    return out;
}

SessionLoad load_session(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read session " + path.string());
    return load_session(in);
}

void write_session(std::ostream& out, const Session& s) {
    out << dump_line(header_json(s.header)) << '\n';
    for (const auto& c : s.cues) {
        Json j = c;
        j["type"] = "cue";
        out << dump_line(j) << '\n';
    }
    for (const auto& a : s.audio) {
        out << dump_line(Json{{"type", "audio_ref"},
                              {"startMs", a.startMs},
                              {"path", a.path},
                              {"offset", a.offset},
                              {"count", a.count}})
            << '\n';
    }
    for (const auto& t : s.tokens) {
        out << dump_line(Json{{"type", "token"}, {"text", t.text}, {"startMs", t.startMs}, {"endMs", t.endMs}}) << '\n';
    }
}

namespace {

static_assert(sizeof(float) == 4);

float float_from_le(const unsigned char* p) {
    std::uint32_t bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                         std::uint32_t(p[3]) << 24;
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void float_to_le(float f, unsigned char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(bits >> (8 * i));
}

}  // namespace

std::vector<context::AudioFrame> load_audio(const Session& session, const std::filesystem::path& baseDir) {
    std::vector<context::AudioFrame> frames;
    std::map<std::string, std::ifstream> open;
    for (const auto& ref : session.audio) {
        auto& in = open[ref.path];
        if (!in.is_open()) {
            in.open(baseDir / ref.path, std::ios::binary);
            if (!in) throw IoError("cannot read audio blob " + (baseDir / ref.path).string());
        }
        std::vector<unsigned char> raw(ref.count * 4);
        in.clear();
        in.seekg(static_cast<std::streamoff>(ref.offset * 4));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size()))
            throw IoError("audio blob " + ref.path + " is shorter than its references");
        context::AudioFrame f;
        f.sampleRateHz = session.header.sampleRateHz;
        f.startMs = ref.startMs;
        f.samples.resize(ref.count);
        for (std::size_t i = 0; i < ref.count; ++i) f.samples[i] = float_from_le(&raw[i * 4]);
        frames.push_back(std::move(f));
    }
    return frames;
}

AudioFrameRef append_audio_blob(const std::filesystem::path& blob, const std::string& relPath,
                                const context::AudioFrame& frame) {
    std::uint64_t existing = 0;
    if (std::filesystem::exists(blob)) existing = std::filesystem::file_size(blob) / 4;
    std::ofstream out(blob, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot write audio blob " + blob.string());
    std::vector<unsigned char> raw(frame.samples.size() * 4);
    for (std::size_t i = 0; i < frame.samples.size(); ++i)
        float_to_le(static_cast<float>(frame.samples[i]), &raw[i * 4]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed for " + blob.string());
    return {frame.startMs, relPath, existing, frame.samples.size()};
}

std::vector<SocialCorpusDoc> load_corpus(std::istream& in) {
    std::vector<SocialCorpusDoc> docs;
    std::vector<std::pair<std::size_t, std::string>> problems;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::normalize_whitespace(line).empty()) continue;
        try {
            docs.push_back(decode<SocialCorpusDoc>(parse_json(line, n), n));
        } catch (const FormatError& e) {
            std::string what = e.what();
            if (e.line()) what = what.substr(what.find(": ") + 2);
            problems.emplace_back(n, what);
        }
    }
    if (!problems.empty()) {
        // CorpusError prefixes the first line itself.
        std::string msg = problems.front().second;
        for (std::size_t i = 1; i < problems.size(); ++i)
            msg += "; line " + std::to_string(problems[i].first) + ": " + problems[i].second;
        throw CorpusError(msg, problems.front().first);
    }
    return docs;
}

std::vector<SocialCorpusDoc> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read corpus " + path.string());
    return load_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<SocialCorpusDoc>& docs) {
    for (const auto& d : docs) out << dump_line(Json(d)) << '\n';
}

// ---- pseudonymization ----

std::string normalize_name(std::string_view name) {
    std::string out;
    bool gap = false;
    for (unsigned char c : name) {
        if (std::isalnum(c) || c >= 0x80) {
            if (gap && !out.empty()) out += ' ';
            gap = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            gap = true;
        }
    }
    return out;
}

namespace {

std::string hmac_hex(std::string_view key, std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), reinterpret_cast<const unsigned char*>(data.data()),
              data.size(), digest, &len))
        throw Error("HMAC computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

bool word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

// A space in `form` matches any run of separators, so "ann lee" also hits
// "ann-lee" and "Ann  Lee". Returns the end offset or npos.
std::size_t match_at(const std::string& hay, std::size_t i, const std::string& form) {
    for (char f : form) {
        if (i >= hay.size()) return std::string::npos;
        if (f == ' ' && !word_char(static_cast<unsigned char>(hay[i]))) {
            while (i < hay.size() && !word_char(static_cast<unsigned char>(hay[i]))) ++i;
            continue;
        }
        if (hay[i] != f) return std::string::npos;
        ++i;
    }
    return i;
}

class Anonymizer {
public:
    explicit Anonymizer(const AnonymizeOptions& options) : opt_(options) {
        if (opt_.key.empty()) throw ArgumentError("anonymization key must be non-empty");
        for (const auto& n : opt_.knownNames) add(n);
    }

    void add(std::string_view raw) {
        if (is_pseudonym(raw)) return;
        const auto norm = normalize_name(raw);
        if (norm.empty()) return;
        const auto p = pseudonym(opt_.key, raw);
        mapping_[norm] = p;
        forms_[text::to_lower(raw)] = p;
        forms_[norm] = p;
        if (!opt_.replaceNameParts) return;
        for (const auto& part : text::tokenize(norm)) {
            if (part.size() >= 3 && part != norm) parts_.emplace(part, p);  // first registration wins
        }
    }

    std::string id(std::string_view raw) {
        if (is_pseudonym(raw) || normalize_name(raw).empty()) return std::string(raw);
        return pseudonym(opt_.key, raw);
    }

    /// Freezes the match list; call after every add().
    void seal() {
        sorted_.clear();
        for (const auto& [form, p] : forms_) sorted_.emplace_back(form, p);
        for (const auto& [form, p] : parts_) {
            if (!forms_.count(form)) sorted_.emplace_back(form, p);
        }
        std::sort(sorted_.begin(), sorted_.end(), [](const auto& a, const auto& b) {
            return a.first.size() != b.first.size() ? a.first.size() > b.first.size() : a.first < b.first;
        });
    }

    std::string scrub(std::string_view s) const {
        if (sorted_.empty()) return std::string(s);
        const auto lower = text::to_lower(s);
        std::string out;
        std::size_t i = 0;
        while (i < s.size()) {
            bool replaced = false;
            if (i == 0 || !word_char(static_cast<unsigned char>(lower[i - 1]))) {
                for (const auto& [form, p] : sorted_) {
                    const auto end = match_at(lower, i, form);
                    if (end == std::string::npos) continue;
                    if (end < lower.size() && word_char(static_cast<unsigned char>(lower[end]))) continue;
                    out += p;
                    i = end;
                    replaced = true;
                    break;
                }
            }
            if (!replaced) out += s[i++];
        }
        return out;
    }

    std::string digest() const {
        std::string canon;
        for (const auto& [name, p] : mapping_) canon += name + '\t' + p + '\n';
        return hmac_hex(opt_.key, canon);
    }

    std::size_t size() const { return mapping_.size(); }
    const AnonymizeOptions& options() const { return opt_; }

private:
    const AnonymizeOptions& opt_;
    std::map<std::string, std::string> mapping_;
    std::map<std::string, std::string> forms_;
    std::map<std::string, std::string> parts_;
    std::vector<std::pair<std::string, std::string>> sorted_;
};

// Trait content is "key=value" per line.
template <typename F>
std::string map_trait_lines(const std::string& content, F&& f) {
    std::istringstream in(content);
    std::string line, out;
    bool first = true;
    while (std::getline(in, line)) {
        if (!first) out += '\n';
        first = false;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            out += f(std::string(), line);
            continue;
        }
        out += line.substr(0, eq + 1) + f(text::normalize_whitespace(line.substr(0, eq)), line.substr(eq + 1));
    }
    return out;
}

template <typename T>
Anonymized<T> finish(T data, const Anonymizer& a) {
    return {std::move(data), a.digest(), a.size()};
}

}  // namespace

std::string pseudonym(std::string_view key, std::string_view name) {
    if (key.empty()) throw ArgumentError("anonymization key must be non-empty");
    return "P-" + hmac_hex(key, normalize_name(name)).substr(0, 8);
}

bool is_pseudonym(std::string_view s) {
    if (s.size() != 10 || s.substr(0, 2) != "P-") return false;
    return std::all_of(s.begin() + 2, s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

Anonymized<std::vector<SocialCorpusDoc>> anonymize(const std::vector<SocialCorpusDoc>& corpus,
                                                   const AnonymizeOptions& options) {
    Anonymizer a(options);
    for (const auto& d : corpus) {
        a.add(d.personRef);
        if (d.kind == DocKind::Trait) {
            map_trait_lines(d.content, [&](const std::string& key, const std::string& value) {
                if (key == "name") a.add(text::normalize_whitespace(value));
                return value;
            });
        }
    }
    a.seal();
    auto out = corpus;
    for (auto& d : out) {
        d.personRef = a.id(d.personRef);
        d.docId = a.scrub(d.docId);
        if (d.kind == DocKind::Trait) {
            d.content = map_trait_lines(d.content, [&](const std::string& key, const std::string& value) {
                return key == "name" ? a.id(text::normalize_whitespace(value)) : a.scrub(value);
            });
        } else {
            d.content = a.scrub(d.content);
        }
    }
    return finish(std::move(out), a);
}

Anonymized<Session> anonymize(const Session& session, const AnonymizeOptions& options) {
    Anonymizer a(options);
    for (const auto& p : session.header.participants) a.add(p);
    for (const auto& c : session.cues) {
        for (const auto& [key, value] : c.payload) {
            if (const auto* s = std::get_if<std::string>(&value); s && options.identityPayloadKeys.count(key)) a.add(*s);
        }
    }
    a.seal();
    Session out = session;
    for (auto& p : out.header.participants) p = a.id(p);
    for (auto& c : out.cues) {
        std::map<std::string, PayloadValue> payload;
        for (auto& [key, value] : c.payload) {
            if (options.payloadDenylist.count(key)) continue;
            if (auto* s = std::get_if<std::string>(&value)) {
                payload[key] = options.identityPayloadKeys.count(key) ? a.id(*s) : a.scrub(*s);
            } else {
                payload[key] = value;
            }
        }
        c.payload = std::move(payload);
    }
    for (auto& t : out.tokens) t.text = a.scrub(t.text);
    return finish(std::move(out), a);
}

Anonymized<std::vector<QuestionnaireResponse>> anonymize(const std::vector<QuestionnaireResponse>& responses,
                                                        const AnonymizeOptions& options) {
    Anonymizer a(options);
    for (const auto& r : responses) a.add(r.participantPseudonym);
    a.seal();
    auto out = responses;
    for (auto& r : out) {
        r.participantPseudonym = a.id(r.participantPseudonym);
        if (auto* s = std::get_if<std::string>(&r.value)) *s = a.scrub(*s);
    }
    return finish(std::move(out), a);
}

// ---- wire protocol ----

std::string_view wire_type(const WireMessage& m) {
    struct V {
        std::string_view operator()(const SocialContextFrame&) const { return "context_frame"; }
        std::string_view operator()(const TranscriptExport&) const { return "transcript"; }
        std::string_view operator()(const ControlMessage&) const { return "control"; }
        std::string_view operator()(const ProfileUpdate&) const { return "profile_update"; }
        std::string_view operator()(const AgentUtterance&) const { return "agent_utterance"; }
        std::string_view operator()(const ErrorMessage&) const { return "error"; }
    };
    return std::visit(V{}, m);
}

std::string wire_encode(const WireMessage& m) {
    struct V {
        Json operator()(const SocialContextFrame& f) const { return f; }
        Json operator()(const TranscriptExport& t) const { return Json{{"utterances", t.utterances}}; }
        Json operator()(const ControlMessage& c) const { return Json{{"command", c.command}, {"args", c.args}}; }
        Json operator()(const ProfileUpdate& p) const {
            return Json{{"trackId", p.trackId}, {"similarity", text::round9(p.similarity)}, {"profile", p.profile}};
        }
        Json operator()(const AgentUtterance& u) const { return u.utterance; }
        Json operator()(const ErrorMessage& e) const { return Json{{"message", e.message}, {"line", e.line}}; }
    };
    return dump_line(Json{{"v", kWireVersion}, {"type", wire_type(m)}, {"payload", std::visit(V{}, m)}});
}

WireMessage wire_decode(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("not a JSON line: ") + e.what());
    }
    if (!j.is_object()) throw ProtocolError("message must be a JSON object");
    const auto v = j.find("v");
    if (v == j.end() || !v->is_number_integer()) throw ProtocolError("message lacks an integer v");
    if (v->get<int>() != kWireVersion) throw ProtocolError("unsupported protocol version " + v->dump());
    const auto type = j.find("type");
    if (type == j.end() || !type->is_string()) throw ProtocolError("message lacks a type");
    const auto payload = j.find("payload");
    if (payload == j.end() || !payload->is_object()) throw ProtocolError("message lacks an object payload");
    const auto t = type->get<std::string>();
    const Json& p = *payload;
    try {
        if (t == "context_frame") {
            auto f = decode<SocialContextFrame>(p);
            if (auto r = validate(f); !r.ok()) throw ProtocolError("invalid context_frame: " + r.summary());
            return f;
        }
        if (t == "transcript") return TranscriptExport{p.at("utterances").get<std::vector<Utterance>>()};
        if (t == "control") {
            ControlMessage c{p.at("command").get<std::string>(), p.value("args", Json::object())};
            if (!c.args.is_object()) throw ProtocolError("control args must be an object");
            return c;
        }
        if (t == "profile_update")
            return ProfileUpdate{p.at("trackId").get<std::string>(), p.at("similarity").get<double>(),
                                 p.at("profile").get<SocialProfile>()};
        if (t == "agent_utterance") return AgentUtterance{decode<Utterance>(p)};
        if (t == "error") return ErrorMessage{p.at("message").get<std::string>(), p.value("line", std::size_t{0})};
    } catch (const FormatError& e) {
        throw ProtocolError("bad " + t + " payload: " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError("bad " + t + " payload: " + e.what());
    }
    throw ProtocolError("unknown message type '" + t + "'");
}

}  // namespace sear::dataset
