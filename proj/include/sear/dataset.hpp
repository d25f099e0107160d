#pragma once

// On-disk formats, pseudonymization and the v1 wire protocol.

#include "sear/codec.hpp"
#include "sear/context.hpp"
#include "sear/corpus.hpp"
#include "sear/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sear::dataset {

struct SessionHeader {
    std::string sessionId;
    int sampleRateHz = 16000;
    std::size_t frameSize = 1024;
    std::vector<std::string> participants;

    bool operator==(const SessionHeader&) const = default;
};

/// Frame of float32 little-endian PCM stored in an external blob.
/// `offset` counts samples, not bytes; `path` is relative to the session file.
struct AudioFrameRef {
    Millis startMs = 0;
    std::string path;
    std::uint64_t offset = 0;
    std::size_t count = 0;

    bool operator==(const AudioFrameRef&) const = default;
};

struct Session {
    SessionHeader header;
    std::vector<CueEvent> cues;
    std::vector<AudioFrameRef> audio;
    std::vector<context::TranscriptToken> tokens;

    bool operator==(const Session&) const = default;
};

struct LineError {
    std::size_t line = 0;
    std::string message;

    bool operator==(const LineError&) const = default;
};

struct SessionLoad {
    Session session;
    std::vector<LineError> errors;  // bad body lines; the rest is kept
};

/// First line is {"type":"header",...}; body lines are tagged "cue",
/// "audio_ref" or "token". A malformed header throws FormatError; body
/// violations (including a track's timestamp going backwards) are collected.
SessionLoad load_session(std::istream& in);
SessionLoad load_session(const std::filesystem::path& path);

void write_session(std::ostream& out, const Session& session);

/// Reads every referenced frame. Throws IoError for missing or short blobs.
std::vector<context::AudioFrame> load_audio(const Session& session, const std::filesystem::path& baseDir);

/// Appends samples as float32 LE and returns the ref (offset in samples).
AudioFrameRef append_audio_blob(const std::filesystem::path& blob, const std::string& relPath,
                                const context::AudioFrame& frame);

/// NDJSON of SocialCorpusDoc. All bad lines are reported in one CorpusError
/// whose line() is the first offending line.
std::vector<SocialCorpusDoc> load_corpus(std::istream& in);
std::vector<SocialCorpusDoc> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<SocialCorpusDoc>& docs);

// ---- pseudonymization ----

struct AnonymizeOptions {
    std::string key;  // secret bytes; must be non-empty
    std::set<std::string> payloadDenylist{"face.imageRef", "face.crop", "voice.sampleRef", "device.serial"};
    /// Payload keys whose string value is a person's name.
    std::set<std::string> identityPayloadKeys{"person.name", "speaker.name"};
    /// Extra names to scrub from free text even if no identity field holds them.
    std::vector<std::string> knownNames;
    /// Also replace the single words of multi-word names (>= 3 letters).
    bool replaceNameParts = true;
};

/// Lowercase, non-alphanumeric runs collapsed to one space, trimmed.
std::string normalize_name(std::string_view name);

/// "P-" + first 8 hex digits of HMAC-SHA256(key, normalize_name(name)).
std::string pseudonym(std::string_view key, std::string_view name);

/// True for strings of the form P-xxxxxxxx (lowercase hex).
bool is_pseudonym(std::string_view s);

template <typename T>
struct Anonymized {
    T data;
    std::string mappingDigest;  // HMAC over the sorted name → pseudonym map
    std::size_t namesMapped = 0;
};

Anonymized<std::vector<SocialCorpusDoc>> anonymize(const std::vector<SocialCorpusDoc>& corpus,
                                                   const AnonymizeOptions& options);
Anonymized<Session> anonymize(const Session& session, const AnonymizeOptions& options);
Anonymized<std::vector<QuestionnaireResponse>> anonymize(const std::vector<QuestionnaireResponse>& responses,
                                                        const AnonymizeOptions& options);

// ---- wire protocol v1 ----

inline constexpr int kWireVersion = 1;

struct TranscriptExport {
    std::vector<Utterance> utterances;
    bool operator==(const TranscriptExport&) const = default;
};

struct ControlMessage {
    std::string command;  // e.g. "start", "reply", "end"
    Json args = Json::object();
    bool operator==(const ControlMessage&) const = default;
};

struct ProfileUpdate {
    std::string trackId;
    double similarity = 0.0;
    SocialProfile profile;
    bool operator==(const ProfileUpdate&) const = default;
};

struct AgentUtterance {
    Utterance utterance;
    bool operator==(const AgentUtterance&) const = default;
};

struct ErrorMessage {
    std::string message;
    std::size_t line = 0;
    bool operator==(const ErrorMessage&) const = default;
};

using WireMessage =
    std::variant<SocialContextFrame, TranscriptExport, ControlMessage, ProfileUpdate, AgentUtterance, ErrorMessage>;

/// "context_frame", "transcript", "control", "profile_update", "agent_utterance", "error".
std::string_view wire_type(const WireMessage& m);

/// One line {v, type, payload} without the trailing newline.
std::string wire_encode(const WireMessage& m);

/// ProtocolError for bad JSON, unknown v or type, or a malformed payload.
WireMessage wire_decode(std::string_view line);

}  // namespace sear::dataset
