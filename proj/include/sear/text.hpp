#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sear::text {

/// Lowercases ASCII letters; other bytes pass through unchanged.
std::string to_lower(std::string_view s);

/// Trims and collapses runs of whitespace to a single space.
std::string normalize_whitespace(std::string_view s);

/// Lowercased tokens, split on ASCII non-alphanumerics. Bytes >= 0x80 are
/// kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view s);

/// True if the token sequence of `phrase` occurs contiguously in the token
/// sequence of `haystack`. An empty phrase never matches.
bool contains_phrase(std::string_view haystack, std::string_view phrase);
bool contains_phrase(const std::vector<std::string>& haystack_tokens, std::string_view phrase);

/// Jaccard similarity of the token sets of two strings; two empty sets give 1.
double token_jaccard(std::string_view a, std::string_view b);

/// FNV-1a, 64-bit.
std::uint64_t hash64(std::string_view s);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

/// Rounds to 9 significant decimal digits. All writers pass reals through
/// this so on-disk output is stable and short.
double round9(double v);

/// Joins with a separator.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Prefix of at most `n` UTF-8 code points.
std::string utf8_prefix(std::string_view s, std::size_t n);

}  // namespace sear::text
