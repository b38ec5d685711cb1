#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scfgt::text {

/// Decodes UTF-8 to codepoints. Invalid byte sequences decode to U+FFFD,
/// one replacement per bad byte.
std::vector<char32_t> decode_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

/// True for codepoints that take no inter-token spacing when detokenizing:
/// Han (including extensions), kana, CJK symbols and punctuation,
/// compatibility ideographs, and halfwidth/fullwidth forms.
bool is_cjk(char32_t cp);

/// Canonical composition (NFC).
std::string nfc(std::string_view s);

std::string trim(std::string_view s);

/// Trims and collapses internal whitespace runs to single spaces.
std::string collapse_ws(std::string_view s);

/// Identity key for questions, patterns and queries:
/// NFC, then trim, then collapse internal whitespace. No case folding.
std::string pattern_key(std::string_view s);

std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& tokens, std::string_view sep);

}  // namespace scfgt::text
