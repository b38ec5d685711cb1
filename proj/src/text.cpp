#include "scfgt/text.hpp"

#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

#include <cctype>
#include <stdexcept>

namespace scfgt::text {

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    int extra = 0;
    if (b < 0x80) {
      cp = b;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F;
      extra = 1;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F;
      extra = 2;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + extra >= s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      unsigned char c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok || cp > 0x10FFFF) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x2E80 && cp <= 0x9FFF) ||    // radicals .. unified ideographs
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0xFE30 && cp <= 0xFE4F) ||    // compatibility forms
         (cp >= 0xFF00 && cp <= 0xFFEF) ||    // halfwidth and fullwidth
         (cp >= 0x20000 && cp <= 0x3FFFF);    // ideograph extensions
}

std::string nfc(std::string_view s) {
  if (s.empty()) return std::string();
  UErrorCode ec = U_ZERO_ERROR;
  const UNormalizer2* n2 = unorm2_getNFCInstance(&ec);
  if (U_FAILURE(ec)) throw std::runtime_error("unicode normalizer unavailable");

  std::vector<UChar> u16(s.size() + 1);
  int32_t u16len = 0;
  ec = U_ZERO_ERROR;
  u_strFromUTF8(u16.data(), static_cast<int32_t>(u16.size()), &u16len,
                s.data(), static_cast<int32_t>(s.size()), &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR || ec == U_STRING_NOT_TERMINATED_WARNING) {
    u16.resize(static_cast<std::size_t>(u16len) + 1);
    ec = U_ZERO_ERROR;
    u_strFromUTF8(u16.data(), static_cast<int32_t>(u16.size()), &u16len,
                  s.data(), static_cast<int32_t>(s.size()), &ec);
  }
  if (U_FAILURE(ec)) {
    // Not valid UTF-8; leave the bytes alone rather than corrupt them.
    return std::string(s);
  }

  std::vector<UChar> norm(u16.size() * 2 + 16);
  ec = U_ZERO_ERROR;
  int32_t nlen = unorm2_normalize(n2, u16.data(), u16len, norm.data(),
                                  static_cast<int32_t>(norm.size()), &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    norm.resize(static_cast<std::size_t>(nlen) + 1);
    ec = U_ZERO_ERROR;
    nlen = unorm2_normalize(n2, u16.data(), u16len, norm.data(),
                            static_cast<int32_t>(norm.size()), &ec);
  }
  if (U_FAILURE(ec)) return std::string(s);

  std::string out(static_cast<std::size_t>(nlen) * 4 + 4, '\0');
  int32_t outlen = 0;
  ec = U_ZERO_ERROR;
  u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &outlen,
              norm.data(), nlen, &ec);
  if (U_FAILURE(ec)) return std::string(s);
  out.resize(static_cast<std::size_t>(outlen));
  return out;
}

static bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool inRun = false;
  for (char c : s) {
    if (is_ws(c)) {
      inRun = true;
      continue;
    }
    if (inRun && !out.empty()) out.push_back(' ');
    inRun = false;
    out.push_back(c);
  }
  return out;
}

std::string pattern_key(std::string_view s) { return collapse_ws(nfc(s)); }

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ws(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_ws(s[i])) ++i;
    if (i > b) out.emplace_back(s.substr(b, i - b));
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

}  // namespace scfgt::text
