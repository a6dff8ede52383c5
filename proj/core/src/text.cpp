#include "prismkit/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace prismkit {

namespace {

bool is_lower_tag(const std::string& lang) {
  if (lang.empty()) return false;
  return std::none_of(lang.begin(), lang.end(), [](unsigned char c) {
    return std::isupper(c) != 0;
  });
}

}  // namespace

TokenSequence::TokenSequence(std::vector<std::string> tokens, std::string lang)
    : tokens_(std::move(tokens)), lang_(std::move(lang)) {
  if (!is_lower_tag(lang_)) {
    throw Error("language tag must be a non-empty lowercase string, got \"" +
                lang_ + "\"");
  }
}

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens_[i];
  }
  return out;
}

std::vector<char32_t> decode_utf8(const std::string& text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  const auto fail = [&](std::size_t at) {
    throw Error("invalid UTF-8 at byte " + std::to_string(at));
  };
  while (i < text.size()) {
    const unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      fail(i);
    }
    if (i + len > text.size()) fail(i);
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) fail(i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings, surrogates, and out-of-range scalars.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp > 0x10FFFF) {
      fail(i);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2000: case 0x2001: case 0x2002: case 0x2003: case 0x2004:
    case 0x2005: case 0x2006: case 0x2007: case 0x2008: case 0x2009:
    case 0x200A: case 0x2028: case 0x2029: case 0x202F: case 0x205F:
    case 0x3000:
      return true;
    default:
      return false;
  }
}

TokenSequence tokenize(const std::string& text, TokenizeMode mode,
                       const std::string& lang) {
  const std::vector<char32_t> cps = decode_utf8(text);
  std::vector<std::string> tokens;
  if (mode == TokenizeMode::Whitespace) {
    std::string current;
    for (char32_t cp : cps) {
      if (is_unicode_space(cp)) {
        if (!current.empty()) {
          tokens.push_back(std::move(current));
          current.clear();
        }
      } else {
        current += encode_utf8(cp);
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
  } else {
    for (char32_t cp : cps) {
      if (!is_unicode_space(cp)) tokens.push_back(encode_utf8(cp));
    }
  }
  return TokenSequence(std::move(tokens), lang);
}

NGramBag::NGramBag(int n, std::map<Gram, long> grams)
    : n_(n), grams_(std::move(grams)) {
  if (n_ < 1) throw Error("n-gram order must be >= 1");
  for (const auto& [gram, count] : grams_) {
    if (static_cast<int>(gram.size()) != n_ || count < 1) {
      throw Error("malformed n-gram bag entry");
    }
  }
}

long NGramBag::total() const {
  long t = 0;
  for (const auto& [gram, count] : grams_) t += count;
  return t;
}

NGramBag ngrams(const TokenSequence& seq, int n) {
  if (n < 1) throw Error("n-gram order must be >= 1");
  std::map<NGramBag::Gram, long> grams;
  const auto& toks = seq.tokens();
  if (static_cast<int>(toks.size()) >= n) {
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      NGramBag::Gram g(toks.begin() + i, toks.begin() + i + n);
      ++grams[std::move(g)];
    }
  }
  return NGramBag(n, std::move(grams));
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace prismkit
