#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace prismkit {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A tokenized segment plus its language tag. No implicit EOS; scoring code
/// appends EOS itself. Immutable after construction.
class TokenSequence {
 public:
  TokenSequence(std::vector<std::string> tokens, std::string lang);

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& lang() const { return lang_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  /// Tokens joined by single spaces.
  std::string joined() const;

 private:
  std::vector<std::string> tokens_;
  std::string lang_;
};

enum class TokenizeMode { Whitespace, Character };

/// Whitespace mode splits on runs of Unicode whitespace; character mode yields
/// one token per Unicode scalar value, whitespace excluded. Throws Error on
/// invalid UTF-8.
TokenSequence tokenize(const std::string& text, TokenizeMode mode,
                       const std::string& lang);

/// A multiset of n-token grams with counts.
class NGramBag {
 public:
  using Gram = std::vector<std::string>;

  NGramBag(int n, std::map<Gram, long> grams);

  int order() const { return n_; }
  const std::map<Gram, long>& grams() const { return grams_; }
  long total() const;

 private:
  int n_;
  std::map<Gram, long> grams_;
};

/// All n-grams of seq with multiplicities; max(0, len-n+1) grams. n >= 1.
NGramBag ngrams(const TokenSequence& seq, int n);

// UTF-8 utilities shared by the tokenizers and chrF.
std::vector<char32_t> decode_utf8(const std::string& text);
std::string encode_utf8(char32_t cp);
bool is_unicode_space(char32_t cp);

/// Reads a UTF-8 segment file: one segment per line, LF line endings, no
/// header. A trailing CR on a line is stripped.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace prismkit
