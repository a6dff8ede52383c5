#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "prismkit/scoring.hpp"
#include "prismkit/text.hpp"

namespace prismkit {

/// Scalar parameters of the monotone edit channel. All probabilities are
/// strictly inside (0,1); stop_decay may be exactly 1.
struct CopyChannelParams {
  double substitution = 0.05;       // chance a consumed token is replaced
  double insertion = 0.02;          // raw weight of inserting a background token
  double deletion_continue = 0.3;   // geometric continue chance per skipped token
  double stop_base = 0.6;           // stop probability once the input is consumed
  double stop_decay = 0.1;          // stop penalty per unconsumed input token
};

/// Next-step distribution over the model vocabulary plus EOS, aligned with
/// CopyChannelModel::vocab() order.
struct NextTokenDist {
  std::vector<double> token_probs;
  double eos_prob = 0.0;
};

/// A monotone HMM edit channel whose modal output is a copy of its input:
/// generation walks left to right over the input, at each step either stopping
/// (EOS), inserting a background token, or consuming one-or-more input tokens
/// and emitting the last consumed one (possibly corrupted by substitution
/// noise). Scoring sums over all alignment paths with a forward recursion.
///
/// The state is the number of input tokens consumed, s in {0..|x|}. From s:
///   stop:       q(s) = stop_base * stop_decay^(|x|-s)
///   continue:   mass 1-q(s), split over the feasible events
///     insert:     raw weight insertion; emits v ~ background; s unchanged
///     consume-d:  raw weight (1-insertion)*(1-del)*del^(d-1) for s+d <= |x|;
///                 emits x[s+d-1] w.p. 1-substitution, else v ~ background
/// Continue weights are renormalized over the feasible set; at s=|x| the
/// insert event carries all continue mass.
///
/// Immutable after construction; scoring and generation are pure.
class CopyChannelModel : public ConditionalScorer {
 public:
  CopyChannelModel(std::vector<std::string> vocab,
                   std::vector<double> background, CopyChannelParams params);

  /// Vocabulary from the corpus token types; background distribution is
  /// add-1-smoothed corpus unigram counts.
  static CopyChannelModel from_corpus(const std::vector<TokenSequence>& corpus,
                                      CopyChannelParams params = {});

  /// Uniform background over an explicit vocabulary.
  static CopyChannelModel with_uniform_background(
      std::vector<std::string> vocab, CopyChannelParams params = {});

  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<double>& background() const { return background_; }
  const CopyChannelParams& params() const { return params_; }

  /// log P(the output starts with y_prefix), or log P(output == y_prefix)
  /// when terminated, summing over all alignment paths. O(|y| * |x|^2).
  double prefix_log_likelihood(const TokenSequence& x,
                               const TokenSequence& y_prefix,
                               bool terminated) const;

  /// Per-token conditional log probs log p(y_t | y_<t, x) plus the EOS term.
  ForceDecodeResult force_decode(const TokenSequence& input,
                                 const TokenSequence& output) const override;

  /// Distribution of the next emission (or EOS) after y_prefix.
  NextTokenDist next_token_dist(const TokenSequence& x,
                                const TokenSequence& y_prefix) const;

  /// Highest-scoring terminated hypothesis under total sequence log
  /// probability, no length normalization. Score ties break toward the
  /// lexicographically smallest token sequence. Errors if nothing terminates
  /// within max_len tokens.
  TokenSequence beam_search(const TokenSequence& x, int beam_width,
                            int max_len) const;

  std::string to_json() const;
  static CopyChannelModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static CopyChannelModel load(const std::string& path);

 private:
  struct Forward;  // scaled forward state over consumed-count

  int token_index(const std::string& token, const char* side,
                  std::size_t position) const;
  std::vector<int> resolve(const TokenSequence& seq, const char* side) const;

  std::vector<std::string> vocab_;
  std::vector<double> background_;
  CopyChannelParams params_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace prismkit
