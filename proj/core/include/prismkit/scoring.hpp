#pragma once

#include <string>
#include <vector>

#include "prismkit/text.hpp"

namespace prismkit {

/// Per-token natural-log probabilities of an output sequence given an input,
/// one entry per output token plus a final entry for EOS. All entries are
/// finite and <= 0.
class ForceDecodeResult {
 public:
  explicit ForceDecodeResult(std::vector<double> token_log_probs);

  const std::vector<double>& token_log_probs() const { return log_probs_; }
  /// Output length including the EOS position.
  std::size_t output_len() const { return log_probs_.size(); }

 private:
  std::vector<double> log_probs_;
};

/// A conditional sequence scorer: assigns log p(y_t | y_<t, x) to every token
/// of a fixed output, plus EOS. Implementations must be deterministic and
/// safely shareable for concurrent read-only scoring after construction.
class ConditionalScorer {
 public:
  virtual ~ConditionalScorer() = default;

  /// Scores `output` conditioned on `input`. An empty output scores EOS only.
  virtual ForceDecodeResult force_decode(const TokenSequence& input,
                                         const TokenSequence& output) const = 0;
};

struct SegmentScore {
  std::string seg_id;
  std::string system;
  double value = 0.0;
};

/// Scores `output` given `input` through `scorer`, conditioning on the target
/// language tag. The tag is a conditioning symbol only and is never scored;
/// `target_lang` must equal output.lang().
ForceDecodeResult force_decode(const ConditionalScorer& scorer,
                               const TokenSequence& input,
                               const TokenSequence& output,
                               const std::string& target_lang);

/// Sequence-level log probability: the sum of all entries.
double seq_log_prob(const ForceDecodeResult& r);

/// Average token-level log probability: sum / output_len (EOS included).
double avg_log_prob(const ForceDecodeResult& r);

/// Reference-based metric: the mean of the two directional average log
/// probabilities, 0.5*avg(sys|ref) + 0.5*avg(ref|sys). Requires matching
/// language tags.
double prism_ref(const ConditionalScorer& scorer, const TokenSequence& sys,
                 const TokenSequence& ref);

/// Source-based quality-estimation metric: avg(sys|src).
double prism_src(const ConditionalScorer& scorer, const TokenSequence& sys,
                 const TokenSequence& src);

/// w*fwd + (1-w)*rev with w in [0,1].
double combine_directional(double w, double fwd, double rev);

/// Fluency score: average log probability of sys under an unconditional
/// scorer (empty input).
double lm_score(const ConditionalScorer& lm, const TokenSequence& sys);

/// Arithmetic mean of segment scores for one system. Errors on empty input.
double system_score(const std::vector<SegmentScore>& segment_scores);

}  // namespace prismkit
