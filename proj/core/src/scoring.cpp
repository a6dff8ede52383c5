#include "prismkit/scoring.hpp"

#include <cmath>

namespace prismkit {

ForceDecodeResult::ForceDecodeResult(std::vector<double> token_log_probs)
    : log_probs_(std::move(token_log_probs)) {
  if (log_probs_.empty()) {
    throw Error("force-decode result needs at least the EOS entry");
  }
  for (std::size_t i = 0; i < log_probs_.size(); ++i) {
    const double lp = log_probs_[i];
    if (!std::isfinite(lp) || lp > 0.0) {
      throw Error("log probability at position " + std::to_string(i) +
                  " must be finite and <= 0, got " + std::to_string(lp));
    }
  }
}

ForceDecodeResult force_decode(const ConditionalScorer& scorer,
                               const TokenSequence& input,
                               const TokenSequence& output,
                               const std::string& target_lang) {
  if (target_lang != output.lang()) {
    throw Error("target language tag \"" + target_lang +
                "\" does not match output language \"" + output.lang() + "\"");
  }
  return scorer.force_decode(input, output);
}

double seq_log_prob(const ForceDecodeResult& r) {
  double sum = 0.0;
  for (double lp : r.token_log_probs()) sum += lp;
  return sum;
}

double avg_log_prob(const ForceDecodeResult& r) {
  return seq_log_prob(r) / static_cast<double>(r.output_len());
}

double prism_ref(const ConditionalScorer& scorer, const TokenSequence& sys,
                 const TokenSequence& ref) {
  if (sys.lang() != ref.lang()) {
    throw Error("prism_ref requires sys.lang == ref.lang, got \"" +
                sys.lang() + "\" vs \"" + ref.lang() + "\"");
  }
  const double fwd = avg_log_prob(force_decode(scorer, ref, sys, sys.lang()));
  const double rev = avg_log_prob(force_decode(scorer, sys, ref, ref.lang()));
  return 0.5 * fwd + 0.5 * rev;
}

double prism_src(const ConditionalScorer& scorer, const TokenSequence& sys,
                 const TokenSequence& src) {
  return avg_log_prob(force_decode(scorer, src, sys, sys.lang()));
}

double combine_directional(double w, double fwd, double rev) {
  if (w < 0.0 || w > 1.0) throw Error("direction weight must be in [0,1]");
  return w * fwd + (1.0 - w) * rev;
}

double lm_score(const ConditionalScorer& lm, const TokenSequence& sys) {
  const TokenSequence empty_input({}, sys.lang());
  return avg_log_prob(lm.force_decode(empty_input, sys));
}

double system_score(const std::vector<SegmentScore>& segment_scores) {
  if (segment_scores.empty()) {
    throw Error("system_score needs at least one segment score");
  }
  double sum = 0.0;
  for (const auto& s : segment_scores) sum += s.value;
  return sum / static_cast<double>(segment_scores.size());
}

}  // namespace prismkit
