#include "prismkit/copy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace prismkit {

namespace {

void check_unit_interval(double v, const char* name, bool allow_one) {
  const bool ok = v > 0.0 && (allow_one ? v <= 1.0 : v < 1.0);
  if (!ok) {
    throw Error(std::string(name) + " must lie strictly inside (0,1" +
                (allow_one ? "]" : ")") + ", got " + std::to_string(v));
  }
}

}  // namespace

CopyChannelModel::CopyChannelModel(std::vector<std::string> vocab,
                                   std::vector<double> background,
                                   CopyChannelParams params)
    : vocab_(std::move(vocab)),
      background_(std::move(background)),
      params_(params) {
  if (vocab_.empty()) throw Error("copy channel vocabulary is empty");
  if (background_.size() != vocab_.size()) {
    throw Error("background distribution size does not match vocabulary");
  }
  check_unit_interval(params_.substitution, "substitution", false);
  check_unit_interval(params_.insertion, "insertion", false);
  check_unit_interval(params_.deletion_continue, "deletion_continue", false);
  check_unit_interval(params_.stop_base, "stop_base", false);
  check_unit_interval(params_.stop_decay, "stop_decay", true);
  double sum = 0.0;
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (background_[i] <= 0.0) {
      throw Error("background probability of \"" + vocab_[i] +
                  "\" must be positive");
    }
    sum += background_[i];
    if (!index_.emplace(vocab_[i], static_cast<int>(i)).second) {
      throw Error("duplicate vocabulary token \"" + vocab_[i] + "\"");
    }
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error("background distribution sums to " + std::to_string(sum) +
                ", expected 1");
  }
}

CopyChannelModel CopyChannelModel::from_corpus(
    const std::vector<TokenSequence>& corpus, CopyChannelParams params) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq.tokens()) {
      ++counts[tok];
      ++total;
    }
  }
  if (counts.empty()) {
    throw Error("cannot build a copy channel from an empty corpus");
  }
  std::vector<std::string> vocab;
  std::vector<double> background;
  vocab.reserve(counts.size());
  background.reserve(counts.size());
  const double denom =
      static_cast<double>(total) + static_cast<double>(counts.size());
  for (const auto& [tok, c] : counts) {
    vocab.push_back(tok);
    background.push_back((static_cast<double>(c) + 1.0) / denom);
  }
  return CopyChannelModel(std::move(vocab), std::move(background), params);
}

CopyChannelModel CopyChannelModel::with_uniform_background(
    std::vector<std::string> vocab, CopyChannelParams params) {
  const double p = 1.0 / static_cast<double>(vocab.size());
  std::vector<double> background(vocab.size(), p);
  return CopyChannelModel(std::move(vocab), std::move(background), params);
}

int CopyChannelModel::token_index(const std::string& token, const char* side,
                                  std::size_t position) const {
  auto it = index_.find(token);
  if (it == index_.end()) {
    throw Error(std::string("out-of-vocabulary token \"") + token +
                "\" on " + side + " side at position " +
                std::to_string(position));
  }
  return it->second;
}

std::vector<int> CopyChannelModel::resolve(const TokenSequence& seq,
                                           const char* side) const {
  std::vector<int> ids;
  ids.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    ids.push_back(token_index(seq.tokens()[i], side, i));
  }
  return ids;
}

// Scaled forward recursion over the consumed-count state. alpha is kept
// normalized; log_norm accumulates the per-step scales, so log_norm after t
// steps is exactly the prefix log likelihood of the first t tokens, and each
// step's log scale is the conditional log prob of that token.
struct CopyChannelModel::Forward {
  const CopyChannelModel* model;
  std::vector<int> x;
  std::vector<double> stop;     // q(s) for s in 0..|x|
  std::vector<double> norm;     // continue-weight normalizer W(s)
  std::vector<double> alpha;    // normalized state distribution
  double log_norm = 0.0;

  Forward(const CopyChannelModel& m, std::vector<int> x_ids)
      : model(&m), x(std::move(x_ids)) {
    const auto& p = model->params_;
    const std::size_t n = x.size();
    stop.resize(n + 1);
    norm.resize(n + 1);
    for (std::size_t s = 0; s <= n; ++s) {
      const double remaining = static_cast<double>(n - s);
      stop[s] = p.stop_base * std::pow(p.stop_decay, remaining);
      const std::size_t feasible = n - s;
      if (feasible == 0) {
        norm[s] = p.insertion;
      } else {
        const double consume_mass =
            (1.0 - p.insertion) *
            (1.0 - std::pow(p.deletion_continue, static_cast<double>(feasible)));
        norm[s] = p.insertion + consume_mass;
      }
    }
    alpha.assign(n + 1, 0.0);
    alpha[0] = 1.0;
  }

  // Probability mass the current state distribution puts on emitting token v
  // next, decomposed into a background coefficient and per-state point mass.
  // Advances alpha by one emission of v and returns log p(v | prefix).
  double step(int v) {
    const auto& p = model->params_;
    const std::size_t n = x.size();
    std::vector<double> next(n + 1, 0.0);
    const double u_v = model->background_[static_cast<std::size_t>(v)];
    for (std::size_t s = 0; s <= n; ++s) {
      if (alpha[s] == 0.0) continue;
      const double cont = alpha[s] * (1.0 - stop[s]) / norm[s];
      next[s] += cont * p.insertion * u_v;
      double consume_w = (1.0 - p.insertion) * (1.0 - p.deletion_continue);
      for (std::size_t d = 1; s + d <= n; ++d) {
        const double match =
            x[s + d - 1] == v ? (1.0 - p.substitution) : 0.0;
        next[s + d] += cont * consume_w * (p.substitution * u_v + match);
        consume_w *= p.deletion_continue;
      }
    }
    double scale = 0.0;
    for (double a : next) scale += a;
    // Every in-vocabulary token keeps positive mass through the insertion
    // event, so scale > 0 here.
    for (double& a : next) a /= scale;
    alpha.swap(next);
    log_norm += std::log(scale);
    return std::log(scale);
  }

  double eos_prob() const {
    double p = 0.0;
    for (std::size_t s = 0; s < alpha.size(); ++s) p += alpha[s] * stop[s];
    return p;
  }
};

double CopyChannelModel::prefix_log_likelihood(const TokenSequence& x,
                                               const TokenSequence& y_prefix,
                                               bool terminated) const {
  Forward fwd(*this, resolve(x, "input"));
  const auto y = resolve(y_prefix, "output");
  for (int v : y) fwd.step(v);
  double ll = fwd.log_norm;
  if (terminated) ll += std::log(fwd.eos_prob());
  return ll;
}

ForceDecodeResult CopyChannelModel::force_decode(
    const TokenSequence& input, const TokenSequence& output) const {
  Forward fwd(*this, resolve(input, "input"));
  const auto y = resolve(output, "output");
  std::vector<double> log_probs;
  log_probs.reserve(y.size() + 1);
  for (int v : y) log_probs.push_back(std::min(fwd.step(v), 0.0));
  log_probs.push_back(std::min(std::log(fwd.eos_prob()), 0.0));
  return ForceDecodeResult(std::move(log_probs));
}

NextTokenDist CopyChannelModel::next_token_dist(
    const TokenSequence& x, const TokenSequence& y_prefix) const {
  Forward fwd(*this, resolve(x, "input"));
  for (int v : resolve(y_prefix, "output")) fwd.step(v);

  const auto& p = params_;
  const std::size_t n = fwd.x.size();
  NextTokenDist dist;
  dist.token_probs.assign(vocab_.size(), 0.0);
  dist.eos_prob = fwd.eos_prob();
  double background_coeff = 0.0;
  for (std::size_t s = 0; s <= n; ++s) {
    if (fwd.alpha[s] == 0.0) continue;
    const double cont = fwd.alpha[s] * (1.0 - fwd.stop[s]) / fwd.norm[s];
    double consume_total = 0.0;
    double consume_w = (1.0 - p.insertion) * (1.0 - p.deletion_continue);
    for (std::size_t d = 1; s + d <= n; ++d) {
      consume_total += consume_w;
      dist.token_probs[static_cast<std::size_t>(fwd.x[s + d - 1])] +=
          cont * consume_w * (1.0 - p.substitution);
      consume_w *= p.deletion_continue;
    }
    background_coeff += cont * (p.insertion + p.substitution * consume_total);
  }
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    dist.token_probs[i] += background_coeff * background_[i];
  }
  return dist;
}

TokenSequence CopyChannelModel::beam_search(const TokenSequence& x,
                                            int beam_width,
                                            int max_len) const {
  if (beam_width < 1) throw Error("beam width must be >= 1");
  if (max_len < 0) throw Error("max_len must be >= 0");

  struct Hyp {
    std::vector<int> tokens;
    std::vector<double> alpha;
    double log_prob = 0.0;
  };
  const auto lex_less = [&](const std::vector<int>& a,
                            const std::vector<int>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [&](int l, int r) { return vocab_[l] < vocab_[r]; });
  };

  const Forward init(*this, resolve(x, "input"));
  std::vector<Hyp> live;
  live.push_back(Hyp{{}, init.alpha, 0.0});

  bool have_best = false;
  double best_score = 0.0;
  std::vector<int> best_tokens;
  const auto offer_terminated = [&](const std::vector<int>& tokens,
                                    double score) {
    if (!have_best || score > best_score ||
        (score == best_score && lex_less(tokens, best_tokens))) {
      have_best = true;
      best_score = score;
      best_tokens = tokens;
    }
  };

  for (int len = 0; len <= max_len && !live.empty(); ++len) {
    struct Cand {
      std::size_t parent;
      int token;
      double score;
    };
    std::vector<Cand> cands;
    for (std::size_t h = 0; h < live.size(); ++h) {
      Forward fwd(*this, init.x);
      fwd.alpha = live[h].alpha;
      const NextTokenDist dist = next_token_dist_from(fwd);
      offer_terminated(live[h].tokens,
                       live[h].log_prob + std::log(dist.eos_prob));
      if (len == max_len) continue;  // no room to extend further
      for (std::size_t v = 0; v < dist.token_probs.size(); ++v) {
        if (dist.token_probs[v] <= 0.0) continue;
        cands.push_back(Cand{h, static_cast<int>(v),
                             live[h].log_prob + std::log(dist.token_probs[v])});
      }
    }
    if (len == max_len) break;
    std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
      if (a.score != b.score) return a.score > b.score;
      std::vector<int> ta = live[a.parent].tokens;
      ta.push_back(a.token);
      std::vector<int> tb = live[b.parent].tokens;
      tb.push_back(b.token);
      return lex_less(ta, tb);
    });
    if (cands.size() > static_cast<std::size_t>(beam_width)) {
      cands.resize(static_cast<std::size_t>(beam_width));
    }
    // Once the best live score cannot beat the best terminated hypothesis,
    // no extension ever will (per-step log probs are <= 0).
    if (have_best && (cands.empty() || cands.front().score <= best_score)) {
      break;
    }
    std::vector<Hyp> next;
    next.reserve(cands.size());
    for (const Cand& c : cands) {
      Hyp h;
      h.tokens = live[c.parent].tokens;
      h.tokens.push_back(c.token);
      Forward fwd(*this, init.x);
      fwd.alpha = live[c.parent].alpha;
      fwd.step(c.token);
      h.alpha = std::move(fwd.alpha);
      h.log_prob = c.score;
      next.push_back(std::move(h));
    }
    live.swap(next);
  }

  if (!have_best) {
    throw Error("beam search found no terminated hypothesis within max_len=" +
                std::to_string(max_len));
  }
  std::vector<std::string> tokens;
  tokens.reserve(best_tokens.size());
  for (int v : best_tokens) tokens.push_back(vocab_[static_cast<std::size_t>(v)]);
  return TokenSequence(std::move(tokens), x.lang());
}

std::string CopyChannelModel::to_json() const {
  nlohmann::ordered_json j;
  j["vocab"] = vocab_;
  nlohmann::ordered_json bg;
  for (std::size_t i = 0; i < vocab_.size(); ++i) bg[vocab_[i]] = background_[i];
  j["background"] = std::move(bg);
  j["substitution"] = params_.substitution;
  j["insertion"] = params_.insertion;
  j["deletion_continue"] = params_.deletion_continue;
  j["stop_base"] = params_.stop_base;
  j["stop_decay"] = params_.stop_decay;
  return j.dump(2) + "\n";
}

CopyChannelModel CopyChannelModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("cannot parse copy channel model: ") + e.what());
  }
  try {
    std::vector<std::string> vocab = j.at("vocab").get<std::vector<std::string>>();
    const auto& bg = j.at("background");
    std::vector<double> background;
    background.reserve(vocab.size());
    for (const auto& tok : vocab) background.push_back(bg.at(tok).get<double>());
    CopyChannelParams params;
    params.substitution = j.at("substitution").get<double>();
    params.insertion = j.at("insertion").get<double>();
    params.deletion_continue = j.at("deletion_continue").get<double>();
    params.stop_base = j.at("stop_base").get<double>();
    params.stop_decay = j.at("stop_decay").get<double>();
    return CopyChannelModel(std::move(vocab), std::move(background), params);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed copy channel model document: ") +
                e.what());
  }
}

void CopyChannelModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path);
  out << to_json();
  if (!out) throw Error("failed writing model file: " + path);
}

CopyChannelModel CopyChannelModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace prismkit
