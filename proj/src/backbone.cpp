#include "mixreason/backbone.hpp"

#include <cmath>
#include <optional>

#include "mixreason/errors.hpp"
#include "mixreason/rng.hpp"

namespace mixreason {

double score_with_sessions(const Seq2SeqModel& model, std::span<const TokenId> src, std::span<const TokenId> tgt) {
  auto session = model.start(src);
  DecoderState state = session->initial();
  double total = 0.0;
  for (std::size_t t = 1; t < tgt.size(); ++t) {
    total += state.log_probs.at(static_cast<std::size_t>(tgt[t]));
    if (t + 1 < tgt.size()) state = session->advance(state, tgt[t]);
  }
  return total;
}

void BackboneConfig::validate() const {
  if (embed_dim < 2 || hidden_dim < 2 || attention_dim < 2) throw BadConfig("model dimensions must be >= 2");
  if (encoder_layers < 1 || decoder_layers < 1) throw BadConfig("layer counts must be >= 1");
  if (max_target_len < 2) throw BadConfig("max_target_len must be >= 2");
}

namespace detail {

// Per-tape parameter leaves, created on first use so each parameter is a
// single node and its gradient accumulates in one place.
class Leaves {
 public:
  Leaves(Tape& tape, std::span<const Tensor> params, bool trainable)
      : tape_(tape), params_(params), trainable_(trainable), cache_(params.size()) {}

  Var operator()(std::size_t i) {
    if (!cache_[i]) {
      cache_[i] = trainable_ ? tape_.parameter(params_[i], i) : tape_.constant_ref(params_[i]);
    }
    return *cache_[i];
  }

  Tape& tape() { return tape_; }

 private:
  Tape& tape_;
  std::span<const Tensor> params_;
  bool trainable_;
  std::vector<std::optional<Var>> cache_;
};

template <typename Layer>
Var gru_cell(Leaves& P, const Layer& L, Var x, Var h) {
  Var z = sigmoid(add(add(matmul(x, P(L.wz)), matmul(h, P(L.uz))), P(L.bz)));
  Var r = sigmoid(add(add(matmul(x, P(L.wr)), matmul(h, P(L.ur))), P(L.br)));
  Var n = tanh(add(add(matmul(x, P(L.wn)), matmul(mul(r, h), P(L.un))), P(L.bn)));
  return add(n, mul(z, sub(h, n)));
}

}  // namespace detail

using detail::Leaves;

std::size_t BackboneModel::add_param(std::string name, std::size_t rows, std::size_t cols) {
  params_.emplace_back(rows, cols);
  names_.push_back(std::move(name));
  return params_.size() - 1;
}

BackboneModel::BackboneModel(BackboneConfig config, Vocab vocab) : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  if (vocab_.size() == 0) throw BadConfig("model needs a vocabulary");
  const std::size_t V = vocab_.size();
  const std::size_t E = config_.embed_dim;
  const std::size_t H = config_.hidden_dim;
  const std::size_t A = config_.attention_dim;

  embed_ = add_param("embed", V, E);
  auto make_layer = [&](const std::string& prefix, std::size_t in) {
    Layer L{};
    L.wz = add_param(prefix + ".wz", in, H);
    L.wr = add_param(prefix + ".wr", in, H);
    L.wn = add_param(prefix + ".wn", in, H);
    L.uz = add_param(prefix + ".uz", H, H);
    L.ur = add_param(prefix + ".ur", H, H);
    L.un = add_param(prefix + ".un", H, H);
    L.bz = add_param(prefix + ".bz", 1, H);
    L.br = add_param(prefix + ".br", 1, H);
    L.bn = add_param(prefix + ".bn", 1, H);
    return L;
  };
  for (std::size_t l = 0; l < config_.encoder_layers; ++l) {
    encoder_.push_back(make_layer("encoder." + std::to_string(l), l == 0 ? E : H));
  }
  for (std::size_t l = 0; l < config_.decoder_layers; ++l) {
    decoder_.push_back(make_layer("decoder." + std::to_string(l), l == 0 ? E + H : H));
  }
  att_enc_ = add_param("attention.enc", H, A);
  att_dec_ = add_param("attention.dec", H, A);
  att_v_ = add_param("attention.v", A, 1);
  out_w_ = add_param("output.w", 2 * H, V);
  out_b_ = add_param("output.b", 1, V);

  Rng rng(config_.seed);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i == out_b_) continue;
    for (double& v : params_[i].values()) v = rng.uniform(-0.08, 0.08);
  }
}

std::size_t BackboneModel::parameter_index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw BadConfig("no parameter named '" + name + "'");
}

void BackboneModel::check_target(std::span<const TokenId> tgt) const {
  if (tgt.size() < 2 || tgt.front() != Vocab::kBos || tgt.back() != Vocab::kEos) {
    throw BadTarget("target must start with BOS and end with EOS");
  }
  if (tgt.size() > config_.max_target_len) throw BadTarget("target longer than max_target_len");
  for (TokenId id : tgt) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) throw BadTarget("target id out of range");
  }
}

namespace detail {

struct Encoded {
  Var states;                 // S x H, top layer
  Var keys;                   // S x A
  std::vector<Var> final_h;   // one 1 x H per encoder layer
};

// Shared forward pieces, so the step-wise session and the teacher-forced
// path run the exact same operation sequence.
struct BackboneForward {
  const BackboneModel& m;
  Leaves& P;

  Encoded encode(std::span<const TokenId> src) {
    if (src.empty()) throw BadConfig("empty source sequence");
    Tape& t = P.tape();
    const std::size_t H = m.config_.hidden_dim;
    std::vector<Var> h(m.encoder_.size(), t.constant(Tensor(1, H)));
    std::vector<Var> tops;
    for (TokenId id : src) {
      const std::int32_t ids[1] = {id};
      Var x = embedding_lookup(P(m.embed_), ids);
      for (std::size_t l = 0; l < m.encoder_.size(); ++l) {
        h[l] = gru_cell(P, m.encoder_[l], x, h[l]);
        x = h[l];
      }
      tops.push_back(x);
    }
    Var states = concat(tops, 0);
    Var keys = matmul(states, P(m.att_enc_));
    return Encoded{states, keys, h};
  }

  std::vector<Var> initial_hidden(const Encoded& enc) {
    std::vector<Var> h;
    for (std::size_t l = 0; l < m.decoder_.size(); ++l) {
      h.push_back(enc.final_h[std::min(l, enc.final_h.size() - 1)]);
    }
    return h;
  }

  // Consumes `token`, updates `h` in place, returns [h_top; context].
  Var step(Var states, Var keys, std::vector<Var>& h, TokenId token) {
    Var q = matmul(h.back(), P(m.att_dec_));
    Var energy = matmul(tanh(add(keys, q)), P(m.att_v_));
    Var alpha = row_softmax(transpose(energy));
    Var ctx = matmul(alpha, states);
    const std::int32_t ids[1] = {token};
    const Var parts[2] = {embedding_lookup(P(m.embed_), ids), ctx};
    Var x = concat(parts, 1);
    for (std::size_t l = 0; l < m.decoder_.size(); ++l) {
      h[l] = gru_cell(P, m.decoder_[l], x, h[l]);
      x = h[l];
    }
    const Var feat[2] = {h.back(), ctx};
    return concat(feat, 1);
  }

  Var logits(Var features) { return add(matmul(features, P(m.out_w_)), P(m.out_b_)); }
};

}  // namespace detail

using detail::BackboneForward;
using detail::Encoded;

class BackboneSession : public DecodeSession {
 public:
  BackboneSession(const BackboneModel& model, std::span<const TokenId> src) : model_(model) {
    Tape tape;
    Leaves P(tape, model_.params_, false);
    BackboneForward f{model_, P};
    Encoded enc = f.encode(src);
    states_ = enc.states.value();
    keys_ = enc.keys.value();
    for (Var v : f.initial_hidden(enc)) {
      auto vals = v.value().values();
      start_.insert(start_.end(), vals.begin(), vals.end());
    }
  }

  DecoderState initial() const override {
    DecoderState raw{start_, {}};
    return advance(raw, Vocab::kBos);
  }

  DecoderState advance(const DecoderState& state, TokenId token) const override {
    const std::size_t H = model_.config_.hidden_dim;
    Tape tape;
    Leaves P(tape, model_.params_, false);
    BackboneForward f{model_, P};
    std::vector<Var> h;
    for (std::size_t l = 0; l < model_.decoder_.size(); ++l) {
      h.push_back(tape.constant(Tensor(1, H, std::vector<double>(state.memory.begin() + l * H,
                                                                   state.memory.begin() + (l + 1) * H))));
    }
    Var feat = f.step(tape.constant_ref(states_), tape.constant_ref(keys_), h, token);
    Tensor lp = log_softmax_rows(f.logits(feat).value());
    DecoderState next;
    for (Var v : h) {
      auto vals = v.value().values();
      next.memory.insert(next.memory.end(), vals.begin(), vals.end());
    }
    auto vals = lp.values();
    next.log_probs.assign(vals.begin(), vals.end());
    return next;
  }

 private:
  const BackboneModel& model_;
  Tensor states_;
  Tensor keys_;
  std::vector<double> start_;
};

std::unique_ptr<DecodeSession> BackboneModel::start(std::span<const TokenId> src) const {
  return std::make_unique<BackboneSession>(*this, src);
}

Var BackboneModel::sequence_loss(Tape& tape, std::span<const TokenId> src, std::span<const TokenId> tgt) const {
  check_target(tgt);
  Leaves P(tape, params_, true);
  BackboneForward f{*this, P};
  Encoded enc = f.encode(src);
  std::vector<Var> h = f.initial_hidden(enc);
  std::vector<Var> feats;
  for (std::size_t t = 0; t + 1 < tgt.size(); ++t) feats.push_back(f.step(enc.states, enc.keys, h, tgt[t]));
  Var logits = f.logits(concat(feats, 0));
  return cross_entropy(logits, tgt.subspan(1));
}

double BackboneModel::sequence_log_prob(std::span<const TokenId> src, std::span<const TokenId> tgt) const {
  check_target(tgt);
  Tape tape;
  Leaves P(tape, params_, false);
  BackboneForward f{*this, P};
  Encoded enc = f.encode(src);
  std::vector<Var> h = f.initial_hidden(enc);
  std::vector<Var> feats;
  for (std::size_t t = 0; t + 1 < tgt.size(); ++t) feats.push_back(f.step(enc.states, enc.keys, h, tgt[t]));
  Var logits = f.logits(concat(feats, 0));
  return -cross_entropy(logits, tgt.subspan(1)).value()[0];
}

std::vector<double> BackboneModel::sequence_log_probs(std::span<const TokenId> src,
                                                      std::span<const TokenIds> tgts) const {
  for (const auto& tgt : tgts) check_target(tgt);
  Tape tape;
  Leaves P(tape, params_, false);
  BackboneForward f{*this, P};
  Encoded enc = f.encode(src);
  std::vector<double> out;
  out.reserve(tgts.size());
  for (const auto& tgt : tgts) {
    std::vector<Var> h = f.initial_hidden(enc);
    std::vector<Var> feats;
    for (std::size_t t = 0; t + 1 < tgt.size(); ++t) feats.push_back(f.step(enc.states, enc.keys, h, tgt[t]));
    Var logits = f.logits(concat(feats, 0));
    out.push_back(-cross_entropy(logits, std::span<const TokenId>(tgt).subspan(1)).value()[0]);
  }
  return out;
}

std::pair<double, Gradients> BackboneModel::sequence_log_prob_grad(std::span<const TokenId> src,
                                                                   std::span<const TokenId> tgt) const {
  Tape tape;
  Var loss = sequence_loss(tape, src, tgt);
  Var lp = scale(loss, -1.0);
  Gradients g = tape.backward(lp);
  return {lp.value()[0], std::move(g)};
}

std::vector<double> BackboneModel::embed_text(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw EmptyText("cannot embed empty text");
  const Tensor& E = params_[embed_];
  std::vector<double> out(E.cols(), 0.0);
  for (const auto& tok : tokens) {
    auto row = E.row_span(static_cast<std::size_t>(vocab_.id(tok)));
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[c];
  }
  for (double& v : out) v /= static_cast<double>(tokens.size());
  return out;
}

void BackboneModel::round_to_storage_precision() {
  for (Tensor& p : params_) {
    for (double& v : p.values()) v = static_cast<double>(static_cast<float>(v));
  }
}

bool BackboneModel::all_finite() const {
  for (const Tensor& p : params_) {
    if (!p.all_finite()) return false;
  }
  return true;
}

double mixture_log_prob(const BackboneModel& model, std::span<const std::string> x, Relation r,
                        std::span<const std::string> z) {
  const Vocab& vocab = model.vocab();
  const TokenIds tgt = encode_target(z, vocab);
  std::vector<double> comps;
  for (std::size_t k = 0; k < vocab.latents(); ++k) {
    comps.push_back(model.sequence_log_prob(encode_source(x, r, k, vocab), tgt));
  }
  return log_sum_exp(comps) - std::log(static_cast<double>(vocab.latents()));
}

}  // namespace mixreason
