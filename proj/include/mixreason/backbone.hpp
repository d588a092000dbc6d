#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mixreason/autodiff.hpp"
#include "mixreason/seq2seq.hpp"
#include "mixreason/tensor.hpp"
#include "mixreason/text.hpp"

namespace mixreason {

namespace detail {
struct BackboneForward;
}

struct BackboneConfig {
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 48;
  std::size_t attention_dim = 32;
  std::size_t encoder_layers = 1;
  std::size_t decoder_layers = 1;
  // Upper bound on encoded target length, BOS and EOS included.
  std::size_t max_target_len = 16;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const BackboneConfig&, const BackboneConfig&) = default;
};

// GRU encoder, GRU decoder with additive attention over encoder states, and
// an untied output projection over [decoder state; context].
class BackboneModel : public Seq2SeqModel {
 public:
  BackboneModel(BackboneConfig config, Vocab vocab);

  const BackboneConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }

  std::size_t vocab_size() const override { return vocab_.size(); }
  std::unique_ptr<DecodeSession> start(std::span<const TokenId> src) const override;

  std::span<Tensor> parameters() { return params_; }
  std::span<const Tensor> parameters() const { return params_; }
  const std::vector<std::string>& parameter_names() const { return names_; }
  std::size_t parameter_index(const std::string& name) const;

  // Sum of log Pr(tgt_t | tgt_<t, src) over t >= 1. Throws BadTarget unless
  // tgt is BOS ... EOS and no longer than max_target_len.
  double sequence_log_prob(std::span<const TokenId> src, std::span<const TokenId> tgt) const;

  // Same values as calling sequence_log_prob per target, bit for bit; the
  // source is encoded once.
  std::vector<double> sequence_log_probs(std::span<const TokenId> src, std::span<const TokenIds> tgts) const;

  // Records the negative log-likelihood of tgt on `tape` with trainable leaves.
  Var sequence_loss(Tape& tape, std::span<const TokenId> src, std::span<const TokenId> tgt) const;

  // log Pr(tgt | src) together with its gradient w.r.t. every parameter.
  std::pair<double, Gradients> sequence_log_prob_grad(std::span<const TokenId> src,
                                                      std::span<const TokenId> tgt) const;

  // Mean of input-embedding rows; throws EmptyText for no tokens.
  std::vector<double> embed_text(std::span<const std::string> tokens) const;

  // Rounds every parameter to the nearest float, the checkpoint storage type.
  void round_to_storage_precision();

  bool all_finite() const;

 private:
  friend class BackboneSession;
  friend struct detail::BackboneForward;
  struct Layer {
    std::size_t wz, wr, wn, uz, ur, un, bz, br, bn;
  };

  std::size_t add_param(std::string name, std::size_t rows, std::size_t cols);
  void check_target(std::span<const TokenId> tgt) const;

  BackboneConfig config_;
  Vocab vocab_;
  std::vector<Tensor> params_;
  std::vector<std::string> names_;

  std::size_t embed_ = 0;
  std::vector<Layer> encoder_;
  std::vector<Layer> decoder_;
  std::size_t att_enc_ = 0, att_dec_ = 0, att_v_ = 0;
  std::size_t out_w_ = 0, out_b_ = 0;
};

// log[(1/K) sum_k exp(log Pr(z | h_k, x, r))] with K = vocab latents.
double mixture_log_prob(const BackboneModel& model, std::span<const std::string> x, Relation r,
                        std::span<const std::string> z);

}  // namespace mixreason
