#pragma once

// Stub models and slow reference implementations used as test oracles.

#include <cstdint>
#include <functional>
#include <span>
#include <map>
#include <string>
#include <vector>

#include "mixreason/assignment.hpp"
#include "mixreason/backbone.hpp"
#include "mixreason/beam_search.hpp"
#include "mixreason/reasoning.hpp"
#include "mixreason/seq2seq.hpp"
#include "mixreason/text.hpp"

namespace oracle {

using mixreason::TokenId;
using mixreason::TokenIds;

// Next-token probabilities looked up by decoded prefix (BOS excluded); the
// source is ignored. Prefixes missing from the table put all mass on EOS.
class TableModel : public mixreason::Seq2SeqModel {
 public:
  TableModel(std::size_t vocab_size, std::map<TokenIds, std::map<TokenId, double>> probs);
  std::size_t vocab_size() const override { return vocab_size_; }
  std::unique_ptr<mixreason::DecodeSession> start(std::span<const TokenId> src) const override;
  std::vector<double> log_probs(const TokenIds& prefix) const;

 private:
  std::size_t vocab_size_;
  std::map<TokenIds, std::map<TokenId, double>> probs_;
};

// Distributions derived from a hash of (source, prefix). Only EOS and
// corpus words get mass. After the first word EOS takes `eos_after_word` of
// the mass, and first-word logits stay within a narrow band, so the top few
// hypotheses are single words and beam search finds them exactly.
class HashModel : public mixreason::Seq2SeqModel {
 public:
  HashModel(const mixreason::Vocab& vocab, std::uint64_t seed, double eos_after_word = 0.9);
  std::size_t vocab_size() const override { return vocab_.size(); }
  std::unique_ptr<mixreason::DecodeSession> start(std::span<const TokenId> src) const override;
  std::vector<double> log_probs(const TokenIds& src, const TokenIds& prefix) const;

 private:
  mixreason::Vocab vocab_;
  std::uint64_t seed_;
  double eos_after_word_;
};

// Every hypothesis beam search could return: EOS-terminated sequences up to
// max_len tokens plus unterminated ones of exactly max_len, finite only.
std::vector<mixreason::Hypothesis> enumerate_hypotheses(const mixreason::Seq2SeqModel& model,
                                                        std::span<const TokenId> src, std::size_t max_len);
std::vector<mixreason::Hypothesis> exhaustive_top_k(const mixreason::Seq2SeqModel& model,
                                                    std::span<const TokenId> src, std::size_t k, std::size_t max_len);

// generate_hop with the beam replaced by exhaustive top-k per latent.
std::vector<mixreason::GeneratedEvent> exhaustive_hop(const mixreason::Seq2SeqModel& model,
                                                      const mixreason::Vocab& vocab,
                                                      std::span<const std::string> text, mixreason::Relation r,
                                                      std::size_t latents, std::size_t beam, std::size_t max_len);

// All hop-0 x hop-1 event pairs, ranked, with the path beam applied after
// hop 0 and after hop 1.
std::vector<mixreason::ReasoningPath> enumerate_paths_t1(const mixreason::Seq2SeqModel& model,
                                                         const mixreason::Vocab& vocab,
                                                         std::span<const std::string> context, mixreason::Relation r,
                                                         const mixreason::ReasonConfig& config);

// The greedy E-step transcribed step by step from its pseudocode: build the (j, k, l) list, sort it,
// sweep it with "used" lists for targets and latents.
std::vector<std::size_t> greedy_from_pseudocode(const mixreason::AssignmentProblem& p);

// Best injective assignment by trying every one.
struct Optimum {
  double total;
  std::vector<std::size_t> latent;
};
Optimum exhaustive_optimum(const mixreason::AssignmentProblem& p);

// Diversity metrics spelled out with string keys and explicit loops.
double brute_div_ngram(const std::vector<std::vector<std::string>>& seqs);
double brute_bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);
double brute_div_bleu(const std::vector<std::vector<std::string>>& seqs);

// Central finite difference of f at params[slot](i).
double numeric_grad(std::span<mixreason::Tensor> params, std::size_t slot, std::size_t i,
                    const std::function<double()>& f, double h = 1e-5);

// Backbone with every dimension set to `dim`, over the given words.
mixreason::BackboneModel tiny_model(std::vector<std::string> words, std::size_t latents, std::size_t dim,
                                    std::uint64_t seed, std::size_t layers = 1);

}  // namespace oracle
