#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mixreason/kg_store.hpp"
#include "mixreason/relation.hpp"

namespace mixreason {

using TokenId = std::int32_t;
using Tokens = std::vector<std::string>;
using TokenIds = std::vector<TokenId>;

// Lowercase, split on whitespace, and split each of . , ! ? ' ; into its own
// token. The reserved brackets used by special symbols are dropped, so corpus
// text can never produce a special, relation, or latent token.
Tokens tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

// Word-level vocabulary. Layout: PAD BOS EOS UNK, then the nine relation
// symbols, then K latent symbols, then corpus words in lexicographic order.
class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr TokenId kFirstRelation = 4;
  static constexpr TokenId kFirstLatent = kFirstRelation + static_cast<TokenId>(kNumRelations);

  static constexpr std::string_view kUnkSurface = "⟨unk⟩";

  Vocab() = default;
  // words must be distinct corpus tokens; order is preserved.
  Vocab(std::vector<std::string> words, std::size_t latents);

  std::size_t size() const { return id_to_token_.size(); }
  std::size_t latents() const { return latents_; }

  TokenId relation_id(Relation r) const { return kFirstRelation + static_cast<TokenId>(code(r)); }
  TokenId latent_id(std::size_t k) const;

  // Corpus words only; the reserved surface forms are never looked up here.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const { return id_to_token_.at(static_cast<std::size_t>(id)); }
  bool is_special(TokenId id) const { return id >= 0 && id < kFirstRelation; }
  bool is_reserved(TokenId id) const { return id >= 0 && id < first_word(); }
  TokenId first_word() const { return kFirstLatent + static_cast<TokenId>(latents_); }

  // The corpus words, in id order (what a checkpoint stores).
  std::vector<std::string> words() const;

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.latents_ == b.latents_ && a.id_to_token_ == b.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::size_t latents_ = 0;
};

Vocab build_vocab(const TripleStore& corpus, std::size_t latents, std::size_t min_count);

// [LAT_k] ++ ids(x) ++ [REL_r]
TokenIds encode_source(std::span<const std::string> x, Relation r, std::size_t k, const Vocab& vocab);
// [BOS] ++ ids(z) ++ [EOS]
TokenIds encode_target(std::span<const std::string> z, const Vocab& vocab);
// Drops PAD/BOS/EOS; UNK decodes to its surface form.
Tokens decode_ids(std::span<const TokenId> ids, const Vocab& vocab);

}  // namespace mixreason
