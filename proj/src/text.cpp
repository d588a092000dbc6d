#include "mixreason/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "mixreason/errors.hpp"

namespace mixreason {

namespace {

bool is_split_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == '\'' || c == ';';
}

// U+27E8 / U+27E9 in UTF-8.
bool is_reserved_bracket(std::string_view s, std::size_t i) {
  return s.size() - i >= 3 && static_cast<unsigned char>(s[i]) == 0xE2 &&
         static_cast<unsigned char>(s[i + 1]) == 0x9F &&
         (static_cast<unsigned char>(s[i + 2]) == 0xA8 || static_cast<unsigned char>(s[i + 2]) == 0xA9);
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_reserved_bracket(text, i)) {
      i += 2;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_split_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Vocab::Vocab(std::vector<std::string> words, std::size_t latents) : latents_(latents) {
  if (latents < 1) throw BadConfig("vocabulary needs at least one latent symbol");
  id_to_token_ = {"⟨pad⟩", "⟨bos⟩", "⟨eos⟩", std::string(kUnkSurface)};
  for (auto n : kRelationNames) id_to_token_.push_back("⟨rel_" + std::string(n) + "⟩");
  for (std::size_t k = 0; k < latents; ++k) id_to_token_.push_back("⟨lat_" + std::to_string(k) + "⟩");
  for (auto& w : words) {
    const auto id = static_cast<TokenId>(id_to_token_.size());
    if (!token_to_id_.emplace(w, id).second) throw BadConfig("duplicate vocabulary word '" + w + "'");
    id_to_token_.push_back(std::move(w));
  }
}

TokenId Vocab::latent_id(std::size_t k) const {
  if (k >= latents_) {
    throw LatentOutOfRange("latent index " + std::to_string(k) + " >= K=" + std::to_string(latents_));
  }
  return kFirstLatent + static_cast<TokenId>(k);
}

TokenId Vocab::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const { return token_to_id_.contains(std::string(token)); }

std::vector<std::string> Vocab::words() const {
  return {id_to_token_.begin() + first_word(), id_to_token_.end()};
}

Vocab build_vocab(const TripleStore& corpus, std::size_t latents, std::size_t min_count) {
  if (corpus.empty()) throw EmptyCorpus("cannot build a vocabulary from an empty corpus");
  if (min_count < 1) throw BadConfig("min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& t : corpus.triples()) {
    for (auto& tok : tokenize(t.head)) ++counts[tok];
    for (auto& tok : tokenize(t.tail)) ++counts[tok];
  }
  std::vector<std::string> words;
  for (auto& [tok, n] : counts) {
    if (n >= min_count) words.push_back(tok);
  }
  return Vocab(std::move(words), latents);
}

TokenIds encode_source(std::span<const std::string> x, Relation r, std::size_t k, const Vocab& vocab) {
  TokenIds ids;
  ids.reserve(x.size() + 2);
  ids.push_back(vocab.latent_id(k));
  for (const auto& tok : x) ids.push_back(vocab.id(tok));
  ids.push_back(vocab.relation_id(r));
  return ids;
}

TokenIds encode_target(std::span<const std::string> z, const Vocab& vocab) {
  TokenIds ids;
  ids.reserve(z.size() + 2);
  ids.push_back(Vocab::kBos);
  for (const auto& tok : z) ids.push_back(vocab.id(tok));
  ids.push_back(Vocab::kEos);
  return ids;
}

Tokens decode_ids(std::span<const TokenId> ids, const Vocab& vocab) {
  Tokens out;
  for (TokenId id : ids) {
    if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos) continue;
    out.push_back(vocab.token(id));
  }
  return out;
}

}  // namespace mixreason
