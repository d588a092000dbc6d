#include "mixreason/kg_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "mixreason/errors.hpp"
#include "mixreason/rng.hpp"

namespace mixreason {

std::string normalize_event(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool TripleStore::add(std::string_view head, Relation relation, std::string_view tail) {
  std::string h = normalize_event(head);
  std::string t = normalize_event(tail);
  if (h.empty() || t.empty()) throw Error("triple with empty head or tail");
  auto& tails = index_[Key{h, relation}];
  for (std::size_t idx : tails) {
    if (triples_[idx].tail == t) return false;
  }
  tails.push_back(triples_.size());
  triples_.push_back(Triple{std::move(h), relation, std::move(t)});
  return true;
}

const std::vector<std::size_t>* TripleStore::group(std::string_view head, Relation relation) const {
  auto it = index_.find(Key{normalize_event(head), relation});
  return it == index_.end() ? nullptr : &it->second;
}

std::vector<std::string> TripleStore::heads() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : triples_) {
    if (seen.insert(t.head).second) out.push_back(t.head);
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool is_none(std::string_view s) {
  std::string n = normalize_event(s);
  return n.empty() || n == "none";
}

}  // namespace

TripleStore parse_kg_tsv(std::istream& in) {
  TripleStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (normalize_event(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw MalformedLine(line_no, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    auto rel = relation_from_name(fields[1]);
    if (!rel) throw UnknownRelation(line_no, std::string(fields[1]));
    if (normalize_event(fields[0]).empty()) throw MalformedLine(line_no, "empty head");
    if (is_none(fields[2])) {
      ++store.skipped_count;
      continue;
    }
    store.add(fields[0], *rel, fields[2]);
  }
  return store;
}

TripleStore parse_kg_tsv_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_kg_tsv(in);
}

void write_kg_tsv(const TripleStore& store, std::ostream& out) {
  for (const auto& t : store.triples()) {
    out << t.head << '\t' << name(t.relation) << '\t' << t.tail << '\n';
  }
}

std::vector<OutputSet> output_sets(const TripleStore& store) {
  std::vector<OutputSet> sets;
  std::map<std::pair<std::string, Relation>, std::size_t> slot;
  for (const auto& t : store.triples()) {
    auto [it, fresh] = slot.try_emplace({t.head, t.relation}, sets.size());
    if (fresh) sets.push_back(OutputSet{t.head, t.relation, {}});
    sets[it->second].tails.push_back(t.tail);
  }
  return sets;
}

StoreSplit split(const TripleStore& store, const SplitRatios& ratios, std::uint64_t seed) {
  const double sum = ratios.train + ratios.dev + ratios.test;
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw BadRatios("split ratios must be non-negative and sum to 1");
  }
  std::vector<std::string> heads = store.heads();
  Rng rng(seed);
  rng.shuffle(heads);

  const std::size_t n = heads.size();
  auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  auto n_dev = static_cast<std::size_t>(std::llround(ratios.dev * static_cast<double>(n)));
  n_train = std::min(n_train, n);
  n_dev = std::min(n_dev, n - n_train);

  std::map<std::string, int, std::less<>> bucket;
  for (std::size_t i = 0; i < n; ++i) {
    bucket[heads[i]] = i < n_train ? 0 : (i < n_train + n_dev ? 1 : 2);
  }
  StoreSplit out;
  for (const auto& t : store.triples()) {
    TripleStore* dst = nullptr;
    switch (bucket.find(t.head)->second) {
      case 0: dst = &out.train; break;
      case 1: dst = &out.dev; break;
      default: dst = &out.test; break;
    }
    dst->add(t.head, t.relation, t.tail);
  }
  return out;
}

namespace {

// Grammar tables for the synthetic corpus. Heads are "personx <verb> the
// <noun>" with an optional location; tails are a relation-specific frame
// plus words drawn from per-relation pools. Which pool words a group gets
// depends on (relation, verb), so the corpus is learnable and held-out heads
// built from seen verbs are predictable.
constexpr std::array<std::string_view, 12> kVerbs = {
    "buys", "paints", "cleans", "fixes", "sells", "borrows",
    "finds", "loses", "builds", "washes", "breaks", "moves",
};
constexpr std::array<std::string_view, 12> kNouns = {
    "car", "house", "bike", "fence", "boat", "table",
    "garden", "computer", "door", "window", "kitchen", "truck",
};
constexpr std::array<std::string_view, 5> kPlaces = {"", "at home", "at work", "in town", "at night"};

struct RelationFrame {
  std::string_view prefix;
  std::array<std::string_view, 8> pool;
};

constexpr std::array<RelationFrame, kNumRelations> kFrames = {{
    {"to", {"impress", "relax", "help", "earn", "learn", "win", "share", "explore"}},
    {"to have", {"money", "tools", "time", "permission", "skills", "energy", "a plan", "a ride"}},
    {"is", {"generous", "careful", "lazy", "brave", "clever", "patient", "messy", "kind"}},
    {"feels", {"happy", "proud", "tired", "nervous", "relieved", "excited", "guilty", "calm"}},
    {"wants to", {"rest", "celebrate", "call friends", "go out", "sleep", "eat", "travel", "read"}},
    {"gets", {"paid", "dirty", "praised", "hurt", "thanked", "noticed", "busy", "rich"}},
    {"others feel", {"grateful", "jealous", "annoyed", "impressed", "worried", "amused", "bored", "moved"}},
    {"others want to", {"thank them", "help out", "join in", "complain", "pay them", "watch", "leave", "ask why"}},
    {"others get", {"help", "a gift", "upset", "a ride", "advice", "distracted", "money", "inspired"}},
}};

}  // namespace

TripleStore synth_kg(std::size_t n_heads, std::size_t tails_min, std::size_t tails_max, std::uint64_t seed) {
  const std::size_t capacity = kVerbs.size() * kNouns.size() * kPlaces.size();
  if (n_heads < 1 || n_heads > capacity) throw BadConfig("synth_kg: n_heads out of range");
  if (tails_min < 1 || tails_max > 8 || tails_min > tails_max) {
    throw BadConfig("synth_kg: tails range must lie within [1, 8]");
  }
  Rng rng(seed);

  // Pool order per (relation, verb): a seeded permutation; groups take a prefix.
  std::array<std::array<std::array<std::size_t, 8>, kVerbs.size()>, kNumRelations> order{};
  for (auto& per_rel : order) {
    for (auto& perm : per_rel) {
      std::vector<std::size_t> p = {0, 1, 2, 3, 4, 5, 6, 7};
      rng.shuffle(p);
      std::copy(p.begin(), p.end(), perm.begin());
    }
  }

  // Heads: verb x noun first, locations only once those run out.
  std::vector<std::size_t> combos(kVerbs.size() * kNouns.size());
  for (std::size_t i = 0; i < combos.size(); ++i) combos[i] = i;
  rng.shuffle(combos);
  std::vector<std::size_t> head_ids;
  for (std::size_t place = 0; place < kPlaces.size() && head_ids.size() < n_heads; ++place) {
    for (std::size_t c : combos) {
      if (head_ids.size() == n_heads) break;
      head_ids.push_back(place * combos.size() + c);
    }
  }

  TripleStore store;
  for (std::size_t id : head_ids) {
    const std::size_t place = id / combos.size();
    const std::size_t verb = (id % combos.size()) / kNouns.size();
    const std::size_t noun = id % kNouns.size();
    std::string head = "personx " + std::string(kVerbs[verb]) + " the " + std::string(kNouns[noun]);
    if (!kPlaces[place].empty()) head += " " + std::string(kPlaces[place]);
    for (Relation r : kAllRelations) {
      const auto& frame = kFrames[code(r)];
      const auto count = static_cast<std::size_t>(
          rng.between(static_cast<std::int64_t>(tails_min), static_cast<std::int64_t>(tails_max)));
      for (std::size_t i = 0; i < count; ++i) {
        std::string tail = std::string(frame.prefix) + " " + std::string(frame.pool[order[code(r)][verb][i]]);
        store.add(head, r, tail);
      }
    }
  }
  return store;
}

}  // namespace mixreason
