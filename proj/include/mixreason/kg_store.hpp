#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixreason/relation.hpp"

namespace mixreason {

// Trim, collapse internal whitespace runs to one space, ASCII-lowercase.
std::string normalize_event(std::string_view text);

struct Triple {
  std::string head;
  Relation relation;
  std::string tail;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// All tails that share one (head, relation) input.
struct OutputSet {
  std::string head;
  Relation relation;
  std::vector<std::string> tails;

  friend bool operator==(const OutputSet&, const OutputSet&) = default;
};

// An if-then knowledge base. Text is normalized on insertion and duplicate
// triples are dropped, so every (head, relation) group holds distinct tails.
class TripleStore {
 public:
  // Returns false if the triple was already present. Throws MalformedLine(0)
  // style errors are the parser's job; here empty head/tail is a logic error.
  bool add(std::string_view head, Relation relation, std::string_view tail);

  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  // Tail indices (into triples()) for one group, in insertion order.
  const std::vector<std::size_t>* group(std::string_view head, Relation relation) const;

  // Distinct heads in first-seen order.
  std::vector<std::string> heads() const;

  // Lines skipped by the parser ("none" or empty tails).
  std::size_t skipped_count = 0;

  friend bool operator==(const TripleStore& a, const TripleStore& b) { return a.triples_ == b.triples_; }

 private:
  using Key = std::pair<std::string, Relation>;
  std::vector<Triple> triples_;
  std::map<Key, std::vector<std::size_t>, std::less<>> index_;
};

// One record per line: head<TAB>relation<TAB>tail. Blank lines are ignored.
TripleStore parse_kg_tsv(std::istream& in);
TripleStore parse_kg_tsv_string(std::string_view text);
void write_kg_tsv(const TripleStore& store, std::ostream& out);

// One entry per distinct (head, relation), groups in first-seen order.
std::vector<OutputSet> output_sets(const TripleStore& store);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct StoreSplit {
  TripleStore train;
  TripleStore dev;
  TripleStore test;
};

// Partitions by head event after a seeded shuffle of the distinct heads.
StoreSplit split(const TripleStore& store, const SplitRatios& ratios, std::uint64_t seed);

// Desk-scale template-grammar corpus. Each head gets one group per relation
// with a tail count drawn uniformly from [tails_min, tails_max].
TripleStore synth_kg(std::size_t n_heads, std::size_t tails_min, std::size_t tails_max, std::uint64_t seed);

}  // namespace mixreason
