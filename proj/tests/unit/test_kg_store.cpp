#include <set>
#include <sstream>

#include "doctest.h"
#include "mixreason/errors.hpp"
#include "mixreason/kg_store.hpp"
#include "mixreason/text.hpp"

using namespace mixreason;

TEST_CASE("normalize_event trims, collapses and lowercases") {
  CHECK(normalize_event("  X  puts\ttrust  In Y ") == "x puts trust in y");
  CHECK(normalize_event("   ").empty());
}

TEST_CASE("parse a single record") {
  auto store = parse_kg_tsv_string("X puts trust in Y\txWant\tto develop a relationship\n");
  REQUIRE(store.size() == 1);
  CHECK(store.triples()[0].relation == Relation::xWant);
  CHECK(code(store.triples()[0].relation) == 4);
  CHECK(store.triples()[0].head == "x puts trust in y");
  CHECK(store.triples()[0].tail == "to develop a relationship");
}

TEST_CASE("empty stream and none tails") {
  CHECK(parse_kg_tsv_string("").empty());
  auto store = parse_kg_tsv_string("e\txWant\tnone\n");
  CHECK(store.empty());
  CHECK(store.skipped_count == 1);
  auto mixed = parse_kg_tsv_string("e\txWant\tNONE\ne\txNeed\t \n\ne\txAttr\tkind\n");
  CHECK(mixed.size() == 1);
  CHECK(mixed.skipped_count == 2);
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_kg_tsv_string("a\txWant\tb\na\txWant\n");
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.line_no == 2);
  }
  try {
    parse_kg_tsv_string("a\txwant\tb\n");
    FAIL("expected UnknownRelation");
  } catch (const UnknownRelation& e) {
    CHECK(e.line_no == 1);
    CHECK(e.token == "xwant");
  }
  CHECK_THROWS_AS(parse_kg_tsv_string("a\txWant\tb\tc\n"), MalformedLine);
}

TEST_CASE("relation codes follow the listed order") {
  const char* names[] = {"xIntent", "xNeed", "xAttr", "xReact", "xWant", "xEffect", "oReact", "oWant", "oEffect"};
  for (std::uint8_t i = 0; i < 9; ++i) {
    auto r = relation_from_name(names[i]);
    REQUIRE(r.has_value());
    CHECK(code(*r) == i);
    CHECK(name(*r) == names[i]);
  }
}

TEST_CASE("output_sets groups by (head, relation) in first-seen order") {
  TripleStore s;
  s.add("a", Relation::xIntent, "t1");
  s.add("a", Relation::xIntent, "t2");
  s.add("a", Relation::xNeed, "t3");
  auto sets = output_sets(s);
  REQUIRE(sets.size() == 2);
  CHECK(sets[0] == OutputSet{"a", Relation::xIntent, {"t1", "t2"}});
  CHECK(sets[1] == OutputSet{"a", Relation::xNeed, {"t3"}});

  CHECK(output_sets(TripleStore{}).empty());

  TripleStore d;
  CHECK(d.add("a", Relation::xIntent, "t1"));
  CHECK_FALSE(d.add("A ", Relation::xIntent, " t1"));
  auto dsets = output_sets(d);
  REQUIRE(dsets.size() == 1);
  CHECK(dsets[0].tails == std::vector<std::string>{"t1"});
}

TEST_CASE("output_sets reconstitutes the store") {
  auto store = synth_kg(20, 1, 5, 3);
  std::size_t count = 0;
  for (const auto& set : output_sets(store)) {
    for (const auto& t : set.tails) {
      ++count;
      const auto* g = store.group(set.head, set.relation);
      REQUIRE(g != nullptr);
      bool found = false;
      for (auto i : *g) found = found || store.triples()[i].tail == t;
      CHECK(found);
    }
  }
  CHECK(count == store.size());
}

TEST_CASE("TSV round trip") {
  auto store = synth_kg(15, 1, 4, 9);
  std::ostringstream out;
  write_kg_tsv(store, out);
  std::istringstream in(out.str());
  CHECK(parse_kg_tsv(in) == store);
}

namespace {

std::set<std::string> head_set(const TripleStore& s) {
  auto h = s.heads();
  return {h.begin(), h.end()};
}

}  // namespace

TEST_CASE("split by head") {
  TripleStore store;
  for (int h = 0; h < 100; ++h) {
    for (int t = 0; t < 2; ++t) store.add("head " + std::to_string(h), Relation::xWant, "tail " + std::to_string(t));
  }
  auto parts = split(store, {0.8, 0.1, 0.1}, 7);
  CHECK(parts.train.heads().size() == 80);
  CHECK(parts.dev.heads().size() == 10);
  CHECK(parts.test.heads().size() == 10);

  auto tr = head_set(parts.train), dv = head_set(parts.dev), te = head_set(parts.test);
  std::set<std::string> all;
  for (const auto* s : {&tr, &dv, &te}) {
    for (const auto& h : *s) CHECK(all.insert(h).second);
  }
  CHECK(all == head_set(store));
  CHECK(parts.train.size() + parts.dev.size() + parts.test.size() == store.size());

  auto again = split(store, {0.8, 0.1, 0.1}, 7);
  CHECK(again.train == parts.train);
  CHECK(again.dev == parts.dev);
  CHECK(again.test == parts.test);

  auto all_train = split(store, {1, 0, 0}, 7);
  CHECK(all_train.train.size() == store.size());
  CHECK(all_train.dev.empty());
  CHECK(all_train.test.empty());
}

TEST_CASE("split rejects bad ratios") {
  auto store = synth_kg(5, 1, 1, 0);
  CHECK_THROWS_AS(split(store, {0.5, 0.2, 0.2}, 0), BadRatios);
  CHECK_THROWS_AS(split(store, {1.2, -0.1, -0.1}, 0), BadRatios);
}

TEST_CASE("synth_kg shapes") {
  auto one = synth_kg(1, 3, 3, 0);
  auto sets = output_sets(one);
  REQUIRE(sets.size() == 9);
  for (const auto& s : sets) {
    CHECK(s.tails.size() == 3);
    std::set<Tokens> distinct;
    for (const auto& t : s.tails) distinct.insert(tokenize(t));
    CHECK(distinct.size() == 3);
  }

  auto fifty = synth_kg(50, 2, 4, 1);
  CHECK(fifty.size() >= 900);
  CHECK(fifty.size() <= 1800);
  CHECK(output_sets(fifty).size() == 450);
  std::set<std::size_t> counts;
  for (const auto& s : output_sets(fifty)) counts.insert(s.tails.size());
  CHECK(counts == std::set<std::size_t>{2, 3, 4});

  std::ostringstream a, b;
  write_kg_tsv(synth_kg(50, 2, 4, 1), a);
  write_kg_tsv(fifty, b);
  CHECK(a.str() == b.str());

  CHECK_THROWS_AS(synth_kg(0, 1, 1, 0), BadConfig);
  CHECK_THROWS_AS(synth_kg(3, 0, 2, 0), BadConfig);
  CHECK_THROWS_AS(synth_kg(3, 2, 9, 0), BadConfig);
}
