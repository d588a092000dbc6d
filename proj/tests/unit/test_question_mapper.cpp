#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mixreason/question_mapper.hpp"

using namespace mixreason;

TEST_CASE("the nine templates map to their relations") {
  const auto& mapper = QuestionMapper::builtin();
  REQUIRE(mapper.templates().size() == 9);
  for (Relation r : kAllRelations) {
    std::size_t hits = 0;
    for (const auto& t : mapper.templates()) {
      if (t.relation != r) continue;
      ++hits;
      auto m = mapper.map(t.text);
      CHECK(m.relation == r);
      CHECK(m.exact);
      CHECK(m.similarity == 1.0);
    }
    CHECK(hits == 1);
  }
}

TEST_CASE("worked questions") {
  const auto& mapper = QuestionMapper::builtin();
  auto a = mapper.map("Why did Alex do this?", "Alex");
  CHECK(a.relation == Relation::xIntent);
  CHECK(a.exact);
  CHECK(mapper.map("What will happen to Others?").relation == Relation::oEffect);
  CHECK(mapper.map("What will happen to Others?").exact);
  CHECK(mapper.map("How would you describe AGENT?").relation == Relation::xAttr);
}

TEST_CASE("agent substitution is name invariant") {
  const auto& mapper = QuestionMapper::builtin();
  for (const char* who : {"Alex", "Jordan", "Sasha", "Kai"}) {
    const std::string q = std::string("What will ") + who + " want to do next?";
    CHECK(mapper.map(q, who).relation == Relation::xWant);
    CHECK(mapper.map(q).relation == Relation::xWant);
    CHECK(mapper.map(q).exact);
    CHECK(mapper.map(std::string("How would ") + who + " feel afterwards?").relation == Relation::xReact);
  }
  CHECK(normalize_question("What does Riley need to do before this?", std::nullopt) ==
        std::vector<std::string>{"what", "does", "agent", "need", "to", "do", "before", "this"});
  CHECK(normalize_question("Why did Jan Smith do this?", std::string_view("Jan Smith")) ==
        std::vector<std::string>{"why", "did", "agent", "do", "this"});
}

TEST_CASE("fuzzy fallback is total and deterministic") {
  const auto& mapper = QuestionMapper::builtin();
  auto m = mapper.map("What will Alex want to do after that?", "Alex");
  CHECK_FALSE(m.exact);
  CHECK(m.relation == Relation::xWant);
  CHECK(m.similarity < 1.0);
  auto other = mapper.map("What would others likely do next?");
  CHECK(other.relation == Relation::oWant);
  auto nonsense = mapper.map("zzz qqq");
  CHECK(nonsense.relation == Relation::xIntent);  // all tie at 0; first template
  CHECK(nonsense.similarity == 0.0);
  CHECK(mapper.map("zzz qqq").relation == nonsense.relation);
}

TEST_CASE("shipped data file equals the built-in table") {
  std::ifstream in(MIXREASON_TEMPLATES_PATH);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  auto from_file = QuestionMapper::from_json(ss.str());
  REQUIRE(from_file.templates().size() == QuestionMapper::builtin().templates().size());
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(from_file.templates()[i].text == QuestionMapper::builtin().templates()[i].text);
    CHECK(from_file.templates()[i].relation == QuestionMapper::builtin().templates()[i].relation);
    CHECK(from_file.templates()[i].category == QuestionMapper::builtin().templates()[i].category);
  }
}
