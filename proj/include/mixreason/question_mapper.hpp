#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixreason/relation.hpp"

namespace mixreason {

struct QuestionTemplate {
  std::string text;  // with an AGENT slot
  Relation relation;
  std::string category;  // cause, attribute, or effect
};

struct QuestionMapping {
  Relation relation;
  bool exact = false;
  std::size_t template_index = 0;
  double similarity = 0.0;  // token Jaccard against the chosen template
};

// Lowercases, replaces punctuation with spaces, and substitutes the agent
// with the token "agent". Without an explicit agent, the first capitalized
// word after the first one is taken as the agent ("Others" excepted).
std::vector<std::string> normalize_question(std::string_view question, std::optional<std::string_view> agent);

// Rule-based question -> relation mapping. Exact template match wins;
// otherwise the template with the highest token Jaccard similarity, ties to
// the earlier template.
class QuestionMapper {
 public:
  explicit QuestionMapper(std::vector<QuestionTemplate> templates);

  // Parses the JSON array shipped in data/question_templates.json.
  static QuestionMapper from_json(std::string_view json_text);
  // The nine built-in templates (the data file, compiled in).
  static const QuestionMapper& builtin();

  QuestionMapping map(std::string_view question, std::optional<std::string_view> agent = std::nullopt) const;
  const std::vector<QuestionTemplate>& templates() const { return templates_; }

 private:
  std::vector<QuestionTemplate> templates_;
  std::vector<std::vector<std::string>> normalized_;
};

}  // namespace mixreason
