#include "mixreason/question_mapper.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"
#include "mixreason/errors.hpp"
#include "question_templates_data.hpp"

namespace mixreason {

namespace {

struct RawWord {
  std::string text;
  bool capitalized;
};

std::vector<RawWord> split_words(std::string_view s) {
  std::vector<RawWord> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      const bool cap = std::isupper(static_cast<unsigned char>(cur.front())) != 0;
      std::string lower;
      for (char c : cur) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      out.push_back(RawWord{lower, cap});
    }
    cur.clear();
  };
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || std::ispunct(u)) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<std::string> normalize_question(std::string_view question, std::optional<std::string_view> agent) {
  std::vector<RawWord> words = split_words(question);
  std::vector<std::string> out;
  if (agent && !agent->empty()) {
    std::vector<RawWord> name = split_words(*agent);
    for (std::size_t i = 0; i < words.size();) {
      bool hit = !name.empty() && i + name.size() <= words.size();
      for (std::size_t k = 0; hit && k < name.size(); ++k) hit = words[i + k].text == name[k].text;
      if (hit) {
        out.emplace_back("agent");
        i += name.size();
      } else {
        out.push_back(words[i].text);
        ++i;
      }
    }
    return out;
  }
  bool substituted = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!substituted && i > 0 && words[i].capitalized && words[i].text != "others" && words[i].text != "i") {
      out.emplace_back("agent");
      substituted = true;
    } else {
      out.push_back(words[i].text);
    }
  }
  return out;
}

QuestionMapper::QuestionMapper(std::vector<QuestionTemplate> templates) : templates_(std::move(templates)) {
  if (templates_.empty()) throw BadConfig("question mapper needs at least one template");
  for (const auto& t : templates_) normalized_.push_back(normalize_question(t.text, std::string_view("AGENT")));
}

QuestionMapper QuestionMapper::from_json(std::string_view json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  std::vector<QuestionTemplate> out;
  for (const auto& item : doc) {
    const auto rel_name = item.at("relation").get<std::string>();
    auto rel = relation_from_name(rel_name);
    if (!rel) throw BadConfig("question template with unknown relation '" + rel_name + "'");
    out.push_back(QuestionTemplate{item.at("template").get<std::string>(), *rel, item.at("category").get<std::string>()});
  }
  return QuestionMapper(std::move(out));
}

const QuestionMapper& QuestionMapper::builtin() {
  static const QuestionMapper mapper = from_json(kQuestionTemplatesJson);
  return mapper;
}

QuestionMapping QuestionMapper::map(std::string_view question, std::optional<std::string_view> agent) const {
  const auto words = normalize_question(question, agent);
  for (std::size_t i = 0; i < normalized_.size(); ++i) {
    if (normalized_[i] == words) return QuestionMapping{templates_[i].relation, true, i, 1.0};
  }
  std::size_t best = 0;
  double best_sim = -1.0;
  for (std::size_t i = 0; i < normalized_.size(); ++i) {
    const double sim = jaccard(words, normalized_[i]);
    if (sim > best_sim) {
      best_sim = sim;
      best = i;
    }
  }
  return QuestionMapping{templates_[best].relation, false, best, best_sim};
}

}  // namespace mixreason
