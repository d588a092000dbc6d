#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixreason/backbone.hpp"
#include "mixreason/diversity.hpp"
#include "mixreason/kg_store.hpp"
#include "mixreason/reasoning.hpp"
#include "mixreason/scoring.hpp"

namespace mixreason {

// One multiple-choice question. Line-delimited JSON on disk:
// {"id", "context", "question", "answers": [...], "gold"?: int, "agent"?: str}
struct QAExample {
  std::string id;
  std::string context;
  std::string question;
  std::vector<std::string> answers;
  std::optional<std::size_t> gold;
  std::optional<std::string> agent;
};

struct QAFile {
  std::vector<QAExample> examples;
  std::size_t skipped = 0;  // malformed records
};

QAFile parse_qa_jsonl(std::istream& in);
nlohmann::json qa_to_json(const QAExample& ex);

struct QAOptions {
  ReasonConfig reason;
  ScorerConfig scorer;
};

struct QAResult {
  std::string example_id;
  Relation relation = Relation::xIntent;
  bool exact_relation = false;
  AnswerDecision decision;
  std::vector<std::string> best_path_events;  // path behind the chosen answer
  std::optional<bool> correct;
};

// Maps the question to a relation, generates reasoning paths from the
// context, and picks an answer.
QAResult answer_question(const BackboneModel& model, const QAExample& ex, const QAOptions& options);

// {example_id, chosen, scores, best_path_events} plus relation and correctness.
nlohmann::json decision_record(const QAResult& r);
nlohmann::json path_record(const ReasoningPath& p);

// Fraction correct over examples with a gold label; nullopt when none have one.
std::optional<double> accuracy(const std::vector<QAExample>& examples, const std::vector<std::size_t>& chosen);

struct HeadDiversity {
  std::string head;
  std::size_t generations = 0;
  std::optional<double> div_ngram;
  std::optional<double> div_bleu;
  std::array<std::optional<double>, kMaxOrder> per_n{};
};

struct DiversityReport {
  std::vector<HeadDiversity> heads;
  std::optional<double> mean_div_ngram;
  std::optional<double> mean_div_bleu;
  std::size_t excluded_from_bleu = 0;  // heads with < 2 generations
  std::size_t top_m = 0;
};

struct DiversityOptions {
  Relation relation = Relation::xIntent;
  std::size_t latents = 1;
  std::size_t beam = 10;
  std::size_t top_m = 10;
  std::size_t max_len = 15;
};

// Per head: pooled generate_hop output, the top M non-empty texts, scored
// with div_ngram and div_bleu.
DiversityReport evaluate_diversity(const BackboneModel& model, const std::vector<std::string>& heads,
                                   const DiversityOptions& options);
nlohmann::json diversity_to_json(const DiversityReport& report);

// Fraction of gold tails found among the pooled generations of their
// (head, relation) input.
double gold_tail_recall(const BackboneModel& model, const TripleStore& store, std::size_t latents, std::size_t beam,
                        std::size_t max_len);

// Builds three-way questions from a store: the context is a head, the
// question is the template for a relation, the correct answer is one gold
// tail, distractors are tails of other relations for the same head.
std::vector<QAExample> synth_qa(const TripleStore& store, std::size_t answers_per_question, std::uint64_t seed);

}  // namespace mixreason
