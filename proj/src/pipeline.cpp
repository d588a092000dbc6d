#include "mixreason/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <set>

#include "mixreason/errors.hpp"
#include "mixreason/question_mapper.hpp"
#include "mixreason/rng.hpp"

namespace mixreason {

QAFile parse_qa_jsonl(std::istream& in) {
  QAFile out;
  std::string line;
  while (std::getline(in, line)) {
    if (normalize_event(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      QAExample ex;
      ex.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                               : std::to_string(out.examples.size() + out.skipped);
      ex.context = j.at("context").get<std::string>();
      ex.question = j.at("question").get<std::string>();
      ex.answers = j.at("answers").get<std::vector<std::string>>();
      if (j.contains("gold") && !j["gold"].is_null()) ex.gold = j["gold"].get<std::size_t>();
      if (j.contains("agent") && !j["agent"].is_null()) ex.agent = j["agent"].get<std::string>();
      std::set<std::string> distinct;
      for (const auto& a : ex.answers) distinct.insert(normalize_event(a));
      const bool valid = ex.answers.size() >= 2 && distinct.size() == ex.answers.size() &&
                         !distinct.contains("") && (!ex.gold || *ex.gold < ex.answers.size());
      if (!valid) {
        ++out.skipped;
        continue;
      }
      out.examples.push_back(std::move(ex));
    } catch (const nlohmann::json::exception&) {
      ++out.skipped;
    }
  }
  return out;
}

nlohmann::json qa_to_json(const QAExample& ex) {
  nlohmann::json j = {{"id", ex.id}, {"context", ex.context}, {"question", ex.question}, {"answers", ex.answers}};
  if (ex.gold) j["gold"] = *ex.gold;
  if (ex.agent) j["agent"] = *ex.agent;
  return j;
}

QAResult answer_question(const BackboneModel& model, const QAExample& ex, const QAOptions& options) {
  QAResult out;
  out.example_id = ex.id;
  const auto mapping = QuestionMapper::builtin().map(
      ex.question, ex.agent ? std::optional<std::string_view>(*ex.agent) : std::nullopt);
  out.relation = mapping.relation;
  out.exact_relation = mapping.exact;
  const Tokens context = tokenize(ex.context);
  std::vector<ReasoningPath> paths;
  if (options.scorer.distance != Distance::AvgWordProb) paths = reason(model, context, out.relation, options.reason);
  out.decision = select_answer(paths, ex.answers, model, options.scorer, context, out.relation);
  if (auto p = out.decision.best_path[out.decision.chosen]) out.best_path_events = paths[*p].events;
  if (ex.gold) out.correct = *ex.gold == out.decision.chosen;
  return out;
}

nlohmann::json decision_record(const QAResult& r) {
  nlohmann::json j = {{"example_id", r.example_id},
                      {"chosen", r.decision.chosen},
                      {"scores", r.decision.scores},
                      {"best_path_events", r.best_path_events},
                      {"relation", std::string(name(r.relation))},
                      {"exact_relation", r.exact_relation}};
  j["correct"] = r.correct ? nlohmann::json(*r.correct) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json path_record(const ReasoningPath& p) {
  return {{"events", p.events},
          {"hop_log_probs", p.hop_log_probs},
          {"latents", p.latents},
          {"total_log_prob", p.total_log_prob}};
}

std::optional<double> accuracy(const std::vector<QAExample>& examples, const std::vector<std::size_t>& chosen) {
  if (examples.size() != chosen.size()) throw ShapeMismatch("one decision per example required");
  std::size_t labeled = 0, correct = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!examples[i].gold) continue;
    ++labeled;
    correct += *examples[i].gold == chosen[i];
  }
  if (labeled == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(labeled);
}

DiversityReport evaluate_diversity(const BackboneModel& model, const std::vector<std::string>& heads,
                                   const DiversityOptions& options) {
  DiversityReport report;
  report.top_m = options.top_m;
  double sum_ngram = 0.0, sum_bleu = 0.0;
  std::size_t n_ngram = 0, n_bleu = 0;
  for (const auto& head : heads) {
    HeadDiversity hd;
    hd.head = normalize_event(head);
    const auto events = generate_hop(model, model.vocab(), tokenize(head), options.relation, options.latents,
                                     options.beam, options.max_len);
    std::vector<Tokens> gens;
    for (const auto& ev : events) {
      if (gens.size() == options.top_m) break;
      Tokens t = tokenize(ev.text);
      if (!t.empty()) gens.push_back(std::move(t));
    }
    hd.generations = gens.size();
    if (!gens.empty()) {
      const auto b = div_ngram_breakdown(gens);
      hd.div_ngram = b.value;
      hd.per_n = b.per_n;
      sum_ngram += b.value;
      ++n_ngram;
    }
    if (gens.size() >= 2) {
      hd.div_bleu = div_bleu(gens);
      sum_bleu += *hd.div_bleu;
      ++n_bleu;
    } else {
      ++report.excluded_from_bleu;
    }
    report.heads.push_back(std::move(hd));
  }
  if (n_ngram) report.mean_div_ngram = sum_ngram / static_cast<double>(n_ngram);
  if (n_bleu) report.mean_div_bleu = sum_bleu / static_cast<double>(n_bleu);
  return report;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json diversity_to_json(const DiversityReport& report) {
  nlohmann::json heads = nlohmann::json::array();
  for (const auto& h : report.heads) {
    nlohmann::json per_n = nlohmann::json::object();
    for (std::size_t n = 0; n < kMaxOrder; ++n) per_n[std::to_string(n + 1)] = opt(h.per_n[n]);
    heads.push_back({{"head", h.head},
                     {"M", h.generations},
                     {"div_ngram", opt(h.div_ngram)},
                     {"div_bleu", opt(h.div_bleu)},
                     {"per_n", per_n}});
  }
  return {{"M", report.top_m},
          {"div_ngram", opt(report.mean_div_ngram)},
          {"div_bleu", opt(report.mean_div_bleu)},
          {"excluded_from_div_bleu", report.excluded_from_bleu},
          {"heads", heads}};
}

double gold_tail_recall(const BackboneModel& model, const TripleStore& store, std::size_t latents, std::size_t beam,
                        std::size_t max_len) {
  std::size_t found = 0, total = 0;
  for (const auto& set : output_sets(store)) {
    std::set<std::string> generated;
    for (const auto& ev : generate_hop(model, model.vocab(), tokenize(set.head), set.relation, latents, beam, max_len)) {
      generated.insert(ev.text);
    }
    for (const auto& tail : set.tails) {
      ++total;
      found += generated.contains(join_tokens(tokenize(tail)));
    }
  }
  return total ? static_cast<double>(found) / static_cast<double>(total) : 0.0;
}

std::vector<QAExample> synth_qa(const TripleStore& store, std::size_t answers_per_question, std::uint64_t seed) {
  if (answers_per_question < 2) throw BadConfig("need at least two answers per question");
  Rng rng(seed);
  const auto& templates = QuestionMapper::builtin().templates();
  std::map<std::string, std::map<Relation, std::vector<std::string>>> by_head;
  for (const auto& t : store.triples()) by_head[t.head][t.relation].push_back(t.tail);

  std::vector<QAExample> out;
  for (const auto& head : store.heads()) {
    const auto& groups = by_head[head];
    for (const auto& [rel, tails] : groups) {
      std::vector<Relation> others;
      for (const auto& [orel, otails] : groups) {
        if (orel != rel) others.push_back(orel);
      }
      if (others.size() + 1 < answers_per_question) continue;
      rng.shuffle(others);
      QAExample ex;
      ex.id = "q" + std::to_string(out.size());
      ex.context = head;
      for (const auto& tpl : templates) {
        if (tpl.relation == rel) ex.question = tpl.text;
      }
      std::string agent_word = "PersonX";
      std::size_t pos = ex.question.find("AGENT");
      if (pos != std::string::npos) ex.question.replace(pos, 5, agent_word);
      ex.agent = agent_word;
      std::vector<std::string> answers = {tails[rng.below(tails.size())]};
      std::set<std::string> used = {answers.front()};
      for (Relation o : others) {
        if (answers.size() == answers_per_question) break;
        const auto& cand = groups.at(o);
        const std::string& pick = cand[rng.below(cand.size())];
        if (used.insert(pick).second) answers.push_back(pick);
      }
      if (answers.size() < answers_per_question) continue;
      std::vector<std::size_t> order(answers.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(order);
      for (std::size_t i = 0; i < order.size(); ++i) {
        ex.answers.push_back(answers[order[i]]);
        if (order[i] == 0) ex.gold = i;
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace mixreason
