#include "commands.hpp"

#include <fstream>
#include <iostream>

#include "mixreason/checkpoint.hpp"
#include "mixreason/errors.hpp"
#include "mixreason/kg_store.hpp"
#include "mixreason/pipeline.hpp"
#include "mixreason/text.hpp"

namespace mixreason::cli {

using nlohmann::json;

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

TripleStore read_kg(const std::string& path) {
  if (path.empty()) throw BadConfig("no knowledge-base file given (--kg)");
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open " + path);
  return parse_kg_tsv(in);
}

Checkpoint read_ckpt(const std::string& path) {
  if (path.empty()) throw BadConfig("no checkpoint given (--ckpt)");
  return load_checkpoint(std::filesystem::path(path));
}

// K defaults to what the checkpoint was trained with.
ReasonConfig reason_for(const RunConfig& c, const BackboneModel& m) {
  ReasonConfig r = c.reason;
  if (r.latents == 0 || r.latents > m.vocab().latents()) r.latents = m.vocab().latents();
  return r;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  take(j, "kg", c.kg);
  take(j, "qa", c.qa);
  take(j, "ckpt", c.ckpt);
  take(j, "heads", c.heads);
  take(j, "seed", c.seed);
  if (j.contains("backbone")) c.backbone = config_from_json(j.at("backbone"));
  if (j.contains("train")) {
    const json& t = j.at("train");
    if (t.contains("mode")) {
      const auto mode = train_mode_from_string(t.at("mode").get<std::string>());
      if (!mode) throw BadConfig("unknown training mode " + t.at("mode").dump());
      c.train.mode = *mode;
    }
    take(t, "epochs", c.train.epochs);
    take(t, "batch_sets", c.train.batch_sets);
    take(t, "lr", c.train.lr);
    take(t, "warmup_steps", c.train.warmup_steps);
    take(t, "decay", c.train.decay);
    take(t, "clip_norm", c.train.clip_norm);
    take(t, "latents", c.train.latents);
    take(t, "strict", c.train.strict);
    take(t, "min_count", c.min_count);
  }
  if (j.contains("reason")) {
    const json& r = j.at("reason");
    take(r, "hops", c.reason.hops);
    take(r, "latents", c.reason.latents);
    take(r, "beam", c.reason.beam);
    take(r, "top_paths", c.reason.top_paths);
    take(r, "max_len", c.reason.max_len);
  }
  if (j.contains("scorer")) {
    const json& s = j.at("scorer");
    if (s.contains("distance")) {
      const auto d = distance_from_string(s.at("distance").get<std::string>());
      if (!d) throw BadConfig("unknown distance " + s.at("distance").dump());
      c.scorer.distance = *d;
    }
    if (s.contains("combine")) {
      const auto p = path_combine_from_string(s.at("combine").get<std::string>());
      if (!p) throw BadConfig("unknown path combination " + s.at("combine").dump());
      c.scorer.combine = *p;
    }
    take(s, "gamma", c.scorer.gamma);
  }
  return c;
}

json run_config_to_json(const RunConfig& c) {
  return {
      {"kg", c.kg},
      {"qa", c.qa},
      {"ckpt", c.ckpt},
      {"heads", c.heads},
      {"seed", c.seed},
      {"backbone", config_to_json(c.backbone)},
      {"train",
       {{"mode", to_string(c.train.mode)},
        {"epochs", c.train.epochs},
        {"batch_sets", c.train.batch_sets},
        {"lr", c.train.lr},
        {"warmup_steps", c.train.warmup_steps},
        {"decay", c.train.decay},
        {"clip_norm", c.train.clip_norm},
        {"latents", c.train.latents},
        {"strict", c.train.strict},
        {"min_count", c.min_count}}},
      {"reason",
       {{"hops", c.reason.hops},
        {"latents", c.reason.latents},
        {"beam", c.reason.beam},
        {"top_paths", c.reason.top_paths},
        {"max_len", c.reason.max_len}}},
      {"scorer",
       {{"distance", to_string(c.scorer.distance)},
        {"gamma", c.scorer.gamma},
        {"combine", to_string(c.scorer.combine)}}},
  };
}

int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.ckpt.empty()) throw BadConfig("no output checkpoint given (--ckpt)");
  const TripleStore store = read_kg(c.kg);
  if (store.skipped_count) err << "skipped " << store.skipped_count << " lines without a tail\n";

  TrainConfig tc = c.train;
  tc.seed = c.seed;
  // The baseline has a single component, so its vocabulary has one latent.
  if (tc.mode == TrainMode::NoLatent) tc.latents = 1;
  BackboneConfig bc = c.backbone;
  bc.seed = c.seed;
  BackboneModel model(bc, build_vocab(store, tc.latents, c.min_count));
  err << "vocabulary " << model.vocab().size() << ", " << output_sets(store).size() << " output sets\n";

  double final_loss = 0.0;
  train(model, store, tc, [&](const EpochMetrics& m) {
    for (const auto& b : m.batches) {
      out << json{{"type", "batch"},
                  {"epoch", b.epoch},
                  {"batch", b.batch},
                  {"loss", b.loss},
                  {"distinct_latents", b.distinct_latents_used}}
                 .dump()
          << '\n';
    }
    out << json{{"type", "epoch"},
                {"epoch", m.epoch},
                {"loss", m.mean_loss},
                {"distinct_latents", m.mean_distinct_latents},
                {"latent_histogram", m.latent_histogram},
                {"skipped_sets", m.skipped_sets}}
               .dump()
        << '\n';
    final_loss = m.mean_loss;
  });

  // Saved weights are float32; round first so the in-memory model that
  // produced the metrics is the one a reload gives back.
  model.round_to_storage_precision();
  RunConfig used = c;
  used.train = tc;
  // Only what shaped the weights; the output path would break byte equality
  // between copies.
  const json all = run_config_to_json(used);
  json provenance = {{"kg", all["kg"]}, {"seed", all["seed"]}, {"backbone", all["backbone"]}, {"train", all["train"]}};
  provenance["final_loss"] = final_loss;
  save_checkpoint(std::filesystem::path(c.ckpt), model, provenance);
  out << json{{"type", "checkpoint"}, {"path", c.ckpt}}.dump() << '\n';
  return 0;
}

int cmd_generate(const RunConfig& c, const std::string& text, Relation r, bool paths, std::ostream& out,
                 std::ostream&) {
  const Checkpoint ck = read_ckpt(c.ckpt);
  const ReasonConfig rc = reason_for(c, ck.model);
  const Tokens x = tokenize(text);
  if (x.empty()) throw EmptyText("nothing to generate from");
  if (paths) {
    for (const auto& p : reason(ck.model, x, r, rc)) out << path_record(p).dump() << '\n';
    return 0;
  }
  for (const auto& g : generate_hop(ck.model, ck.model.vocab(), x, r, rc.latents, rc.beam, rc.max_len)) {
    out << json{{"event", g.text}, {"log_prob", g.log_prob}, {"latent", g.latent}}.dump() << '\n';
  }
  return 0;
}

int cmd_answer(const RunConfig& c, bool with_accuracy, std::ostream& out, std::ostream& err) {
  const Checkpoint ck = read_ckpt(c.ckpt);
  if (c.qa.empty()) throw BadConfig("no QA file given (--qa)");
  std::ifstream in(c.qa);
  if (!in) throw BadConfig("cannot open " + c.qa);
  const QAFile qa = parse_qa_jsonl(in);
  if (qa.skipped) err << "skipped " << qa.skipped << " malformed records\n";

  QAOptions opt{reason_for(c, ck.model), c.scorer};
  std::vector<std::size_t> chosen;
  for (const auto& ex : qa.examples) {
    const QAResult r = answer_question(ck.model, ex, opt);
    if (!r.exact_relation) err << ex.id << ": question matched no template exactly, using " << name(r.relation) << '\n';
    chosen.push_back(r.decision.chosen);
    out << decision_record(r).dump() << '\n';
  }
  if (with_accuracy) {
    std::size_t labeled = 0;
    for (const auto& ex : qa.examples) labeled += ex.gold.has_value();
    const auto acc = accuracy(qa.examples, chosen);
    out << json{{"type", "summary"},
                {"accuracy", acc ? json(*acc) : json(nullptr)},
                {"examples", qa.examples.size()},
                {"labeled", labeled},
                {"skipped", qa.skipped}}
               .dump()
        << '\n';
  }
  return 0;
}

int cmd_eval_div(const RunConfig& c, std::optional<Relation> r, std::size_t top_m, std::ostream& out,
                 std::ostream& err) {
  const Checkpoint ck = read_ckpt(c.ckpt);
  std::vector<std::string> heads;
  if (!c.heads.empty()) {
    std::ifstream in(c.heads);
    if (!in) throw BadConfig("cannot open " + c.heads);
    for (std::string line; std::getline(in, line);) {
      if (!normalize_event(line).empty()) heads.push_back(normalize_event(line));
    }
  } else {
    heads = read_kg(c.kg).heads();
  }
  if (heads.empty()) throw BadConfig("no heads to evaluate (--heads or --kg)");

  const ReasonConfig rc = reason_for(c, ck.model);
  std::vector<Relation> relations;
  if (r) relations.push_back(*r);
  else relations.assign(kAllRelations.begin(), kAllRelations.end());
  for (Relation rel : relations) {
    const auto report = evaluate_diversity(ck.model, heads, {rel, rc.latents, rc.beam, top_m, rc.max_len});
    if (report.excluded_from_bleu) {
      err << name(rel) << ": " << report.excluded_from_bleu << " heads with fewer than 2 generations left out of div_bleu\n";
    }
    json j = diversity_to_json(report);
    j["relation"] = name(rel);
    out << j.dump() << '\n';
  }
  return 0;
}

int cmd_synth_kg(std::size_t heads, std::size_t tails_min, std::size_t tails_max, std::uint64_t seed,
                 std::ostream& out) {
  write_kg_tsv(synth_kg(heads, tails_min, tails_max, seed), out);
  return 0;
}

int cmd_synth_qa(const RunConfig& c, std::size_t answers, std::ostream& out, std::ostream& err) {
  const auto qa = synth_qa(read_kg(c.kg), answers, c.seed);
  for (const auto& ex : qa) out << qa_to_json(ex).dump() << '\n';
  err << qa.size() << " questions\n";
  return 0;
}

int cmd_split_kg(const RunConfig& c, const std::string& prefix, std::ostream& err) {
  const auto parts = split(read_kg(c.kg), {}, c.seed);
  const std::pair<const char*, const TripleStore*> files[] = {
      {"train", &parts.train}, {"dev", &parts.dev}, {"test", &parts.test}};
  for (const auto& [suffix, store] : files) {
    const std::string path = prefix + "." + suffix + ".tsv";
    std::ofstream f(path);
    if (!f) throw BadConfig("cannot write " + path);
    write_kg_tsv(*store, f);
    err << path << ": " << store->size() << " triples\n";
  }
  return 0;
}

}  // namespace mixreason::cli
