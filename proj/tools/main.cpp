#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mixreason/errors.hpp"

using namespace mixreason;
using nlohmann::json;

namespace {

// Flag values stay unset unless given, so they only override the config
// file when present.
struct Overrides {
  std::optional<std::string> config, kg, qa, ckpt, heads, mode, distance, combine;
  std::optional<std::size_t> hops, latents, beam, top_paths, max_len, epochs, batch_sets, min_count;
  std::optional<double> gamma, lr;
  std::optional<std::uint64_t> seed;
  bool lenient = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "random seed");
}

void add_reason(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--ckpt", o.ckpt, "checkpoint file");
  cmd->add_option("--hops", o.hops, "reasoning hops T after z0 (default 1)");
  cmd->add_option("--latents", o.latents, "latent values to pool (default: all in the checkpoint)");
  cmd->add_option("--beam", o.beam, "beam width per latent (default 10)");
  cmd->add_option("--top-paths", o.top_paths, "paths kept after each hop (default 10)");
  cmd->add_option("--max-len", o.max_len, "tokens per generated event (default 15)");
}

void add_scorer(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--gamma", o.gamma, "posterior temperature (default 1)");
  cmd->add_option("--distance", o.distance, "cosine | bleu | seq2seq_likelihood | avg_word_prob");
  cmd->add_option("--combine", o.combine, "max | marginal");
}

cli::RunConfig resolve(const Overrides& o) {
  cli::RunConfig c;
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw BadConfig("cannot open " + *o.config);
    c = cli::run_config_from_json(json::parse(in));
  }
  json patch = json::object();
  if (o.mode) patch["train"]["mode"] = *o.mode;
  if (o.distance) patch["scorer"]["distance"] = *o.distance;
  if (o.combine) patch["scorer"]["combine"] = *o.combine;
  if (!patch.empty()) {
    const cli::RunConfig p = cli::run_config_from_json(patch);
    if (o.mode) c.train.mode = p.train.mode;
    if (o.distance) c.scorer.distance = p.scorer.distance;
    if (o.combine) c.scorer.combine = p.scorer.combine;
  }
  if (o.kg) c.kg = *o.kg;
  if (o.qa) c.qa = *o.qa;
  if (o.ckpt) c.ckpt = *o.ckpt;
  if (o.heads) c.heads = *o.heads;
  if (o.seed) c.seed = *o.seed;
  if (o.hops) c.reason.hops = *o.hops;
  if (o.latents) c.reason.latents = c.train.latents = *o.latents;
  if (o.beam) c.reason.beam = *o.beam;
  if (o.top_paths) c.reason.top_paths = *o.top_paths;
  if (o.max_len) c.reason.max_len = *o.max_len;
  if (o.gamma) c.scorer.gamma = *o.gamma;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.lr) c.train.lr = *o.lr;
  if (o.batch_sets) c.train.batch_sets = *o.batch_sets;
  if (o.min_count) c.min_count = *o.min_count;
  if (o.lenient) c.train.strict = false;
  c.scorer.validate();
  return c;
}

Relation parse_relation(const std::string& s) {
  const auto r = relation_from_name(s);
  if (!r) throw BadConfig("unknown relation \"" + s + "\"");
  return *r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-mixture event generation and zero-shot commonsense QA"};
  app.require_subcommand(1);
  Overrides o;

  auto* train = app.add_subcommand("train", "train a model on a knowledge base");
  add_common(train, o);
  train->add_option("--kg", o.kg, "knowledge base TSV");
  train->add_option("--ckpt", o.ckpt, "checkpoint to write");
  train->add_option("--mode", o.mode, "constrained_em | hard_em | no_latent");
  train->add_option("--latents", o.latents, "number of latent values K (default 5)");
  train->add_option("--epochs", o.epochs, "epochs (default 30)");
  train->add_option("--lr", o.lr, "Adam learning rate (default 0.01)");
  train->add_option("--batch-sets", o.batch_sets, "output sets per batch (default 8)");
  train->add_option("--min-count", o.min_count, "minimum word count for the vocabulary (default 1)");
  train->add_flag("--lenient", o.lenient, "skip output sets with more tails than latents");

  std::string text, relation;
  bool paths = false;
  auto* generate = app.add_subcommand("generate", "generate events for one input");
  add_common(generate, o);
  add_reason(generate, o);
  generate->add_option("--text", text, "input event")->required();
  generate->add_option("--relation", relation, "relation name, e.g. xWant")->required();
  generate->add_flag("--paths", paths, "emit multi-hop reasoning paths instead of one hop");

  auto* answer = app.add_subcommand("answer", "answer multiple-choice questions");
  auto* eval_qa = app.add_subcommand("eval-qa", "answer questions and report accuracy");
  for (auto* cmd : {answer, eval_qa}) {
    add_common(cmd, o);
    add_reason(cmd, o);
    add_scorer(cmd, o);
    cmd->add_option("--qa", o.qa, "questions, one JSON object per line");
  }

  std::size_t top_m = 10;
  auto* eval_div = app.add_subcommand("eval-div", "diversity of generations per head");
  add_common(eval_div, o);
  add_reason(eval_div, o);
  eval_div->add_option("--heads", o.heads, "file with one head event per line");
  eval_div->add_option("--kg", o.kg, "take the heads from this knowledge base instead");
  eval_div->add_option("--relation", relation, "relation (default: each of the nine)");
  eval_div->add_option("--top-m", top_m, "generations kept per head (default 10)");

  std::size_t n_heads = 50, tails_min = 3, tails_max = 3;
  auto* synth = app.add_subcommand("synth-kg", "write a synthetic knowledge base as TSV");
  add_common(synth, o);
  synth->add_option("--heads", n_heads, "head events (default 50)");
  synth->add_option("--tails-min", tails_min, "fewest tails per group (default 3)");
  synth->add_option("--tails-max", tails_max, "most tails per group (default 3)");

  std::size_t n_answers = 3;
  auto* synth_qa = app.add_subcommand("synth-qa", "questions built from a knowledge base");
  add_common(synth_qa, o);
  synth_qa->add_option("--kg", o.kg, "knowledge base TSV");
  synth_qa->add_option("--answers", n_answers, "answers per question (default 3)");

  std::string prefix;
  auto* split = app.add_subcommand("split-kg", "80/10/10 split by head into PREFIX.{train,dev,test}.tsv");
  add_common(split, o);
  split->add_option("--kg", o.kg, "knowledge base TSV");
  split->add_option("--out", prefix, "output prefix")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const cli::RunConfig c = resolve(o);
    if (train->parsed()) return cli::cmd_train(c, std::cout, std::cerr);
    if (generate->parsed()) return cli::cmd_generate(c, text, parse_relation(relation), paths, std::cout, std::cerr);
    if (answer->parsed()) return cli::cmd_answer(c, false, std::cout, std::cerr);
    if (eval_qa->parsed()) return cli::cmd_answer(c, true, std::cout, std::cerr);
    if (eval_div->parsed()) {
      std::optional<Relation> r;
      if (!relation.empty()) r = parse_relation(relation);
      return cli::cmd_eval_div(c, r, top_m, std::cout, std::cerr);
    }
    if (synth->parsed()) return cli::cmd_synth_kg(n_heads, tails_min, tails_max, c.seed, std::cout);
    if (synth_qa->parsed()) return cli::cmd_synth_qa(c, n_answers, std::cout, std::cerr);
    if (split->parsed()) return cli::cmd_split_kg(c, prefix, std::cerr);
  } catch (const InfeasibleK& e) {
    std::cerr << "error: " << e.what() << " (pass --lenient to skip such sets, or raise --latents)\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
