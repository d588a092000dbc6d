#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "mixreason/backbone.hpp"
#include "mixreason/reasoning.hpp"
#include "mixreason/scoring.hpp"
#include "mixreason/trainer.hpp"

namespace mixreason::cli {

// Everything a command may need. Loaded from a JSON file (same field names)
// and then overridden by flags.
struct RunConfig {
  std::string kg;
  std::string qa;
  std::string ckpt;
  std::string heads;
  BackboneConfig backbone;
  TrainConfig train;
  std::size_t min_count = 1;
  ReasonConfig reason{.latents = 0};  // 0: every latent in the checkpoint
  ScorerConfig scorer;
  std::uint64_t seed = 0;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& c);

// Each command writes line-delimited JSON to `out`, diagnostics to `err`,
// and returns the process exit code.
int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_generate(const RunConfig& c, const std::string& text, Relation r, bool paths, std::ostream& out,
                 std::ostream& err);
int cmd_answer(const RunConfig& c, bool with_accuracy, std::ostream& out, std::ostream& err);
int cmd_eval_div(const RunConfig& c, std::optional<Relation> r, std::size_t top_m, std::ostream& out,
                 std::ostream& err);
int cmd_synth_kg(std::size_t heads, std::size_t tails_min, std::size_t tails_max, std::uint64_t seed,
                 std::ostream& out);
int cmd_synth_qa(const RunConfig& c, std::size_t answers, std::ostream& out, std::ostream& err);
int cmd_split_kg(const RunConfig& c, const std::string& prefix, std::ostream& err);

}  // namespace mixreason::cli
