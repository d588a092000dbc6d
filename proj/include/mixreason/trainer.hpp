#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixreason/adam.hpp"
#include "mixreason/assignment.hpp"
#include "mixreason/backbone.hpp"
#include "mixreason/kg_store.hpp"

namespace mixreason {

enum class TrainMode {
  ConstrainedEm,  // one-to-one latent assignment per output set
  HardEm,         // independent argmax per target
  NoLatent,       // every pair trained with latent 0
};

std::string_view to_string(TrainMode mode);
std::optional<TrainMode> train_mode_from_string(std::string_view s);

struct TrainConfig {
  TrainMode mode = TrainMode::ConstrainedEm;
  std::size_t epochs = 30;
  std::size_t batch_sets = 8;
  // Peak learning rate. With warmup_steps > 0 it ramps up linearly first;
  // with decay it falls linearly to zero at the final step.
  double lr = 1e-2;
  std::size_t warmup_steps = 0;
  bool decay = false;
  double clip_norm = 5.0;
  std::size_t latents = 5;
  std::uint64_t seed = 0;
  // Strict: an infeasible output set aborts training. Otherwise it is skipped.
  bool strict = true;

  void validate() const;
};

struct BatchRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double loss = 0.0;                   // mean per-pair negative log-likelihood
  double distinct_latents_used = 0.0;  // mean over the batch's sets
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double mean_distinct_latents = 0.0;
  std::vector<std::size_t> latent_histogram;  // pairs assigned to each latent
  std::size_t skipped_sets = 0;
  std::vector<BatchRecord> batches;
};

// Batches of output-set indices; sets are never split, order is a seeded
// shuffle.
std::vector<std::vector<std::size_t>> bucket_batches(std::size_t n_sets, std::size_t max_sets_per_batch,
                                                     std::uint64_t seed);

// Online hard-EM over whole output sets. Holds the optimizer state across
// epochs; the model must outlive the trainer and is mutated in place.
class MixtureTrainer {
 public:
  MixtureTrainer(BackboneModel& model, const TrainConfig& config, const TripleStore& store);

  EpochMetrics train_epoch();
  std::size_t epochs_done() const { return epoch_; }
  std::size_t steps_done() const { return step_; }
  double lr_at(std::size_t step) const;

  // Assignment the configured E-step would produce for one set right now.
  Assignment e_step(std::size_t set_index) const;
  std::size_t num_sets() const { return sets_.size(); }

 private:
  struct EncodedSet {
    std::string id;
    Tokens head;
    Relation relation;
    std::vector<Tokens> targets;
    std::vector<TokenIds> target_ids;
  };

  BackboneModel& model_;
  TrainConfig config_;
  std::vector<EncodedSet> sets_;
  AdamState adam_;
  std::size_t epoch_ = 0;
  std::size_t step_ = 0;
  std::size_t total_steps_ = 0;
};

// Runs config.epochs epochs, calling on_epoch after each.
std::vector<EpochMetrics> train(BackboneModel& model, const TripleStore& store, const TrainConfig& config,
                                const std::function<void(const EpochMetrics&)>& on_epoch = {});

}  // namespace mixreason
