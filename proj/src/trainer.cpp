#include "mixreason/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mixreason/errors.hpp"
#include "mixreason/rng.hpp"

namespace mixreason {

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::ConstrainedEm: return "constrained_em";
    case TrainMode::HardEm: return "hard_em";
    case TrainMode::NoLatent: return "no_latent";
  }
  return "unknown";
}

std::optional<TrainMode> train_mode_from_string(std::string_view s) {
  if (s == "constrained_em") return TrainMode::ConstrainedEm;
  if (s == "hard_em") return TrainMode::HardEm;
  if (s == "no_latent") return TrainMode::NoLatent;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (batch_sets < 1) throw BadConfig("batch_sets must be >= 1");
  if (latents < 1) throw BadConfig("latents must be >= 1");
  if (!(lr > 0)) throw BadConfig("learning rate must be positive");
}

std::vector<std::vector<std::size_t>> bucket_batches(std::size_t n_sets, std::size_t max_sets_per_batch,
                                                     std::uint64_t seed) {
  if (max_sets_per_batch < 1) throw BadConfig("max_sets_per_batch must be >= 1");
  std::vector<std::size_t> order(n_sets);
  for (std::size_t i = 0; i < n_sets; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n_sets; i += max_sets_per_batch) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n_sets, i + max_sets_per_batch)));
  }
  return batches;
}

MixtureTrainer::MixtureTrainer(BackboneModel& model, const TrainConfig& config, const TripleStore& store)
    : model_(model), config_(config) {
  config_.validate();
  if (store.empty()) throw EmptyCorpus("training store is empty");
  const Vocab& vocab = model_.vocab();
  if (config_.mode != TrainMode::NoLatent && vocab.latents() != config_.latents) {
    throw BadConfig("model vocabulary has " + std::to_string(vocab.latents()) + " latents, config asks for " +
                    std::to_string(config_.latents));
  }
  for (const auto& s : output_sets(store)) {
    EncodedSet e;
    e.id = s.head + "|" + std::string(name(s.relation));
    e.head = tokenize(s.head);
    e.relation = s.relation;
    for (const auto& t : s.tails) {
      e.targets.push_back(tokenize(t));
      e.target_ids.push_back(encode_target(e.targets.back(), vocab));
    }
    sets_.push_back(std::move(e));
  }
  const std::size_t per_epoch = (sets_.size() + config_.batch_sets - 1) / config_.batch_sets;
  total_steps_ = per_epoch * config_.epochs;
}

double MixtureTrainer::lr_at(std::size_t step) const {
  double lr = config_.lr;
  if (config_.warmup_steps > 0 && step < config_.warmup_steps) {
    return lr * static_cast<double>(step + 1) / static_cast<double>(config_.warmup_steps);
  }
  if (config_.decay && total_steps_ > config_.warmup_steps) {
    const double span = static_cast<double>(total_steps_ - config_.warmup_steps);
    const double done = static_cast<double>(step - config_.warmup_steps);
    lr *= std::max(0.0, 1.0 - done / span);
  }
  return lr;
}

Assignment MixtureTrainer::e_step(std::size_t set_index) const {
  const EncodedSet& s = sets_.at(set_index);
  if (config_.mode == TrainMode::NoLatent) {
    return Assignment{std::vector<std::size_t>(s.targets.size(), 0)};
  }
  const std::size_t K = model_.vocab().latents();
  if (config_.mode == TrainMode::ConstrainedEm && K < s.targets.size()) {
    throw InfeasibleK(s.targets.size(), K, s.id);
  }
  AssignmentProblem p = score_matrix(model_, s.head, s.relation, s.targets);
  return config_.mode == TrainMode::HardEm ? hard_assign(p) : constrained_assign(p);
}

EpochMetrics MixtureTrainer::train_epoch() {
  EpochMetrics metrics;
  metrics.epoch = epoch_;
  metrics.latent_histogram.assign(model_.vocab().latents(), 0);
  const auto batches = bucket_batches(sets_.size(), config_.batch_sets, config_.seed * 1000003ULL + epoch_);

  double loss_sum = 0.0;
  std::size_t pair_count = 0;
  double distinct_sum = 0.0;
  std::size_t set_count = 0;
  const Vocab& vocab = model_.vocab();

  for (std::size_t b = 0; b < batches.size(); ++b) {
    // E-step for the whole batch under the parameters as they stand now.
    std::vector<std::pair<std::size_t, Assignment>> assigned;
    for (std::size_t idx : batches[b]) {
      try {
        assigned.emplace_back(idx, e_step(idx));
      } catch (const InfeasibleK&) {
        if (config_.strict) throw;
        ++metrics.skipped_sets;
      }
    }
    if (assigned.empty()) continue;

    Tape tape;
    std::vector<Var> losses;
    double batch_distinct = 0.0;
    for (const auto& [idx, a] : assigned) {
      const EncodedSet& s = sets_[idx];
      for (std::size_t j = 0; j < s.targets.size(); ++j) {
        const TokenIds src = encode_source(s.head, s.relation, a.latent[j], vocab);
        losses.push_back(model_.sequence_loss(tape, src, s.target_ids[j]));
        ++metrics.latent_histogram[a.latent[j]];
      }
      batch_distinct += static_cast<double>(a.distinct_latents());
    }
    Var total = concat(losses, 0);
    Var mean = scale(sum(total), 1.0 / static_cast<double>(losses.size()));
    Gradients grads = tape.backward(mean);
    if (config_.clip_norm > 0) {
      const double norm = grad_norm(grads);
      if (norm > config_.clip_norm) scale_gradients(grads, config_.clip_norm / norm);
    }
    AdamConfig adam{lr_at(step_)};
    adam_step(model_.parameters(), grads, adam_, adam);
    ++step_;

    BatchRecord rec;
    rec.epoch = epoch_;
    rec.batch = b;
    rec.loss = mean.value()[0];
    rec.distinct_latents_used = batch_distinct / static_cast<double>(assigned.size());
    metrics.batches.push_back(rec);

    loss_sum += rec.loss * static_cast<double>(losses.size());
    pair_count += losses.size();
    distinct_sum += batch_distinct;
    set_count += assigned.size();
  }
  metrics.mean_loss = pair_count ? loss_sum / static_cast<double>(pair_count) : 0.0;
  metrics.mean_distinct_latents = set_count ? distinct_sum / static_cast<double>(set_count) : 0.0;
  ++epoch_;
  return metrics;
}

std::vector<EpochMetrics> train(BackboneModel& model, const TripleStore& store, const TrainConfig& config,
                                const std::function<void(const EpochMetrics&)>& on_epoch) {
  MixtureTrainer trainer(model, config, store);
  std::vector<EpochMetrics> out;
  for (std::size_t e = 0; e < config.epochs; ++e) {
    out.push_back(trainer.train_epoch());
    if (on_epoch) on_epoch(out.back());
  }
  return out;
}

}  // namespace mixreason
