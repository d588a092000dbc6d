#include <set>

#include "doctest.h"
#include "mixreason/errors.hpp"
#include "mixreason/trainer.hpp"
#include "oracles.hpp"

using namespace mixreason;

namespace {

BackboneModel model_for(const TripleStore& store, std::size_t latents, std::uint64_t seed = 0) {
  BackboneConfig cfg;
  cfg.embed_dim = cfg.hidden_dim = cfg.attention_dim = 8;
  cfg.seed = seed;
  return BackboneModel(cfg, build_vocab(store, latents, 1));
}

}  // namespace

TEST_CASE("bucket_batches") {
  auto b = bucket_batches(10, 4, 3);
  REQUIRE(b.size() == 3);
  CHECK(b[0].size() == 4);
  CHECK(b[1].size() == 4);
  CHECK(b[2].size() == 2);
  std::set<std::size_t> all;
  for (const auto& batch : b) all.insert(batch.begin(), batch.end());
  CHECK(all.size() == 10);
  CHECK(bucket_batches(10, 4, 3) == b);
  CHECK(bucket_batches(0, 4, 3).empty());
  CHECK_THROWS_AS(bucket_batches(3, 0, 0), BadConfig);
}

TEST_CASE("mode names") {
  for (auto m : {TrainMode::ConstrainedEm, TrainMode::HardEm, TrainMode::NoLatent}) {
    CHECK(train_mode_from_string(to_string(m)) == m);
  }
  CHECK_FALSE(train_mode_from_string("soft_em").has_value());
}

TEST_CASE("no_latent drives a single pair's loss down monotonically") {
  TripleStore store;
  store.add("alex rests", Relation::xEffect, "feels better");
  auto model = model_for(store, 1);
  TrainConfig cfg;
  cfg.mode = TrainMode::NoLatent;
  cfg.epochs = 50;
  cfg.lr = 1e-2;
  cfg.latents = 1;
  auto metrics = train(model, store, cfg);
  REQUIRE(metrics.size() == 50);
  for (std::size_t e = 1; e < metrics.size(); ++e) CHECK(metrics[e].mean_loss < metrics[e - 1].mean_loss);
  CHECK(metrics.back().mean_loss < 0.5 * metrics.front().mean_loss);
}

TEST_CASE("constrained E-step with K = J uses every latent once") {
  auto store = synth_kg(4, 3, 3, 5);
  auto model = model_for(store, 3);
  TrainConfig cfg;
  cfg.latents = 3;
  MixtureTrainer trainer(model, cfg, store);
  for (std::size_t i = 0; i < trainer.num_sets(); ++i) {
    auto a = trainer.e_step(i);
    CHECK(a.injective());
    CHECK(a.distinct_latents() == 3);
  }
  auto m = trainer.train_epoch();
  CHECK(m.mean_distinct_latents == 3.0);
  for (std::size_t k = 0; k < 3; ++k) CHECK(m.latent_histogram[k] == trainer.num_sets());
}

TEST_CASE("identical seeds give identical traces") {
  auto store = synth_kg(3, 1, 3, 2);
  auto run = [&] {
    auto model = model_for(store, 3, 7);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_sets = 4;
    cfg.latents = 3;
    cfg.seed = 5;
    std::vector<double> trace;
    for (const auto& e : train(model, store, cfg)) {
      for (const auto& b : e.batches) trace.push_back(b.loss);
    }
    return std::make_pair(trace, std::vector<Tensor>(model.parameters().begin(), model.parameters().end()));
  };
  auto a = run();
  auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("infeasible sets: strict aborts, lenient skips") {
  auto store = synth_kg(2, 3, 3, 1);
  auto model = model_for(store, 2);
  TrainConfig cfg;
  cfg.latents = 2;
  MixtureTrainer strict(model, cfg, store);
  try {
    strict.train_epoch();
    FAIL("expected InfeasibleK");
  } catch (const InfeasibleK& e) {
    CHECK(e.targets == 3);
    CHECK(e.latents == 2);
    CHECK_FALSE(e.set_id.empty());
  }
  cfg.strict = false;
  MixtureTrainer lenient(model, cfg, store);
  auto m = lenient.train_epoch();
  CHECK(m.skipped_sets == 18);
  CHECK(m.batches.empty());

  // Hard EM has no injectivity requirement.
  cfg.mode = TrainMode::HardEm;
  cfg.strict = true;
  MixtureTrainer hard(model, cfg, store);
  CHECK_NOTHROW(hard.train_epoch());
}

TEST_CASE("config and model must agree on K") {
  auto store = synth_kg(2, 1, 2, 1);
  auto model = model_for(store, 3);
  TrainConfig cfg;
  cfg.latents = 4;
  CHECK_THROWS_AS(MixtureTrainer(model, cfg, store), BadConfig);
  CHECK_THROWS_AS(MixtureTrainer(model, cfg, TripleStore{}), Error);
}

TEST_CASE("learning-rate schedule") {
  auto store = synth_kg(4, 1, 1, 0);
  auto model = model_for(store, 1);
  TrainConfig cfg;
  cfg.latents = 1;
  cfg.lr = 1.0;
  cfg.warmup_steps = 4;
  cfg.decay = true;
  cfg.epochs = 2;
  cfg.batch_sets = 9;  // 36 sets -> 4 steps per epoch, 8 total
  MixtureTrainer t(model, cfg, store);
  CHECK(t.lr_at(0) == doctest::Approx(0.25));
  CHECK(t.lr_at(3) == doctest::Approx(1.0));
  CHECK(t.lr_at(4) == doctest::Approx(1.0));
  CHECK(t.lr_at(6) == doctest::Approx(0.5));
}
