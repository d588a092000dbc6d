#include <cstring>
#include <sstream>

#include "doctest.h"
#include "mixreason/checkpoint.hpp"
#include "mixreason/errors.hpp"
#include "oracles.hpp"

using namespace mixreason;

namespace {

std::string bytes_of(const BackboneModel& m, const nlohmann::json& prov = nlohmann::json::object()) {
  std::ostringstream out;
  save_checkpoint(out, m, prov);
  return out.str();
}

Checkpoint load_bytes(const std::string& s) {
  std::istringstream in(s);
  return load_checkpoint(in);
}

}  // namespace

TEST_CASE("round trip is bit-exact after storage rounding") {
  auto m = oracle::tiny_model({"alex", "eats", "food"}, 3, 5, 17, 2);
  m.round_to_storage_precision();
  const nlohmann::json prov = {{"seed", 17}, {"mode", "constrained_em"}};
  const std::string bytes = bytes_of(m, prov);
  CHECK(bytes.substr(0, 4) == "CSMO");
  auto ck = load_bytes(bytes);
  CHECK(ck.provenance == prov);
  CHECK(ck.model.vocab() == m.vocab());
  CHECK(ck.model.config() == m.config());
  CHECK(ck.model.parameter_names() == m.parameter_names());
  for (std::size_t i = 0; i < m.parameters().size(); ++i) CHECK(ck.model.parameters()[i] == m.parameters()[i]);
  CHECK(bytes_of(ck.model, prov) == bytes);
}

TEST_CASE("unrounded parameters load as their float values") {
  auto m = oracle::tiny_model({"a", "b"}, 1, 4, 2);
  auto ck = load_bytes(bytes_of(m));
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    for (std::size_t j = 0; j < m.parameters()[i].size(); ++j) {
      CHECK(ck.model.parameters()[i][j] == static_cast<double>(static_cast<float>(m.parameters()[i][j])));
    }
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  auto m = oracle::tiny_model({"a", "b"}, 1, 4, 2);
  const std::string good = bytes_of(m);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(load_bytes(bad_magic), CheckpointError);
  std::string bad_version = good;
  bad_version[4] = 9;
  CHECK_THROWS_AS(load_bytes(bad_version), CheckpointError);
  CHECK_THROWS_AS(load_bytes(good.substr(0, good.size() - 3)), CheckpointError);
  CHECK_THROWS_AS(load_bytes(good + "x"), CheckpointError);
  CHECK_THROWS_AS(load_bytes(""), CheckpointError);
}

TEST_CASE("config json round trip") {
  BackboneConfig c;
  c.embed_dim = 7;
  c.decoder_layers = 2;
  c.seed = 123456789012345ULL;
  CHECK(config_from_json(config_to_json(c)) == c);
}
