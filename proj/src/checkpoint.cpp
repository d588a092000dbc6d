#include "mixreason/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "mixreason/errors.hpp"

namespace mixreason {

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw CheckpointError("checkpoint truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

std::string get_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw CheckpointError("checkpoint truncated");
  return s;
}

}  // namespace

nlohmann::json config_to_json(const BackboneConfig& c) {
  return {{"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},
          {"attention_dim", c.attention_dim},
          {"encoder_layers", c.encoder_layers},
          {"decoder_layers", c.decoder_layers},
          {"max_target_len", c.max_target_len},
          {"seed", c.seed}};
}

BackboneConfig config_from_json(const nlohmann::json& j) {
  BackboneConfig c;
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.attention_dim = j.value("attention_dim", c.attention_dim);
  c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
  c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
  c.max_target_len = j.value("max_target_len", c.max_target_len);
  c.seed = j.value("seed", c.seed);
  return c;
}

void save_checkpoint(std::ostream& out, const BackboneModel& model, const nlohmann::json& provenance) {
  nlohmann::json header;
  header["vocab"] = {{"latents", model.vocab().latents()}, {"words", model.vocab().words()}};
  header["backbone"] = config_to_json(model.config());
  header["provenance"] = provenance;
  const std::string text = header.dump();

  out.write(kCheckpointMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto params = model.parameters();
  const auto& names = model.parameter_names();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(names[i].size()));
    out.write(names[i].data(), static_cast<std::streamsize>(names[i].size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params[i].rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params[i].cols()));
    for (double v : params[i].values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const BackboneModel& model, const nlohmann::json& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  save_checkpoint(out, model, provenance);
}

Checkpoint load_checkpoint(std::istream& in) {
  const std::string magic = get_bytes(in, 4);
  if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) throw CheckpointError("bad checkpoint magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(in);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(get_bytes(in, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }

  Vocab vocab(header.at("vocab").at("words").get<std::vector<std::string>>(),
              header.at("vocab").at("latents").get<std::size_t>());
  Checkpoint ck{BackboneModel(config_from_json(header.at("backbone")), std::move(vocab)),
                header.value("provenance", nlohmann::json::object())};

  const auto n = get_le<std::uint32_t>(in);
  auto params = ck.model.parameters();
  if (n != params.size()) throw CheckpointError("parameter count does not match the configured architecture");
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string pname = get_bytes(in, get_le<std::uint32_t>(in));
    Tensor& p = params[ck.model.parameter_index(pname)];
    const auto rows = get_le<std::uint32_t>(in);
    const auto cols = get_le<std::uint32_t>(in);
    if (rows != p.rows() || cols != p.cols()) throw CheckpointError("shape mismatch for parameter '" + pname + "'");
    for (double& v : p.values()) v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in)));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes after checkpoint payload");
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  return load_checkpoint(in);
}

}  // namespace mixreason
