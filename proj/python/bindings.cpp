// Python surface. Structured results come back as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "mixreason/checkpoint.hpp"
#include "mixreason/diversity.hpp"
#include "mixreason/errors.hpp"
#include "mixreason/pipeline.hpp"
#include "mixreason/question_mapper.hpp"
#include "mixreason/trainer.hpp"

namespace py = pybind11;
using namespace mixreason;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Relation relation_arg(const std::string& s) {
  const auto r = relation_from_name(s);
  if (!r) throw py::value_error("unknown relation: " + s);
  return *r;
}

std::vector<Tokens> tokenize_all(const std::vector<std::string>& texts) {
  std::vector<Tokens> out;
  for (const auto& t : texts) out.push_back(tokenize(t));
  return out;
}

AssignmentProblem problem_arg(const std::vector<std::vector<double>>& rows) {
  return AssignmentProblem::from_rows(rows);
}

ReasonConfig reason_args(const BackboneModel& m, std::size_t hops, std::optional<std::size_t> latents,
                         std::size_t beam, std::size_t top_paths, std::size_t max_len) {
  return {hops, latents.value_or(m.vocab().latents()), beam, top_paths, max_len};
}

}  // namespace

PYBIND11_MODULE(_mixreason, m) {
  m.doc() = "Latent-mixture event generation and zero-shot commonsense QA";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InfeasibleK>(m, "InfeasibleK", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_IOError);

  m.attr("RELATIONS") = std::vector<std::string>(kRelationNames.begin(), kRelationNames.end());

  py::class_<TripleStore>(m, "KnowledgeBase")
      .def(py::init<>())
      .def_static("from_tsv", [](const std::string& text) { return parse_kg_tsv_string(text); })
      .def_static("load", [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw py::value_error("cannot open " + path);
        return parse_kg_tsv(in);
      })
      .def_static("synthetic", &synth_kg, py::arg("heads"), py::arg("tails_min") = 3, py::arg("tails_max") = 3,
                  py::arg("seed") = 0)
      .def("add", [](TripleStore& s, const std::string& h, const std::string& r, const std::string& t) {
        return s.add(h, relation_arg(r), t);
      })
      .def("to_tsv", [](const TripleStore& s) {
        std::ostringstream out;
        write_kg_tsv(s, out);
        return out.str();
      })
      .def("triples", [](const TripleStore& s) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& t : s.triples()) out.emplace_back(t.head, std::string(name(t.relation)), t.tail);
        return out;
      })
      .def("heads", &TripleStore::heads)
      .def("split", [](const TripleStore& s, std::uint64_t seed, double train, double dev, double test) {
        auto p = split(s, {train, dev, test}, seed);
        return py::make_tuple(std::move(p.train), std::move(p.dev), std::move(p.test));
      }, py::arg("seed") = 0, py::arg("train") = 0.8, py::arg("dev") = 0.1, py::arg("test") = 0.1)
      .def_readonly("skipped", &TripleStore::skipped_count)
      .def("__len__", &TripleStore::size);

  py::class_<BackboneModel>(m, "Model")
      .def(py::init([](const TripleStore& kb, std::size_t latents, std::size_t min_count, std::size_t embed_dim,
                       std::size_t hidden_dim, std::uint64_t seed) {
             BackboneConfig c;
             c.embed_dim = embed_dim;
             c.attention_dim = embed_dim;
             c.hidden_dim = hidden_dim;
             c.seed = seed;
             return BackboneModel(c, build_vocab(kb, latents, min_count));
           }),
           py::arg("kb"), py::arg("latents") = 5, py::arg("min_count") = 1, py::arg("embed_dim") = 32,
           py::arg("hidden_dim") = 48, py::arg("seed") = 0)
      .def_static("load", [](const std::string& path) { return load_checkpoint(std::filesystem::path(path)).model; })
      .def("save", [](const BackboneModel& model, const std::string& path) {
        save_checkpoint(std::filesystem::path(path), model);
      })
      .def("to_bytes", [](const BackboneModel& model) {
        std::ostringstream out;
        save_checkpoint(out, model);
        return py::bytes(out.str());
      })
      .def_property_readonly("latents", [](const BackboneModel& model) { return model.vocab().latents(); })
      .def_property_readonly("vocab_size", &BackboneModel::vocab_size)
      .def("parameter_names", &BackboneModel::parameter_names)
      .def("round_to_storage_precision", &BackboneModel::round_to_storage_precision)
      .def("train", [](BackboneModel& model, const TripleStore& kb, const std::string& mode, std::size_t epochs,
                       double lr, std::size_t batch_sets, std::uint64_t seed, bool strict) {
             TrainConfig c;
             const auto tm = train_mode_from_string(mode);
             if (!tm) throw py::value_error("unknown mode: " + mode);
             c.mode = *tm;
             c.epochs = epochs;
             c.lr = lr;
             c.batch_sets = batch_sets;
             c.latents = model.vocab().latents();
             c.seed = seed;
             c.strict = strict;
             json out = json::array();
             {
               py::gil_scoped_release release;
               for (const auto& e : train(model, kb, c)) {
                 out.push_back({{"epoch", e.epoch},
                                {"loss", e.mean_loss},
                                {"distinct_latents", e.mean_distinct_latents},
                                {"latent_histogram", e.latent_histogram},
                                {"skipped_sets", e.skipped_sets}});
               }
             }
             return to_py(out);
           },
           py::arg("kb"), py::arg("mode") = "constrained_em", py::arg("epochs") = 30, py::arg("lr") = 1e-2,
           py::arg("batch_sets") = 8, py::arg("seed") = 0, py::arg("strict") = true)
      .def("log_prob", [](const BackboneModel& model, const std::string& source, const std::string& relation,
                          std::size_t latent, const std::string& target) {
             const Tokens x = tokenize(source), z = tokenize(target);
             return model.sequence_log_prob(encode_source(x, relation_arg(relation), latent, model.vocab()),
                                            encode_target(z, model.vocab()));
           })
      .def("mixture_log_prob", [](const BackboneModel& model, const std::string& source, const std::string& relation,
                                  const std::string& target) {
             return mixture_log_prob(model, tokenize(source), relation_arg(relation), tokenize(target));
           })
      .def("generate", [](const BackboneModel& model, const std::string& text, const std::string& relation,
                          std::optional<std::size_t> latents, std::size_t beam, std::size_t max_len) {
             json out = json::array();
             for (const auto& g : generate_hop(model, model.vocab(), tokenize(text), relation_arg(relation),
                                               latents.value_or(model.vocab().latents()), beam, max_len)) {
               out.push_back({{"event", g.text}, {"log_prob", g.log_prob}, {"latent", g.latent}});
             }
             return to_py(out);
           },
           py::arg("text"), py::arg("relation"), py::arg("latents") = py::none(), py::arg("beam") = 10,
           py::arg("max_len") = 15)
      .def("reason", [](const BackboneModel& model, const std::string& context, const std::string& relation,
                        std::size_t hops, std::optional<std::size_t> latents, std::size_t beam, std::size_t top_paths,
                        std::size_t max_len) {
             json out = json::array();
             for (const auto& p : reason(model, tokenize(context), relation_arg(relation),
                                         reason_args(model, hops, latents, beam, top_paths, max_len))) {
               out.push_back(path_record(p));
             }
             return to_py(out);
           },
           py::arg("context"), py::arg("relation"), py::arg("hops") = 1, py::arg("latents") = py::none(),
           py::arg("beam") = 10, py::arg("top_paths") = 10, py::arg("max_len") = 15)
      .def("answer", [](const BackboneModel& model, const std::string& context, const std::string& question,
                        const std::vector<std::string>& answers, std::optional<std::string> agent, std::size_t hops,
                        std::optional<std::size_t> latents, std::size_t beam, std::size_t top_paths,
                        const std::string& distance, double gamma, const std::string& combine) {
             QAExample ex{"", context, question, answers, std::nullopt, agent};
             QAOptions opt;
             opt.reason = reason_args(model, hops, latents, beam, top_paths, 15);
             const auto d = distance_from_string(distance);
             const auto c = path_combine_from_string(combine);
             if (!d) throw py::value_error("unknown distance: " + distance);
             if (!c) throw py::value_error("unknown combine: " + combine);
             opt.scorer = {*d, gamma, *c};
             opt.scorer.validate();
             return to_py(decision_record(answer_question(model, ex, opt)));
           },
           py::arg("context"), py::arg("question"), py::arg("answers"), py::arg("agent") = py::none(),
           py::arg("hops") = 1, py::arg("latents") = py::none(), py::arg("beam") = 10, py::arg("top_paths") = 10,
           py::arg("distance") = "cosine", py::arg("gamma") = 1.0, py::arg("combine") = "max");

  m.def("div_ngram", [](const std::vector<std::string>& texts) { return div_ngram(tokenize_all(texts)); });
  m.def("div_bleu", [](const std::vector<std::string>& texts) { return div_bleu(tokenize_all(texts)); });
  m.def("bleu", [](const std::string& hyp, const std::string& ref) {
    return bleu_smoothing1(tokenize(hyp), tokenize(ref));
  });
  m.def("constrained_assign", [](const std::vector<std::vector<double>>& rows) {
    return constrained_assign(problem_arg(rows)).latent;
  });
  m.def("hard_assign", [](const std::vector<std::vector<double>>& rows) { return hard_assign(problem_arg(rows)).latent; });
  m.def("map_question", [](const std::string& q, std::optional<std::string> agent) {
    std::optional<std::string_view> a;
    if (agent) a = *agent;
    const auto r = QuestionMapper::builtin().map(q, a);
    return py::make_tuple(std::string(name(r.relation)), r.exact);
  }, py::arg("question"), py::arg("agent") = py::none());
  m.def("synth_qa", [](const TripleStore& kb, std::size_t answers, std::uint64_t seed) {
    json out = json::array();
    for (const auto& ex : synth_qa(kb, answers, seed)) out.push_back(qa_to_json(ex));
    return to_py(out);
  }, py::arg("kb"), py::arg("answers") = 3, py::arg("seed") = 0);
}
