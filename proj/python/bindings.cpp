#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bankembed/embed_io.hpp"
#include "bankembed/error.hpp"
#include "bankembed/eval.hpp"
#include "bankembed/pipeline.hpp"
#include "bankembed/train.hpp"

namespace py = pybind11;
using namespace bankembed;

namespace {

DocumentStore make_store(const std::vector<std::vector<std::string>>& docs) {
  std::vector<Document> documents;
  documents.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    documents.push_back({std::to_string(i), docs[i]});
  }
  return DocumentStore(std::move(documents), "<python>");
}

std::vector<std::string> tokenize_py(
    const std::string& text, bool strip_redaction_masks,
    const std::optional<std::vector<std::string>>& stopwords) {
  TokenizerConfig config;
  config.strip_redaction_masks = strip_redaction_masks;
  if (stopwords) {
    config.stopwords.insert(stopwords->begin(), stopwords->end());
  } else {
    const auto& builtin = builtin_stopwords();
    config.stopwords.insert(builtin.begin(), builtin.end());
  }
  return tokenize(text, config);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Word embedding pipeline for consumer complaint narratives";

  py::register_exception<ArgumentError>(m, "ArgumentError",
                                        PyExc_ValueError);
  py::register_exception<WordLookupError>(m, "WordLookupError",
                                          PyExc_KeyError);
  static py::exception<Error> base_error(m, "PipelineError");
  py::register_exception<IoError>(m, "IoError", base_error.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base_error.ptr());
  py::register_exception<FormatError>(m, "FormatError", base_error.ptr());
  py::register_exception<NumericError>(m, "NumericError", base_error.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError",
                                               base_error.ptr());

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_property_readonly("words", &Vocabulary::words)
      .def("__len__", &Vocabulary::size)
      .def("__contains__", &Vocabulary::contains)
      .def("index_of", &Vocabulary::index_of, py::arg("word"))
      .def("count", &Vocabulary::count, py::arg("index"));

  py::class_<CoocEntry>(m, "CoocEntry")
      .def_readonly("i", &CoocEntry::i)
      .def_readonly("j", &CoocEntry::j)
      .def_readonly("value", &CoocEntry::value);

  py::class_<CooccurrenceMatrix>(m, "CooccurrenceMatrix")
      .def_property_readonly("dim", &CooccurrenceMatrix::dim)
      .def_property_readonly("window", &CooccurrenceMatrix::window)
      .def_property_readonly(
          "kind",
          [](const CooccurrenceMatrix& m_) {
            return std::string(to_string(m_.kind()));
          })
      .def("at", &CooccurrenceMatrix::at, py::arg("i"), py::arg("j"))
      .def("entries", &CooccurrenceMatrix::entries)
      .def("sum", &CooccurrenceMatrix::sum)
      .def("__len__", &CooccurrenceMatrix::stored_size);

  py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def_property_readonly("dim", &EmbeddingMatrix::dim)
      .def_property_readonly("vocab", &EmbeddingMatrix::vocab)
      .def_property_readonly("vectors",
                             [](const EmbeddingMatrix& e) {
                               return e.vectors();
                             })
      .def("__len__", &EmbeddingMatrix::size)
      .def(
          "vector",
          [](const EmbeddingMatrix& e, const std::string& word) {
            auto idx = e.index_of(word);
            if (!idx) {
              throw WordLookupError("\"" + word +
                                    "\" is not in the vocabulary");
            }
            return Eigen::VectorXd(e.row(*idx).transpose());
          },
          py::arg("word"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("max_iterations", &TrainConfig::max_iterations)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("tolerance", &TrainConfig::tolerance)
      .def_readwrite("x_max", &TrainConfig::x_max)
      .def_readwrite("alpha", &TrainConfig::alpha)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("window", &TrainConfig::window)
      .def_readwrite("negative_samples", &TrainConfig::negative_samples);

  m.def("tokenize", &tokenize_py, py::arg("text"),
        py::arg("strip_redaction_masks") = true,
        py::arg("stopwords") = std::nullopt,
        "Lowercase, split and filter one narrative into tokens");

  m.def(
      "build_vocabulary",
      [](const std::vector<std::vector<std::string>>& docs,
         std::int64_t min_count, std::optional<std::size_t> max_size) {
        return build_vocabulary(make_store(docs), min_count, max_size);
      },
      py::arg("documents"), py::arg("min_count") = 5,
      py::arg("max_size") = std::nullopt);

  m.def(
      "build_cooccurrence",
      [](const std::vector<std::vector<std::string>>& docs,
         const Vocabulary& vocab, int window, int threads) {
        return build_cooccurrence(make_store(docs), vocab, window, threads);
      },
      py::arg("documents"), py::arg("vocab"), py::arg("window") = 10,
      py::arg("threads") = 1);

  m.def(
      "apply_ppmi",
      [](const CooccurrenceMatrix& counts) { return apply_ppmi(counts); },
      py::arg("counts"));

  m.def("lsa", &lsa, py::arg("matrix"), py::arg("vocab"), py::arg("dim"),
        py::arg("seed") = 1);

  m.def(
      "train_glove",
      [](const CooccurrenceMatrix& m_, const Vocabulary& vocab,
         const TrainConfig& cfg) {
        auto result = train_glove(m_, vocab, cfg);
        return py::make_tuple(result.embedding, result.loss_curve);
      },
      py::arg("matrix"), py::arg("vocab"), py::arg("config"));

  m.def(
      "train_autoencoder",
      [](const EmbeddingMatrix& input, const TrainConfig& cfg) {
        auto result = train_autoencoder(input, cfg);
        return py::make_tuple(result.embedding, result.loss_curve);
      },
      py::arg("input"), py::arg("config"));

  m.def(
      "train_cbow",
      [](const std::vector<std::vector<std::string>>& docs,
         const Vocabulary& vocab, const TrainConfig& cfg) {
        auto result = train_cbow(make_store(docs), vocab, cfg);
        return py::make_tuple(result.embedding, result.loss_curve);
      },
      py::arg("documents"), py::arg("vocab"), py::arg("config"));

  m.def("write_embeddings", &write_embeddings, py::arg("embedding"),
        py::arg("path"), py::arg("header") = true);
  m.def("read_embeddings", &read_embeddings, py::arg("path"));

  m.def(
      "cosine_similarity",
      [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        return cosine_similarity(u, v);
      },
      py::arg("u"), py::arg("v"));

  m.def("spearman", &spearman, py::arg("x"), py::arg("y"),
        "Rank correlation with average ranks for ties");

  m.def(
      "nearest_neighbors",
      [](const EmbeddingMatrix& e, const std::string& word, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : nearest_neighbors(e, word, k)) {
          out.emplace_back(n.word, n.similarity);
        }
        return out;
      },
      py::arg("embedding"), py::arg("word"), py::arg("k") = 6);

  m.def(
      "kmeans",
      [](const EmbeddingMatrix& e, int k, std::uint64_t seed, int max_iter) {
        auto result = kmeans(e, k, seed, max_iter);
        return py::make_tuple(result.labels, result.inertia);
      },
      py::arg("embedding"), py::arg("k"), py::arg("seed") = 1,
      py::arg("max_iter") = 100);

  m.def(
      "run_pipeline",
      [](const std::string& config_path) {
        run_pipeline(parse_pipeline_config(config_path));
      },
      py::arg("config_path"), "Run ingest -> cooc -> train -> eval");
}
