#include "bankembed/pipeline.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "bankembed/error.hpp"
#include "bankembed/eval.hpp"
#include "bankembed/log.hpp"

namespace bankembed {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    auto item = trim(value.substr(pos, comma - pos));
    if (!item.empty()) items.emplace_back(item);
    pos = comma + 1;
  }
  return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            std::size_t line) {
  throw ArgumentError("bad value \"" + value + "\" for " + key + " (line " +
                      std::to_string(line) + ")");
}

double to_double(const std::string& key, const std::string& value,
                 std::size_t line) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, line);
  }
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& value,
                    std::size_t line) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, line);
  }
  return out;
}

struct RawEntry {
  std::string key;
  std::string value;
  std::size_t line;
};

struct RawModel {
  std::string name;
  std::size_t line = 0;
  std::vector<RawEntry> entries;
};

void apply_technique_defaults(ModelSpec* spec) {
  if (spec->technique == "glove") {
    spec->config.learning_rate = 0.05;
    spec->config.max_iterations = 100;
  } else if (spec->technique == "autoencoder") {
    spec->config.dim = 2;
    spec->config.learning_rate = 1e-3;
    spec->config.max_iterations = 200;
  } else if (spec->technique == "cbow") {
    spec->config.learning_rate = 0.025;
    spec->config.max_iterations = 5;
  }
}

ModelSpec materialize_model(const RawModel& raw) {
  ModelSpec spec;
  spec.name = raw.name;
  for (const auto& e : raw.entries) {
    if (e.key == "technique") {
      spec.technique = e.value;
      break;
    }
  }
  if (spec.technique.empty()) {
    throw ArgumentError("model \"" + raw.name +
                        "\" has no technique= key (line " +
                        std::to_string(raw.line) + ")");
  }
  apply_technique_defaults(&spec);

  for (const auto& e : raw.entries) {
    if (e.key == "technique") {
      continue;
    } else if (e.key == "dim") {
      spec.config.dim = static_cast<int>(to_int(e.key, e.value, e.line));
    } else if (e.key == "iterations") {
      spec.config.max_iterations =
          static_cast<int>(to_int(e.key, e.value, e.line));
    } else if (e.key == "learning_rate") {
      spec.config.learning_rate = to_double(e.key, e.value, e.line);
    } else if (e.key == "seed") {
      spec.config.seed =
          static_cast<std::uint64_t>(to_int(e.key, e.value, e.line));
    } else if (e.key == "tolerance") {
      spec.config.tolerance = to_double(e.key, e.value, e.line);
    } else if (e.key == "x_max") {
      spec.config.x_max = to_double(e.key, e.value, e.line);
    } else if (e.key == "alpha") {
      spec.config.alpha = to_double(e.key, e.value, e.line);
    } else if (e.key == "batch_size") {
      spec.config.batch_size =
          static_cast<int>(to_int(e.key, e.value, e.line));
    } else if (e.key == "window") {
      spec.config.window = static_cast<int>(to_int(e.key, e.value, e.line));
    } else if (e.key == "negative_samples") {
      spec.config.negative_samples =
          static_cast<int>(to_int(e.key, e.value, e.line));
    } else if (e.key == "input") {
      spec.input_model = e.value;
    } else if (e.key == "path") {
      spec.path = e.value;
    } else if (e.key == "oov_policy") {
      if (e.value == "skip") {
        spec.policy = OovPolicy::skip;
      } else if (e.value == "zero") {
        spec.policy = OovPolicy::zero;
      } else {
        bad_value(e.key, e.value, e.line);
      }
    } else {
      throw ArgumentError("unknown model key \"" + e.key + "\" (line " +
                          std::to_string(e.line) + ")");
    }
  }
  return spec;
}

void require_file(const std::string& what, const std::string& path) {
  if (!fs::exists(path)) {
    throw ArgumentError(what + " does not exist: " + path);
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open config " + path);

  PipelineConfig cfg;
  std::vector<RawModel> raw_models;
  std::string section;
  std::string line;
  std::size_t line_no = 0;

  auto unknown_key = [&](const std::string& key) {
    throw ArgumentError("unknown key \"" + key + "\" in [" + section +
                        "] (line " + std::to_string(line_no) + ")");
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;

    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ArgumentError("unterminated section header (line " +
                            std::to_string(line_no) + ")");
      }
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (section.rfind("model", 0) == 0) {
        auto name = trim(std::string_view(section).substr(5));
        if (name.empty()) {
          throw ArgumentError("model section needs a name (line " +
                              std::to_string(line_no) + ")");
        }
        raw_models.push_back({std::string(name), line_no, {}});
        section = "model";
      } else if (section != "corpus" && section != "cooc" &&
                 section != "eval" && section != "output") {
        throw ArgumentError("unknown section [" + section + "] (line " +
                            std::to_string(line_no) + ")");
      }
      continue;
    }

    auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("expected key=value (line " +
                          std::to_string(line_no) + ")");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) {
      throw ArgumentError("empty key (line " + std::to_string(line_no) + ")");
    }

    if (section == "model") {
      raw_models.back().entries.push_back({key, value, line_no});
    } else if (section == "corpus") {
      if (key == "input_csv") cfg.input_csv = value;
      else if (key == "narrative_column") cfg.narrative_column = value;
      else if (key == "id_column") cfg.id_column = value;
      else if (key == "stopword_file") cfg.stopword_file = value;
      else if (key == "sample_fraction")
        cfg.sample_fraction = to_double(key, value, line_no);
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(to_int(key, value, line_no));
      else unknown_key(key);
    } else if (section == "cooc") {
      if (key == "window")
        cfg.window = static_cast<int>(to_int(key, value, line_no));
      else if (key == "min_count") cfg.min_count = to_int(key, value, line_no);
      else if (key == "max_vocab")
        cfg.max_vocab = static_cast<std::size_t>(to_int(key, value, line_no));
      else unknown_key(key);
    } else if (section == "eval") {
      if (key == "pairs_file") cfg.pairs_file = value;
      else if (key == "neighbor_queries") cfg.neighbor_queries = split_list(value);
      else if (key == "neighbor_k")
        cfg.neighbor_k = static_cast<std::size_t>(to_int(key, value, line_no));
      else if (key == "projection_words")
        cfg.projection_words = split_list(value);
      else if (key == "kmeans_k")
        cfg.kmeans_k = static_cast<int>(to_int(key, value, line_no));
      else if (key == "agreement_threshold")
        cfg.agreement_threshold = to_double(key, value, line_no);
      else unknown_key(key);
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else if (key == "threads")
        cfg.threads = static_cast<int>(to_int(key, value, line_no));
      else unknown_key(key);
    } else {
      throw ArgumentError("key \"" + key + "\" outside any section (line " +
                          std::to_string(line_no) + ")");
    }
  }

  cfg.models.reserve(raw_models.size());
  for (const auto& raw : raw_models) {
    cfg.models.push_back(materialize_model(raw));
  }
  return cfg;
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (cfg.input_csv.empty()) throw ArgumentError("input_csv is required");
  require_file("input_csv", cfg.input_csv);
  if (!cfg.stopword_file.empty()) {
    require_file("stopword_file", cfg.stopword_file);
  }
  if (!cfg.pairs_file.empty()) require_file("pairs_file", cfg.pairs_file);
  if (cfg.out_dir.empty()) throw ArgumentError("output dir is required");
  if (!(cfg.sample_fraction > 0.0 && cfg.sample_fraction <= 1.0)) {
    throw ArgumentError("sample_fraction must be in (0, 1]");
  }
  if (cfg.window < 1) throw ArgumentError("window must be >= 1");
  if (cfg.min_count < 1) throw ArgumentError("min_count must be >= 1");
  if (cfg.max_vocab && *cfg.max_vocab < 1) {
    throw ArgumentError("max_vocab must be >= 1");
  }
  if (cfg.neighbor_k < 1) throw ArgumentError("neighbor_k must be >= 1");
  if (cfg.kmeans_k < 1) throw ArgumentError("kmeans_k must be >= 1");
  if (!(cfg.agreement_threshold >= 0.0 && cfg.agreement_threshold <= 1.0)) {
    throw ArgumentError("agreement_threshold must be in [0, 1]");
  }
  if (cfg.threads < 1) throw ArgumentError("threads must be >= 1");

  std::unordered_set<std::string> names;
  std::unordered_map<std::string, std::string> technique_of;
  for (const auto& model : cfg.models) {
    if (model.name.empty()) throw ArgumentError("model name must be nonempty");
    if (!names.insert(model.name).second) {
      throw ArgumentError("duplicate model name \"" + model.name + "\"");
    }
    if (model.technique != "lsa" && model.technique != "glove" &&
        model.technique != "autoencoder" && model.technique != "cbow" &&
        model.technique != "import") {
      throw ArgumentError("unknown technique \"" + model.technique +
                          "\" for model \"" + model.name + "\"");
    }
    model.config.validate();
    if (model.technique == "autoencoder") {
      auto it = technique_of.find(model.input_model);
      if (model.input_model.empty() || it == technique_of.end()) {
        throw ArgumentError("autoencoder \"" + model.name +
                            "\" must name an earlier model via input=");
      }
      if (it->second != "lsa") {
        throw ArgumentError("autoencoder \"" + model.name +
                            "\" must take its input from an lsa model");
      }
    }
    if (model.technique == "import") {
      if (model.path.empty()) {
        throw ArgumentError("import \"" + model.name + "\" needs path=");
      }
      require_file("import path", model.path);
    }
    technique_of.emplace(model.name, model.technique);
  }
}

namespace {

class StageMarker {
 public:
  explicit StageMarker(fs::path dir) : path_(std::move(dir) / "INCOMPLETE") {}

  void begin(const std::string& stage) {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw IoError("cannot write " + path_.string());
    out << stage << '\n';
    log_info("stage: " + stage);
  }

  void finish() { fs::remove(path_); }

 private:
  fs::path path_;
};

}  // namespace

void run_pipeline(const PipelineConfig& cfg) {
  validate_pipeline_config(cfg);
  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  StageMarker marker(out_dir);

  // Corpus.
  marker.begin("corpus");
  TokenizerConfig tok_cfg = default_tokenizer_config();
  if (!cfg.stopword_file.empty()) {
    tok_cfg.stopwords = load_stopwords(cfg.stopword_file);
  }
  IngestResult ingest =
      ingest_complaints(cfg.input_csv, cfg.narrative_column, tok_cfg,
                        cfg.id_column);
  DocumentStore store = std::move(ingest.store);
  if (cfg.sample_fraction < 1.0) {
    store = sample(store, cfg.sample_fraction, cfg.seed);
  }
  if (store.empty()) {
    throw DegenerateInputError("no usable narratives in " + cfg.input_csv);
  }
  save_store(store, (out_dir / "corpus.txt").string());
  const CorpusStats stats = corpus_stats(store);
  write_corpus_stats(stats, (out_dir / "corpus_stats.txt").string(),
                     ingest.skipped_empty, ingest.skipped_malformed);
  log_info("corpus: " + std::to_string(stats.num_documents) + " documents, " +
           std::to_string(stats.total_words) + " tokens");

  // Co-occurrence.
  marker.begin("cooc");
  const Vocabulary vocab =
      build_vocabulary(store, cfg.min_count, cfg.max_vocab);
  if (vocab.empty()) {
    throw DegenerateInputError("vocabulary is empty at min_count " +
                               std::to_string(cfg.min_count));
  }
  const CooccurrenceMatrix counts =
      build_cooccurrence(store, vocab, cfg.window, cfg.threads);
  save_cooccurrence(counts, vocab, (out_dir / "cooc_counts.tsv").string());
  const CooccurrenceMatrix ppmi = apply_ppmi(counts);
  save_cooccurrence(ppmi, vocab, (out_dir / "cooc_ppmi.tsv").string());
  log_info("cooc: " + std::to_string(vocab.size()) + " words, " +
           std::to_string(counts.stored_size()) + " stored cells");

  // Models.
  std::map<std::string, EmbeddingMatrix> trained;
  std::vector<std::string> model_order;
  for (const auto& model : cfg.models) {
    marker.begin("train " + model.name);
    TrainResult result;
    if (model.technique == "lsa") {
      result.embedding = lsa(ppmi, vocab, model.config.dim, model.config.seed);
    } else if (model.technique == "glove") {
      result = train_glove(counts, vocab, model.config);
    } else if (model.technique == "autoencoder") {
      result = train_autoencoder(trained.at(model.input_model), model.config);
    } else if (model.technique == "cbow") {
      result = train_cbow(store, vocab, model.config);
    } else {
      auto [embedding, report] =
          import_external(model.path, vocab, model.policy);
      result.embedding = std::move(embedding);
      log_info("import " + model.name + ": " + std::to_string(report.found) +
               "/" + std::to_string(report.requested) + " words covered");
    }
    const std::string vec_path = (out_dir / (model.name + ".vec")).string();
    write_embeddings(result.embedding, vec_path);
    write_provenance(result.embedding, vec_path + ".meta");
    if (!result.loss_curve.empty()) {
      write_loss_curve(result.loss_curve,
                       (out_dir / (model.name + "_loss.csv")).string());
    }
    trained.emplace(model.name, std::move(result.embedding));
    model_order.push_back(model.name);
  }

  // Evaluation.
  marker.begin("eval");
  std::vector<EvalReport> reports;
  std::map<std::string, double> agreement;
  std::optional<WordPairLoad> pairs;
  if (!cfg.pairs_file.empty()) {
    pairs = load_word_pairs(cfg.pairs_file, &vocab);
    if (!pairs->oov_words.empty()) {
      log_warn("pairs: " + std::to_string(pairs->oov_words.size()) +
               " words are outside the vocabulary");
    }
  }

  for (const auto& name : model_order) {
    const EmbeddingMatrix& e = trained.at(name);

    if (pairs) {
      reports.push_back(evaluate_model(name, e, pairs->dataset));
      try {
        const ClusterAssignment clusters =
            kmeans(e, cfg.kmeans_k, cfg.seed);
        const AgreementReport report = cluster_agreement(
            clusters, pairs->dataset, cfg.agreement_threshold);
        agreement[name] = report.accuracy;
        write_agreement_csv(report,
                            (out_dir / (name + "_agreement.csv")).string());
      } catch (const DegenerateInputError& err) {
        log_warn("agreement for " + name + ": " + err.what());
      }
    }

    for (const auto& query : cfg.neighbor_queries) {
      try {
        auto neighbors = nearest_neighbors(e, query, cfg.neighbor_k);
        write_neighbors_csv(
            neighbors,
            (out_dir / (name + "_neighbors_" + query + ".csv")).string());
      } catch (const Error& err) {
        log_warn("neighbors for " + name + "/" + query + ": " + err.what());
      }
    }

    if (!cfg.projection_words.empty() && e.dim() >= 2) {
      std::vector<std::string> present;
      for (const auto& word : cfg.projection_words) {
        if (e.index_of(word)) {
          present.push_back(word);
        } else {
          log_warn("projection: \"" + word + "\" is not in the vocabulary");
        }
      }
      if (!present.empty()) {
        write_projection_csv(project_2d(e, present),
                             (out_dir / (name + "_projection.csv")).string());
      }
    }
  }
  if (pairs) {
    write_eval_reports_csv(reports, (out_dir / "eval_spearman.csv").string());
  }

  // Summary.
  {
    std::ofstream out(out_dir / "run_summary.txt", std::ios::binary);
    if (!out) throw IoError("cannot write run summary");
    out << "documents=" << stats.num_documents << '\n'
        << "tokens=" << stats.total_words << '\n'
        << "vocabulary=" << vocab.size() << '\n'
        << "cooc_cells=" << counts.stored_size() << '\n'
        << "ppmi_cells=" << ppmi.stored_size() << '\n';
    for (const auto& report : reports) {
      if (report.spearman) {
        out << "spearman_" << report.model_name << '=' << *report.spearman
            << '\n';
      }
    }
    for (const auto& [name, accuracy] : agreement) {
      out << "agreement_" << name << '=' << accuracy << '\n';
    }
  }

  marker.finish();
}

}  // namespace bankembed
