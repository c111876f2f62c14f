#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bankembed/embed_io.hpp"
#include "bankembed/error.hpp"
#include "bankembed/eval.hpp"
#include "bankembed/log.hpp"
#include "bankembed/pipeline.hpp"
#include "bankembed/train.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bankembed;

struct IngestArgs {
  std::string input, output, stats, narrative_column, id_column, stopwords;
  double fraction = 1.0;
  std::uint64_t seed = 1;
};

struct CoocArgs {
  std::string corpus, output, ppmi_output;
  bool ppmi = false;
  int window = 10;
  std::int64_t min_count = 5;
  std::optional<std::size_t> max_vocab;
  int threads = 1;
};

struct TrainArgs {
  std::string matrix, corpus, input, vocab, output, loss_curve, report;
  std::string oov_policy = "skip";
  std::int64_t min_count = 5;
  std::optional<std::size_t> max_vocab;
  TrainConfig config;
};

struct EvalArgs {
  std::vector<std::string> embeddings;
  std::string pairs, out_dir;
  std::vector<std::string> neighbor_queries;
  std::size_t neighbor_k = 6;
  std::vector<std::string> projection_words;
  int kmeans_k = 10;
  double threshold = 0.8;
  std::uint64_t seed = 1;
};

Vocabulary required_vocab(const LoadedCooccurrence& loaded,
                          const std::string& path) {
  if (!loaded.vocab) {
    throw ArgumentError("matrix " + path + " has no " + path +
                        ".vocab sidecar");
  }
  return *loaded.vocab;
}

void run_ingest(const IngestArgs& args) {
  TokenizerConfig tok = default_tokenizer_config();
  if (!args.stopwords.empty()) tok.stopwords = load_stopwords(args.stopwords);
  IngestResult result =
      ingest_complaints(args.input, args.narrative_column, tok,
                        args.id_column);
  DocumentStore store = std::move(result.store);
  if (args.fraction < 1.0) store = sample(store, args.fraction, args.seed);
  save_store(store, args.output);
  std::string stats_path = args.stats;
  if (stats_path.empty()) {
    stats_path =
        std::filesystem::path(args.output).replace_extension(".stats").string();
  }
  write_corpus_stats(corpus_stats(store), stats_path, result.skipped_empty,
                     result.skipped_malformed);
  std::cout << "ingested " << store.size() << " documents ("
            << result.skipped_empty << " empty, " << result.skipped_malformed
            << " malformed)\n";
}

void run_cooc(const CoocArgs& args) {
  DocumentStore store = load_store(args.corpus);
  Vocabulary vocab = build_vocabulary(store, args.min_count, args.max_vocab);
  if (vocab.empty()) {
    throw DegenerateInputError("vocabulary is empty at min_count " +
                               std::to_string(args.min_count));
  }
  CooccurrenceMatrix counts =
      build_cooccurrence(store, vocab, args.window, args.threads);
  save_cooccurrence(counts, vocab, args.output);
  std::cout << "cooccurrence: " << vocab.size() << " words, "
            << counts.stored_size() << " cells -> " << args.output << "\n";
  std::string ppmi_path = args.ppmi_output;
  if (ppmi_path.empty() && args.ppmi) {
    fs::path p(args.output);
    ppmi_path =
        (p.parent_path() / (p.stem().string() + "_ppmi" +
                            p.extension().string())).string();
  }
  if (!ppmi_path.empty()) {
    CooccurrenceMatrix ppmi = apply_ppmi(counts);
    save_cooccurrence(ppmi, vocab, ppmi_path);
    std::cout << "ppmi: " << ppmi.stored_size() << " cells -> " << ppmi_path
              << "\n";
  }
}

void finish_train(const TrainResult& result, const TrainArgs& args) {
  write_embeddings(result.embedding, args.output);
  write_provenance(result.embedding, args.output + ".meta");
  if (!args.loss_curve.empty() && !result.loss_curve.empty()) {
    write_loss_curve(result.loss_curve, args.loss_curve);
  }
  std::cout << result.embedding.provenance().tag << ": "
            << result.embedding.size() << " vectors of dim "
            << result.embedding.dim() << " -> " << args.output << "\n";
}

void run_train_lsa(const TrainArgs& args) {
  LoadedCooccurrence loaded = load_cooccurrence(args.matrix);
  Vocabulary vocab = required_vocab(loaded, args.matrix);
  TrainResult result;
  result.embedding =
      lsa(loaded.matrix, vocab, args.config.dim, args.config.seed);
  finish_train(result, args);
}

void run_train_glove(const TrainArgs& args) {
  LoadedCooccurrence loaded = load_cooccurrence(args.matrix);
  Vocabulary vocab = required_vocab(loaded, args.matrix);
  finish_train(train_glove(loaded.matrix, vocab, args.config), args);
}

void run_train_autoencoder(const TrainArgs& args) {
  EmbeddingMatrix input = read_embeddings(args.input);
  finish_train(train_autoencoder(input, args.config), args);
}

void run_train_cbow(const TrainArgs& args) {
  DocumentStore store = load_store(args.corpus);
  Vocabulary vocab = build_vocabulary(store, args.min_count, args.max_vocab);
  if (vocab.empty()) {
    throw DegenerateInputError("vocabulary is empty at min_count " +
                               std::to_string(args.min_count));
  }
  finish_train(train_cbow(store, vocab, args.config), args);
}

void run_train_import(const TrainArgs& args) {
  Vocabulary vocab = load_vocab_file(args.vocab);
  OovPolicy policy =
      args.oov_policy == "zero" ? OovPolicy::zero : OovPolicy::skip;
  auto [embedding, report] = import_external(args.input, vocab, policy);
  TrainResult result;
  result.embedding = std::move(embedding);
  finish_train(result, args);
  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::binary);
    if (!out) throw IoError("cannot open " + args.report + " for writing");
    out << "requested=" << report.requested << '\n'
        << "found=" << report.found << '\n'
        << "dim=" << report.dim << '\n';
    for (const auto& word : report.oov) out << "oov=" << word << '\n';
  }
  std::cout << "coverage: " << report.found << "/" << report.requested
            << " words\n";
}

void run_eval(const EvalArgs& args) {
  fs::create_directories(args.out_dir);
  const fs::path out_dir(args.out_dir);

  std::vector<std::pair<std::string, EmbeddingMatrix>> models;
  for (const auto& path : args.embeddings) {
    models.emplace_back(fs::path(path).stem().string(),
                        read_embeddings(path));
  }

  std::optional<WordPairDataset> pairs;
  if (!args.pairs.empty()) {
    pairs = load_word_pairs(args.pairs).dataset;
  }

  std::vector<EvalReport> reports;
  for (const auto& [name, e] : models) {
    if (pairs) {
      reports.push_back(evaluate_model(name, e, *pairs));
      try {
        ClusterAssignment clusters = kmeans(e, args.kmeans_k, args.seed);
        AgreementReport agreement =
            cluster_agreement(clusters, *pairs, args.threshold);
        write_agreement_csv(agreement,
                            (out_dir / (name + "_agreement.csv")).string());
        std::cout << name << " agreement: " << agreement.accuracy << "\n";
      } catch (const DegenerateInputError& err) {
        log_warn("agreement for " + name + ": " + err.what());
      }
    }
    for (const auto& query : args.neighbor_queries) {
      auto neighbors = nearest_neighbors(e, query, args.neighbor_k);
      write_neighbors_csv(
          neighbors,
          (out_dir / (name + "_neighbors_" + query + ".csv")).string());
    }
    if (!args.projection_words.empty()) {
      write_projection_csv(project_2d(e, args.projection_words),
                           (out_dir / (name + "_projection.csv")).string());
    }
  }
  if (pairs) {
    write_eval_reports_csv(reports, (out_dir / "eval_spearman.csv").string());
    for (const auto& report : reports) {
      std::cout << report.model_name << " spearman: ";
      if (report.spearman) {
        std::cout << *report.spearman;
      } else {
        std::cout << "n/a";
      }
      std::cout << " (" << report.pairs_scored << " pairs)\n";
    }
  }
}

void add_common_train_options(CLI::App* cmd, TrainArgs* args,
                              const std::string& dim_names = "--dim") {
  cmd->add_option(dim_names, args->config.dim, "Embedding dimensionality");
  cmd->add_option("--seed", args->config.seed, "Random seed");
  cmd->add_option("--output,--out", args->output, "Output embedding file")
      ->required();
  cmd->add_option("--loss-curve", args->loss_curve,
                  "Write per-iteration loss CSV here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word embedding pipeline for consumer complaint narratives"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("bankembed ") +
                                        BANKEMBED_VERSION);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level,
                 "error, warn, info or debug")
      ->envname("BANKEMBED_LOG");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand(
      "ingest", "Tokenize complaint narratives from a CSV export");
  ingest->add_option("--input,--in", ingest_args.input, "Complaint CSV")
      ->required();
  ingest
      ->add_option("--output,--out", ingest_args.output,
                   "Tokenized corpus file")
      ->required();
  ingest->add_option("--stats", ingest_args.stats,
                     "Corpus stats file (default: output path with .stats)");
  ingest
      ->add_option("--narrative-column,--col", ingest_args.narrative_column,
                   "Narrative column header")
      ->default_val("Consumer complaint narrative");
  ingest
      ->add_option("--id-column", ingest_args.id_column, "Id column header")
      ->default_val("Complaint ID");
  ingest->add_option("--stopwords", ingest_args.stopwords,
                     "Stop word file (one word per line)");
  ingest->add_option("--sample", ingest_args.fraction,
                     "Keep this fraction of documents");
  ingest->add_option("--seed", ingest_args.seed, "Sampling seed");

  CoocArgs cooc_args;
  auto* cooc = app.add_subcommand(
      "cooc", "Build the distance-weighted co-occurrence matrix");
  cooc->add_option("--corpus,--in", cooc_args.corpus, "Tokenized corpus file")
      ->required();
  cooc->add_option("--output,--out", cooc_args.output, "Count matrix TSV")
      ->required();
  cooc->add_flag("--ppmi", cooc_args.ppmi,
                 "Also write the PPMI transform next to the counts");
  cooc->add_option("--ppmi-output", cooc_args.ppmi_output,
                   "Also write the PPMI transform here");
  cooc->add_option("--window", cooc_args.window, "Context window size");
  cooc->add_option("--min-count", cooc_args.min_count,
                   "Minimum word frequency");
  cooc->add_option("--max-vocab", cooc_args.max_vocab,
                   "Keep only this many words");
  cooc->add_option("--threads", cooc_args.threads, "Worker threads");

  auto* train = app.add_subcommand("train", "Train or import embeddings");
  train->require_subcommand(1);

  TrainArgs lsa_args;
  auto* train_lsa = train->add_subcommand(
      "lsa", "Truncated SVD of a co-occurrence matrix");
  train_lsa->add_option("--matrix,--in", lsa_args.matrix, "Matrix TSV")
      ->required();
  add_common_train_options(train_lsa, &lsa_args, "--dim,--k");

  TrainArgs glove_args;
  auto* train_glove_cmd = train->add_subcommand(
      "glove", "Weighted least-squares embeddings over count cells");
  train_glove_cmd
      ->add_option("--matrix,--in", glove_args.matrix, "Count matrix TSV")
      ->required();
  train_glove_cmd->add_option("--iterations", glove_args.config.max_iterations,
                              "Training iterations");
  train_glove_cmd->add_option("--learning-rate",
                              glove_args.config.learning_rate,
                              "Initial learning rate");
  train_glove_cmd->add_option("--x-max", glove_args.config.x_max,
                              "Weighting cutoff");
  train_glove_cmd->add_option("--alpha", glove_args.config.alpha,
                              "Weighting exponent");
  train_glove_cmd->add_option("--tolerance", glove_args.config.tolerance,
                              "Early-stop tolerance");
  add_common_train_options(train_glove_cmd, &glove_args);

  TrainArgs auto_args;
  auto_args.config.dim = 2;
  auto_args.config.learning_rate = 1e-3;
  auto_args.config.max_iterations = 200;
  auto* train_auto = train->add_subcommand(
      "autoencoder", "Compress an embedding with a linear autoencoder");
  train_auto
      ->add_option("--input,--in", auto_args.input, "Input embedding file")
      ->required();
  train_auto->add_option("--iterations", auto_args.config.max_iterations,
                         "Training epochs");
  train_auto->add_option("--learning-rate", auto_args.config.learning_rate,
                         "Adam learning rate");
  train_auto->add_option("--batch-size", auto_args.config.batch_size,
                         "Mini-batch size");
  train_auto->add_option("--tolerance", auto_args.config.tolerance,
                         "Early-stop tolerance");
  add_common_train_options(train_auto, &auto_args, "--dim,--code");

  TrainArgs cbow_args;
  cbow_args.config.learning_rate = 0.025;
  cbow_args.config.max_iterations = 5;
  auto* train_cbow_cmd = train->add_subcommand(
      "cbow", "Continuous bag of words with negative sampling");
  train_cbow_cmd
      ->add_option("--corpus,--in", cbow_args.corpus, "Tokenized corpus file")
      ->required();
  train_cbow_cmd->add_option("--window", cbow_args.config.window,
                             "Context window size");
  train_cbow_cmd->add_option("--negative", cbow_args.config.negative_samples,
                             "Negative samples per position");
  train_cbow_cmd->add_option("--iterations", cbow_args.config.max_iterations,
                             "Training epochs");
  train_cbow_cmd->add_option("--learning-rate", cbow_args.config.learning_rate,
                             "Initial learning rate");
  train_cbow_cmd->add_option("--min-count", cbow_args.min_count,
                             "Minimum word frequency");
  train_cbow_cmd->add_option("--max-vocab", cbow_args.max_vocab,
                             "Keep only this many words");
  train_cbow_cmd->add_option("--tolerance", cbow_args.config.tolerance,
                             "Early-stop tolerance");
  add_common_train_options(train_cbow_cmd, &cbow_args);

  TrainArgs import_args;
  auto* train_import = train->add_subcommand(
      "import", "Align external pretrained vectors to a vocabulary");
  train_import
      ->add_option("--input,--in", import_args.input,
                   "External embedding file")
      ->required();
  train_import->add_option("--vocab", import_args.vocab, "Vocabulary file")
      ->required();
  train_import
      ->add_option("--output,--out", import_args.output,
                   "Output embedding file")
      ->required();
  train_import
      ->add_option("--oov-policy", import_args.oov_policy,
                   "skip or zero")
      ->check(CLI::IsMember({"skip", "zero"}));
  train_import->add_option("--report", import_args.report,
                           "Write a coverage report here");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "Score embeddings against human relatedness judgments");
  eval->add_option("--embeddings,--models", eval_args.embeddings,
                   "Embedding files")
      ->delimiter(',')
      ->required();
  eval->add_option("--pairs", eval_args.pairs, "Word pair CSV");
  eval->add_option("--output-dir,--out,--out-dir", eval_args.out_dir,
                   "Report directory")
      ->required();
  eval->add_option("--neighbors", eval_args.neighbor_queries,
                   "Query words for neighbor lists")
      ->delimiter(',');
  eval->add_option("--neighbor-k,--k", eval_args.neighbor_k,
                   "Neighbors per query");
  eval->add_option("--projection", eval_args.projection_words,
                   "Words for 2-d projection")
      ->delimiter(',');
  eval->add_option("--kmeans-k,--cluster-k", eval_args.kmeans_k,
                   "Cluster count");
  eval->add_option("--threshold,--agreement-threshold", eval_args.threshold,
                   "Relatedness threshold for cluster agreement");
  eval->add_option("--seed", eval_args.seed, "Clustering seed");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the full pipeline from a config");
  run->add_option("--config", config_path, "Pipeline config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!set_log_level(log_level)) {
    std::cerr << "unknown log level \"" << log_level << "\"\n";
    return 2;
  }

  try {
    if (*ingest) run_ingest(ingest_args);
    if (*cooc) run_cooc(cooc_args);
    if (*train_lsa) run_train_lsa(lsa_args);
    if (*train_glove_cmd) run_train_glove(glove_args);
    if (*train_auto) run_train_autoencoder(auto_args);
    if (*train_cbow_cmd) run_train_cbow(cbow_args);
    if (*train_import) run_train_import(import_args);
    if (*eval) run_eval(eval_args);
    if (*run) run_pipeline(parse_pipeline_config(config_path));
  } catch (const ArgumentError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
