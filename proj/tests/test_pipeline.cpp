#include "bankembed/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <string>

#include "bankembed/error.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bankembed;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace fs = std::filesystem;

namespace {

std::string complaint_csv() {
  std::string csv = "Complaint ID,Product,Consumer complaint narrative\n";
  const std::string topics[2] = {
      "loan payment overdue bank charged interest loan payment",
      "fraud card stolen dispute charge fraud card dispute"};
  for (int i = 0; i < 24; ++i) {
    csv += std::to_string(1000 + i) + ",Lending,\"" + topics[i % 2] + "\"\n";
  }
  return csv;
}

std::string pairs_csv() {
  return "word_a,word_b,score\n"
         "loan,payment,0.9\n"
         "fraud,card,0.85\n"
         "loan,fraud,0.1\n"
         "bank,dispute,0.2\n"
         "payment,interest,0.7\n";
}

std::string full_config(const TempDir& dir) {
  return "# demo run\n"
         "[corpus]\n"
         "input_csv = " + dir.file("complaints.csv") + "\n"
         "seed = 7\n"
         "[cooc]\n"
         "window = 3\n"
         "min_count = 1\n"
         "[model lsa_base]\n"
         "technique = lsa\n"
         "dim = 4\n"
         "[model glove_small]\n"
         "technique = glove\n"
         "dim = 4\n"
         "iterations = 15\n"
         "[model codes]\n"
         "technique = autoencoder\n"
         "input = lsa_base\n"
         "dim = 2\n"
         "iterations = 30\n"
         "batch_size = 8\n"
         "[model cbow_small]\n"
         "technique = cbow\n"
         "dim = 4\n"
         "window = 3\n"
         "iterations = 3\n"
         "[model pretrained]\n"
         "technique = import\n"
         "path = " + dir.file("external.vec") + "\n"
         "[eval]\n"
         "pairs_file = " + dir.file("pairs.csv") + "\n"
         "neighbor_queries = loan, fraud\n"
         "neighbor_k = 3\n"
         "projection_words = loan, payment, fraud, card\n"
         "kmeans_k = 2\n"
         "[output]\n"
         "dir = " + dir.file("out") + "\n"
         "threads = 1\n";
}

}  // namespace

TEST_CASE("config parsing fills every section") {
  TempDir dir("pipe_parse");
  write_file(dir.file("run.cfg"),
             "[corpus]\n"
             "input_csv = data.csv\n"
             "narrative_column = Story\n"
             "id_column = Ref\n"
             "stopword_file = stop.txt\n"
             "sample_fraction = 0.25\n"
             "seed = 42\n"
             "; comment styles\n"
             "[cooc]\n"
             "window = 5\n"
             "min_count = 2\n"
             "max_vocab = 1000\n"
             "[model first]\n"
             "technique = lsa\n"
             "dim = 50\n"
             "seed = 3\n"
             "[eval]\n"
             "pairs_file = pairs.csv\n"
             "neighbor_queries = fee,loan\n"
             "neighbor_k = 8\n"
             "projection_words = a, b\n"
             "kmeans_k = 4\n"
             "agreement_threshold = 0.75\n"
             "[output]\n"
             "dir = out\n"
             "threads = 2\n");
  const auto cfg = parse_pipeline_config(dir.file("run.cfg"));
  CHECK(cfg.input_csv == "data.csv");
  CHECK(cfg.narrative_column == "Story");
  CHECK(cfg.id_column == "Ref");
  CHECK(cfg.stopword_file == "stop.txt");
  CHECK(cfg.sample_fraction == 0.25);
  CHECK(cfg.seed == 42);
  CHECK(cfg.window == 5);
  CHECK(cfg.min_count == 2);
  REQUIRE(cfg.max_vocab.has_value());
  CHECK(*cfg.max_vocab == 1000);
  REQUIRE(cfg.models.size() == 1);
  CHECK(cfg.models[0].name == "first");
  CHECK(cfg.models[0].technique == "lsa");
  CHECK(cfg.models[0].config.dim == 50);
  CHECK(cfg.models[0].config.seed == 3);
  CHECK(cfg.pairs_file == "pairs.csv");
  CHECK(cfg.neighbor_queries == std::vector<std::string>{"fee", "loan"});
  CHECK(cfg.neighbor_k == 8);
  CHECK(cfg.projection_words == std::vector<std::string>{"a", "b"});
  CHECK(cfg.kmeans_k == 4);
  CHECK(cfg.agreement_threshold == 0.75);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.threads == 2);
}

TEST_CASE("techniques carry their own training defaults") {
  TempDir dir("pipe_defaults");
  write_file(dir.file("run.cfg"),
             "[model g]\ntechnique = glove\n"
             "[model a]\ntechnique = autoencoder\ninput = g\n"
             "[model c]\ntechnique = cbow\n"
             "[model c2]\ntechnique = cbow\nlearning_rate = 0.1\n");
  const auto cfg = parse_pipeline_config(dir.file("run.cfg"));
  REQUIRE(cfg.models.size() == 4);
  CHECK(cfg.models[0].config.learning_rate == 0.05);
  CHECK(cfg.models[0].config.max_iterations == 100);
  CHECK(cfg.models[1].config.dim == 2);
  CHECK(cfg.models[1].config.learning_rate == 1e-3);
  CHECK(cfg.models[1].config.max_iterations == 200);
  CHECK(cfg.models[2].config.learning_rate == 0.025);
  CHECK(cfg.models[2].config.max_iterations == 5);
  CHECK(cfg.models[3].config.learning_rate == 0.1);  // override wins
}

TEST_CASE("config parse errors carry line numbers") {
  TempDir dir("pipe_badcfg");
  auto expect_error = [&](const std::string& content,
                          const std::string& fragment) {
    write_file(dir.file("bad.cfg"), content);
    try {
      parse_pipeline_config(dir.file("bad.cfg"));
      FAIL("expected ArgumentError");
    } catch (const ArgumentError& err) {
      CHECK(std::string(err.what()).find(fragment) != std::string::npos);
    }
  };
  expect_error("[corpus]\nbogus = 1\n", "line 2");
  expect_error("[nosuch]\n", "unknown section");
  expect_error("[corpus]\nnot a pair\n", "key=value");
  expect_error("stray = 1\n", "outside any section");
  expect_error("[corpus\n", "unterminated");
  expect_error("[model ]\n", "needs a name");
  expect_error("[model m]\ndim = 4\n", "technique");
  expect_error("[corpus]\nsample_fraction = lots\n", "bad value");
  expect_error("[model m]\ntechnique = glove\noov_policy = maybe\n",
               "bad value");
}

TEST_CASE("config validation fails fast") {
  TempDir dir("pipe_validate");
  write_file(dir.file("in.csv"), "Complaint ID,Consumer complaint narrative\n");
  write_file(dir.file("ext.vec"), "a 1 2\n");

  PipelineConfig base;
  base.input_csv = dir.file("in.csv");
  base.out_dir = dir.file("out");
  CHECK_NOTHROW(validate_pipeline_config(base));

  auto broken = [&](auto mutate) {
    PipelineConfig cfg = base;
    mutate(cfg);
    CHECK_THROWS_AS(validate_pipeline_config(cfg), ArgumentError);
  };
  broken([&](PipelineConfig& c) { c.input_csv.clear(); });
  broken([&](PipelineConfig& c) { c.input_csv = dir.file("nope.csv"); });
  broken([&](PipelineConfig& c) { c.out_dir.clear(); });
  broken([&](PipelineConfig& c) { c.sample_fraction = 0.0; });
  broken([&](PipelineConfig& c) { c.sample_fraction = 1.5; });
  broken([&](PipelineConfig& c) { c.window = 0; });
  broken([&](PipelineConfig& c) { c.min_count = 0; });
  broken([&](PipelineConfig& c) { c.kmeans_k = 0; });
  broken([&](PipelineConfig& c) { c.agreement_threshold = 1.5; });
  broken([&](PipelineConfig& c) { c.threads = 0; });
  broken([&](PipelineConfig& c) { c.pairs_file = dir.file("nope.csv"); });

  ModelSpec lsa_model;
  lsa_model.name = "base";
  lsa_model.technique = "lsa";
  broken([&](PipelineConfig& c) {
    c.models = {lsa_model, lsa_model};  // duplicate name
  });
  broken([&](PipelineConfig& c) {
    auto odd = lsa_model;
    odd.technique = "word2vec";
    c.models = {odd};
  });
  broken([&](PipelineConfig& c) {
    ModelSpec ae;
    ae.name = "codes";
    ae.technique = "autoencoder";
    ae.config.dim = 2;
    c.models = {ae};  // no input model named
  });
  broken([&](PipelineConfig& c) {
    ModelSpec ae;
    ae.name = "codes";
    ae.technique = "autoencoder";
    ae.config.dim = 2;
    ae.input_model = "base";
    c.models = {ae, lsa_model};  // input defined only later
  });
  broken([&](PipelineConfig& c) {
    ModelSpec glove_model = lsa_model;
    glove_model.name = "g";
    glove_model.technique = "glove";
    ModelSpec ae;
    ae.name = "codes";
    ae.technique = "autoencoder";
    ae.config.dim = 2;
    ae.input_model = "g";  // not an lsa model
    c.models = {glove_model, ae};
  });
  broken([&](PipelineConfig& c) {
    ModelSpec imp;
    imp.name = "ext";
    imp.technique = "import";
    c.models = {imp};  // no path
  });
  broken([&](PipelineConfig& c) {
    ModelSpec imp;
    imp.name = "ext";
    imp.technique = "import";
    imp.path = dir.file("nope.vec");
    c.models = {imp};
  });

  PipelineConfig ok = base;
  ModelSpec imp;
  imp.name = "ext";
  imp.technique = "import";
  imp.path = dir.file("ext.vec");
  ok.models = {lsa_model, imp};
  CHECK_NOTHROW(validate_pipeline_config(ok));
}

TEST_CASE("the pipeline runs end to end and is idempotent") {
  TempDir dir("pipe_run");
  write_file(dir.file("complaints.csv"), complaint_csv());
  write_file(dir.file("pairs.csv"), pairs_csv());
  write_file(dir.file("external.vec"),
             "loan 0.1 0.2 0.3\n"
             "payment 0.2 0.1 0.3\n"
             "fraud -0.4 0.5 0.1\n"
             "card -0.3 0.4 0.2\n");
  write_file(dir.file("run.cfg"), full_config(dir));

  const auto cfg = parse_pipeline_config(dir.file("run.cfg"));
  run_pipeline(cfg);

  const fs::path out(dir.file("out"));
  for (const char* name :
       {"corpus.txt", "corpus_stats.txt", "cooc_counts.tsv",
        "cooc_counts.tsv.vocab", "cooc_ppmi.tsv", "cooc_ppmi.tsv.vocab",
        "lsa_base.vec", "glove_small.vec", "codes.vec", "cbow_small.vec",
        "pretrained.vec", "glove_small_loss.csv", "codes_loss.csv",
        "cbow_small_loss.csv", "eval_spearman.csv", "run_summary.txt",
        "lsa_base_agreement.csv", "cbow_small_agreement.csv"}) {
    CAPTURE(name);
    CHECK(fs::exists(out / name));
  }
  CHECK(!fs::exists(out / "INCOMPLETE"));
  CHECK(!fs::exists(out / "lsa_base_loss.csv"));  // lsa has no loss curve

  // Two neighbor queries per model; spot-check one pair of files.
  CHECK(fs::exists(out / "lsa_base_neighbors_loan.csv"));
  CHECK(fs::exists(out / "glove_small_neighbors_fraud.csv"));
  CHECK(fs::exists(out / "lsa_base_projection.csv"));

  const auto stats = read_file((out / "corpus_stats.txt").string());
  CHECK(stats.find("num_documents=24") != std::string::npos);
  const auto summary = read_file((out / "run_summary.txt").string());
  CHECK(summary.find("documents=24") != std::string::npos);
  CHECK(summary.find("vocabulary=") != std::string::npos);

  const auto spearman_csv = read_file((out / "eval_spearman.csv").string());
  CHECK(spearman_csv.rfind("model,dim,spearman", 0) == 0);
  CHECK(std::count(spearman_csv.begin(), spearman_csv.end(), '\n') == 6);

  // A second run over the same directory succeeds and leaves no marker.
  run_pipeline(cfg);
  CHECK(!fs::exists(out / "INCOMPLETE"));
}

TEST_CASE("a failed stage leaves its marker behind") {
  TempDir dir("pipe_fail");
  write_file(dir.file("complaints.csv"),
             "Complaint ID,Body\n1001,\"text here\"\n");
  PipelineConfig cfg;
  cfg.input_csv = dir.file("complaints.csv");
  cfg.out_dir = dir.file("out");
  // The narrative column does not exist, so ingestion throws mid-stage.
  CHECK_THROWS_AS(run_pipeline(cfg), SchemaError);
  CHECK(read_file(dir.file("out") + "/INCOMPLETE") == "corpus\n");
}
