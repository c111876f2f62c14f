// Exercises the command line binary end to end: exit codes, flag
// spellings, and the artifacts each subcommand leaves behind.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;
std::string bin;
fs::path dir;
std::string log_path;

void note_failure(const std::string& what) {
  ++failures;
  std::cerr << "FAILED: " << what << "\n";
  std::ifstream log(log_path, std::ios::binary);
  std::ostringstream buf;
  buf << log.rdbuf();
  if (!buf.str().empty()) std::cerr << "  output: " << buf.str();
}

void check(bool ok, const std::string& what) {
  if (!ok) note_failure(what);
}

int run(const std::string& args) {
  const std::string cmd = bin + " " + args + " >" + log_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

void expect_exit(int want, const std::string& args) {
  const int got = run(args);
  if (got != want) {
    note_failure("`" + args + "` exited " + std::to_string(got) +
                 ", wanted " + std::to_string(want));
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

bool contains(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

std::string p(const std::string& name) { return (dir / name).string(); }

const char* kComplaints =
    "Complaint ID,Product,Consumer complaint narrative\n"
    "1,Mortgage,loan payment interest escrow mortgage refinance loan payment "
    "interest escrow\n"
    "2,Mortgage,payment loan escrow interest refinance mortgage payment loan "
    "escrow interest\n"
    "3,Mortgage,interest escrow loan mortgage payment refinance interest "
    "escrow loan mortgage\n"
    "4,Mortgage,mortgage refinance payment loan interest escrow mortgage "
    "refinance payment loan\n"
    "5,Mortgage,escrow interest mortgage refinance loan payment escrow "
    "interest mortgage refinance\n"
    "6,Mortgage,\"refinance mortgage escrow payment interest loan refinance "
    "mortgage escrow payment\"\n"
    "7,Card,fraud card dispute charge account merchant fraud card dispute "
    "charge\n"
    "8,Card,card fraud charge dispute merchant account card fraud charge "
    "dispute\n"
    "9,Card,dispute charge fraud account card merchant dispute charge fraud "
    "account\n"
    "10,Card,account merchant card fraud dispute charge account merchant "
    "card fraud\n"
    "11,Card,charge dispute merchant card account fraud charge dispute "
    "merchant card\n"
    "12,Card,\"merchant account charge fraud card dispute merchant account "
    "charge fraud\"\n";

const char* kPairs =
    "word_a,word_b,score\n"
    "loan,payment,0.9\n"
    "fraud,card,0.85\n"
    "escrow,mortgage,0.8\n"
    "charge,account,0.75\n"
    "loan,fraud,0.1\n"
    "interest,dispute,0.05\n"
    "payment,card,0.15\n";

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_contract <path to bankembed binary>\n";
    return 2;
  }
  bin = argv[1];
  dir = fs::temp_directory_path() /
        ("bankembed_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  log_path = p("command.log");

  // Help and version succeed.
  expect_exit(0, "--version");
  expect_exit(0, "--help");
  expect_exit(0, "ingest --help");
  expect_exit(0, "train lsa --help");

  // Usage errors exit 2.
  expect_exit(2, "");
  expect_exit(2, "no-such-command");
  expect_exit(2, "--no-such-flag");
  expect_exit(2, "ingest --out " + p("x.txt"));
  expect_exit(2, "train lsa --k 5 --out " + p("x.vec"));
  expect_exit(2, "eval --models a.vec");
  expect_exit(2, "--log-level bogus ingest --in " + p("complaints.csv") +
                     " --out " + p("x.txt"));

  write_file(dir / "complaints.csv", kComplaints);
  write_file(dir / "pairs.csv", kPairs);

  // Pipeline errors exit 1.
  expect_exit(1, "ingest --in " + p("missing.csv") + " --out " + p("x.txt"));
  write_file(dir / "wrong.csv", "Complaint ID,Body\n1,hello there\n");
  expect_exit(1, "ingest --in " + p("wrong.csv") + " --out " + p("x.txt"));

  // Config errors exit 2.
  expect_exit(2, "run --config " + p("missing.cfg"));
  write_file(dir / "bad.cfg", "[pipeline]\nnot_a_real_key = 3\n");
  expect_exit(2, "run --config " + p("bad.cfg"));

  // Ingest.
  expect_exit(0, "ingest --in " + p("complaints.csv") +
                     " --col 'Consumer complaint narrative' --sample 1.0"
                     " --seed 7 --out " + p("corpus.txt") + " --stats " +
                     p("stats.txt"));
  check(fs::exists(dir / "corpus.txt"), "ingest writes the corpus");
  check(fs::exists(dir / "stats.txt"), "ingest writes stats");
  expect_exit(0, "ingest --in " + p("complaints.csv") +
                     " --col 'Consumer complaint narrative' --out " +
                     p("corpus2.txt"));
  check(fs::exists(dir / "corpus2.stats"), "ingest defaults a stats sidecar");

  // Co-occurrence, including the derived ppmi sibling path.
  expect_exit(0, "cooc --in " + p("corpus.txt") + " --out " +
                     p("counts.tsv") + " --window 5 --min-count 1 --ppmi");
  check(fs::exists(dir / "counts.tsv"), "cooc writes counts");
  check(fs::exists(dir / "counts.tsv.vocab"), "cooc writes the vocab sidecar");
  check(fs::exists(dir / "counts_ppmi.tsv"), "--ppmi derives a sibling path");
  expect_exit(2, "cooc --in " + p("corpus.txt") + " --out " + p("c2.tsv") +
                     " --window 0");

  // Training family.
  expect_exit(0, "train lsa --in " + p("counts_ppmi.tsv") + " --k 4 --out " +
                     p("lsa.vec"));
  check(fs::exists(dir / "lsa.vec"), "lsa writes vectors");
  check(contains(read_file(dir / "lsa.vec.meta"), "technique=lsa"),
        "lsa metadata names the technique");

  expect_exit(0, "train glove --in " + p("counts.tsv") +
                     " --dim 4 --iterations 5 --seed 2 --out " +
                     p("glove.vec"));
  check(fs::exists(dir / "glove.vec.meta"), "glove writes metadata");

  expect_exit(0, "train autoencoder --in " + p("lsa.vec") +
                     " --code 2 --iterations 10 --seed 2 --out " +
                     p("codes.vec") + " --loss-curve " + p("codes_loss.csv"));
  check(starts_with(read_file(dir / "codes_loss.csv"), "iteration,loss"),
        "autoencoder loss curve has a header");

  expect_exit(0, "train cbow --in " + p("corpus.txt") +
                     " --dim 4 --window 3 --iterations 2 --min-count 1"
                     " --seed 3 --out " + p("cbow.vec"));
  check(fs::exists(dir / "cbow.vec"), "cbow writes vectors");

  write_file(dir / "external.vec",
             "loan 0.1 0.2\nfraud 0.3 0.4\nzzz 0.5 0.6\n");
  expect_exit(0, "train import --in " + p("external.vec") + " --vocab " +
                     p("counts.tsv.vocab") + " --out " + p("imported.vec") +
                     " --report " + p("coverage.txt"));
  check(contains(read_file(dir / "coverage.txt"), "found=2"),
        "import reports coverage");

  expect_exit(2, "train lsa --in " + p("counts.tsv") + " --k 0 --out " +
                     p("bad.vec"));

  // Evaluation reports.
  expect_exit(0, "eval --models " + p("lsa.vec") + "," + p("glove.vec") +
                     " --pairs " + p("pairs.csv") + " --neighbors loan --k 3" +
                     " --projection loan,payment,fraud,card" +
                     " --cluster-k 2 --agreement-threshold 0.5 --out " +
                     p("reports"));
  const std::string spearman_csv =
      read_file(dir / "reports" / "eval_spearman.csv");
  check(starts_with(spearman_csv,
                    "model,dim,spearman,pairs_scored,pairs_skipped\n"),
        "spearman report header");
  check(contains(spearman_csv, "lsa,4,"), "spearman report covers lsa");
  check(contains(spearman_csv, "glove,4,"), "spearman report covers glove");
  check(starts_with(read_file(dir / "reports" / "lsa_neighbors_loan.csv"),
                    "rank,word,similarity\n"),
        "neighbor report header");
  check(starts_with(read_file(dir / "reports" / "lsa_projection.csv"),
                    "word,x,y\n"),
        "projection report header");
  check(contains(read_file(dir / "reports" / "lsa_agreement.csv"),
                 "\naccuracy,,"),
        "agreement report carries the accuracy summary");

  // Full pipeline from a config file.
  write_file(dir / "mini.cfg",
             "[corpus]\ninput_csv = " + p("complaints.csv") +
                 "\n[cooc]\nwindow = 3\nmin_count = 1\n"
                 "[model tiny]\ntechnique = lsa\ndim = 3\n"
                 "[output]\ndir = " + p("run_out") + "\nthreads = 1\n");
  expect_exit(0, "run --config " + p("mini.cfg"));
  check(fs::exists(dir / "run_out" / "tiny.vec"), "run trains its models");
  check(fs::exists(dir / "run_out" / "tiny.vec.meta"),
        "run writes model metadata");

  std::error_code ec;
  fs::remove_all(dir, ec);
  if (failures == 0) {
    std::cout << "cli contract: all checks passed\n";
    return 0;
  }
  std::cerr << failures << " check(s) failed\n";
  return 1;
}
