#include "bankembed/corpus.hpp"

#include <sstream>

#include "bankembed/csv.hpp"
#include "bankembed/error.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bankembed;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("tokenize lowercases and drops stop words") {
  const auto cfg = default_tokenizer_config();
  CHECK(tokenize("I paid my late fees.", cfg) ==
        std::vector<std::string>{"paid", "late", "fees"});
}

TEST_CASE("tokenize strips redaction masks") {
  const auto cfg = default_tokenizer_config();
  CHECK(tokenize("On XXXX/XXXX/2019 XXXX charged me", cfg) ==
        std::vector<std::string>{"charged"});
  // A lone x is a word, not a mask; masks go at any length >= 2.
  CHECK(tokenize("x xx XxXx loan", cfg) ==
        std::vector<std::string>{"x", "loan"});

  TokenizerConfig keep = cfg;
  keep.strip_redaction_masks = false;
  CHECK(tokenize("XXXX charged", keep) ==
        std::vector<std::string>{"xxxx", "charged"});
}

TEST_CASE("tokenize splits on digits, punctuation and non-ASCII") {
  const auto cfg = default_tokenizer_config();
  CHECK(tokenize("loan2x pay-off can't", cfg) ==
        std::vector<std::string>{"loan", "x", "pay"});
  CHECK(tokenize("caf\xC3\xA9 visit", cfg) ==
        std::vector<std::string>{"caf", "visit"});
  CHECK(tokenize("", cfg).empty());
  CHECK(tokenize("123 !!! \t\n", cfg).empty());
}

TEST_CASE("tokenize with custom stop words") {
  TokenizerConfig cfg;
  cfg.stopwords = {"bank"};
  CHECK(tokenize("The Bank charged fees", cfg) ==
        std::vector<std::string>{"the", "charged", "fees"});
}

TEST_CASE("load_stopwords trims, lowercases and skips blanks") {
  TempDir dir("stopwords");
  write_file(dir.file("sw.txt"), "  The \n\nBANK\r\nfee\n");
  const auto words = load_stopwords(dir.file("sw.txt"));
  CHECK(words == std::unordered_set<std::string>{"the", "bank", "fee"});
  CHECK_THROWS_AS(load_stopwords(dir.file("missing.txt")), IoError);
}

namespace {

std::vector<std::vector<std::string>> read_all_rows(const std::string& text,
                                                    int* bad_rows = nullptr) {
  std::istringstream in(text);
  CsvReader reader(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  std::string error;
  for (;;) {
    auto result = reader.next(&fields, &error);
    if (result == CsvReader::Result::eof) break;
    if (result == CsvReader::Result::bad_row) {
      if (bad_rows) ++*bad_rows;
      continue;
    }
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("csv reader handles quoting") {
  auto rows = read_all_rows(
      "a,b,c\n"
      "\"x,y\",\"he said \"\"hi\"\"\",\"line\nbreak\"\n"
      "plain,,last\r\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] ==
        std::vector<std::string>{"x,y", "he said \"hi\"", "line\nbreak"});
  CHECK(rows[2] == std::vector<std::string>{"plain", "", "last"});
}

TEST_CASE("csv reader reports and skips bad rows") {
  int bad = 0;
  auto rows = read_all_rows(
      "a,b\n"
      "bad\"quote,2\n"
      "\"data\" trailing,2\n"
      "ok,2\n",
      &bad);
  CHECK(bad == 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"ok", "2"});
}

TEST_CASE("csv reader reports unterminated quotes") {
  int bad = 0;
  auto rows = read_all_rows("a,b\n\"never closed,2\n", &bad);
  CHECK(bad == 1);
  CHECK(rows.size() == 1);
}

namespace {

constexpr const char* kComplaintHeader =
    "Date received,Product,Consumer complaint narrative,Complaint ID\n";

std::string complaint_csv() {
  std::string csv = "\xEF\xBB\xBF";  // UTF-8 BOM, as in real exports
  csv += kComplaintHeader;
  csv += "2019-01-02,Mortgage,\"I paid my late fees.\",1001\n";
  csv += "2019-01-03,Card,\"  \",1002\n";                    // blank narrative
  csv += "2019-01-04,Card,\"On XXXX XXXX charged me\",1003\n";
  csv += "2019-01-05,Card,bad\"quote,1004\n";                // malformed
  csv += "2019-01-06,Card,short row\n";                      // wrong arity
  csv += "2019-01-07,Card,duplicate id,1001\n";              // dup id
  csv += "\n";                                               // blank line
  csv += "2019-01-08,Loan,payment plan issue,1005\n";
  return csv;
}

}  // namespace

TEST_CASE("ingest_complaints tallies and skips dirty rows") {
  TempDir dir("ingest");
  write_file(dir.file("complaints.csv"), complaint_csv());

  const auto result =
      ingest_complaints(dir.file("complaints.csv"),
                        "Consumer complaint narrative",
                        default_tokenizer_config());
  CHECK(result.skipped_empty == 1);
  CHECK(result.skipped_malformed == 3);
  REQUIRE(result.store.size() == 3);
  CHECK(result.store[0].id == "1001");
  CHECK(result.store[0].tokens ==
        std::vector<std::string>{"paid", "late", "fees"});
  CHECK(result.store[1].id == "1003");
  CHECK(result.store[1].tokens == std::vector<std::string>{"charged"});
  CHECK(result.store[2].id == "1005");
  CHECK(result.store[2].tokens ==
        std::vector<std::string>{"payment", "plan", "issue"});
}

TEST_CASE("ingest_complaints falls back to row ordinals without an id column") {
  TempDir dir("ingest_noid");
  write_file(dir.file("c.csv"),
             "narrative\nfirst complaint text\nsecond complaint text\n");
  const auto result = ingest_complaints(dir.file("c.csv"), "narrative",
                                        default_tokenizer_config());
  REQUIRE(result.store.size() == 2);
  CHECK(result.store[0].id == "1");
  CHECK(result.store[1].id == "2");
}

TEST_CASE("ingest_complaints rejects a missing narrative column") {
  TempDir dir("ingest_badcol");
  write_file(dir.file("c.csv"), "a,b\n1,2\n");
  CHECK_THROWS_AS(ingest_complaints(dir.file("c.csv"), "narrative",
                                    default_tokenizer_config()),
                  SchemaError);
  CHECK_THROWS_AS(ingest_complaints(dir.file("absent.csv"), "narrative",
                                    default_tokenizer_config()),
                  IoError);
}

TEST_CASE("document store rejects duplicate ids") {
  CHECK_THROWS_AS(DocumentStore({{"a", {}}, {"a", {}}}, "src"), SchemaError);
}

TEST_CASE("sample size is round(fraction * size)") {
  std::vector<Document> docs;
  for (int i = 0; i < 1000; ++i) {
    docs.push_back({std::to_string(i), {"w"}});
  }
  const DocumentStore store(std::move(docs), "src");
  CHECK(sample(store, 0.05, 7).size() == 50);
  CHECK(sample(store, 1.0, 7).size() == 1000);
  CHECK(sample(store, 0.0, 7).size() == 0);
  CHECK_THROWS_AS(sample(store, 1.5, 7), ArgumentError);
  CHECK_THROWS_AS(sample(store, -0.1, 7), ArgumentError);
}

TEST_CASE("sample is deterministic and order preserving") {
  std::vector<Document> docs;
  for (int i = 0; i < 100; ++i) {
    docs.push_back({std::to_string(i), {"w"}});
  }
  const DocumentStore store(std::move(docs), "src");

  const auto a = sample(store, 0.3, 42);
  const auto b = sample(store, 0.3, 42);
  REQUIRE(a.size() == 30);
  int prev = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    const int id = std::stoi(a[i].id);
    CHECK(id > prev);  // original order kept
    prev = id;
  }

  const auto c = sample(store, 0.3, 43);
  bool differs = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].id != a[i].id) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("corpus_stats counts tokens, vocabulary and short documents") {
  std::vector<std::string> long_doc(250, "word");
  const auto store = testutil::make_store(
      {{"late", "fees", "late"}, long_doc, {"charged"}});
  const auto stats = corpus_stats(store);
  CHECK(stats.num_documents == 3);
  CHECK(stats.total_words == 254);
  CHECK(stats.vocabulary_size == 4);
  CHECK(stats.num_short_documents == 2);
}

TEST_CASE("store save/load round trip") {
  TempDir dir("store");
  const auto store =
      testutil::make_store({{"paid", "late"}, {}, {"charged"}});
  save_store(store, dir.file("corpus.txt"));
  const auto loaded = load_store(dir.file("corpus.txt"));
  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded[i].id == store[i].id);
    CHECK(loaded[i].tokens == store[i].tokens);
  }
}

TEST_CASE("load_store rejects lines without a tab") {
  TempDir dir("storebad");
  write_file(dir.file("corpus.txt"), "doc0 no tab here\n");
  CHECK_THROWS_AS(load_store(dir.file("corpus.txt")), FormatError);
}

TEST_CASE("write_corpus_stats emits key=value lines") {
  TempDir dir("stats");
  CorpusStats stats;
  stats.num_documents = 2;
  stats.total_words = 5;
  stats.vocabulary_size = 4;
  stats.num_short_documents = 2;
  write_corpus_stats(stats, dir.file("stats.txt"), 1, 3);
  CHECK(testutil::read_file(dir.file("stats.txt")) ==
        "num_documents=2\ntotal_words=5\nvocabulary_size=4\n"
        "num_short_documents=2\nskipped_empty=1\nskipped_malformed=3\n");
}
