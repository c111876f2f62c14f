#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace bankembed {

struct Document {
  std::string id;
  std::vector<std::string> tokens;  // lowercase, filtered, in text order
};

// Ordered, immutable-after-construction collection of tokenized narratives.
// Iteration order is ingestion order; ids are unique.
class DocumentStore {
 public:
  DocumentStore() = default;
  DocumentStore(std::vector<Document> documents, std::string source);

  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }
  const std::string& source() const { return source_; }

 private:
  std::vector<Document> documents_;
  std::string source_;
};

struct TokenizerConfig {
  // Matched against tokens after lowercasing.
  std::unordered_set<std::string> stopwords;
  // Drop tokens that are runs of two or more 'x' (CFPB redaction masks).
  bool strip_redaction_masks = true;
};

// The shipped list of common English function words.
const std::vector<std::string>& builtin_stopwords();
TokenizerConfig default_tokenizer_config();
// One word per line, UTF-8; lines are trimmed and lowercased.
std::unordered_set<std::string> load_stopwords(const std::string& path);

// Lowercases, splits into maximal alphabetic runs (digits, punctuation and
// any non-ASCII byte separate tokens), then removes stop words and
// redaction masks. Order is preserved.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config);

struct IngestResult {
  DocumentStore store;
  std::size_t skipped_empty = 0;      // rows whose narrative was blank
  std::size_t skipped_malformed = 0;  // unparseable rows, wrong arity, duplicate ids
};

// Reads a CSV with a header row, tokenizing the narrative column of every
// row whose narrative is non-empty after trimming. Document ids come from
// `id_column` when present, otherwise from the row ordinal. Dirty rows are
// skipped and tallied, never fatal.
IngestResult ingest_complaints(const std::string& path,
                               const std::string& narrative_column,
                               const TokenizerConfig& config,
                               const std::string& id_column = "Complaint ID");

// Uniform document sample without replacement of round(fraction * size)
// documents. Deterministic in (store, fraction, seed); selected documents
// keep their original relative order.
DocumentStore sample(const DocumentStore& store, double fraction,
                     std::uint64_t seed);

struct CorpusStats {
  std::size_t num_documents = 0;
  std::size_t total_words = 0;          // post-filter tokens
  std::size_t vocabulary_size = 0;      // distinct tokens
  std::size_t num_short_documents = 0;  // fewer than 200 tokens
};

CorpusStats corpus_stats(const DocumentStore& store);

// One document per line: `<id><TAB><space-joined tokens>`, UTF-8, LF.
void save_store(const DocumentStore& store, const std::string& path);
DocumentStore load_store(const std::string& path);

// Flat key=value text.
void write_corpus_stats(const CorpusStats& stats, const std::string& path,
                        std::size_t skipped_empty = 0,
                        std::size_t skipped_malformed = 0);

}  // namespace bankembed
