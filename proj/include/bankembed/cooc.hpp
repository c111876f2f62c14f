#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bankembed/corpus.hpp"

namespace bankembed {

// Bidirectional word <-> index map with corpus frequencies. Vocabularies
// built from counts are ordered by descending frequency with lexicographic
// tie-break, so "top-k" is well defined; vocabularies built from an
// explicit word list (e.g. an embedding file) keep the supplied order.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary from_counts(
      const std::unordered_map<std::string, std::int64_t>& counts,
      std::int64_t min_count,
      std::optional<std::size_t> max_size = std::nullopt);
  static Vocabulary from_words(const std::vector<std::string>& words,
                               std::vector<std::int64_t> counts = {});

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t index) const { return words_[index]; }
  std::optional<std::uint32_t> index_of(const std::string& word) const;
  bool contains(const std::string& word) const;
  std::int64_t count(std::size_t index) const { return counts_[index]; }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Every token with corpus frequency >= min_count, truncated to the
// max_size most frequent when given.
Vocabulary build_vocabulary(const DocumentStore& store,
                            std::int64_t min_count = 5,
                            std::optional<std::size_t> max_size = std::nullopt);

enum class CoocKind { weighted_counts, ppmi };

const char* to_string(CoocKind kind);
std::optional<CoocKind> cooc_kind_from_string(const std::string& s);

struct CoocEntry {
  std::uint32_t i;  // i <= j
  std::uint32_t j;
  double value;
};

// Square sparse symmetric matrix. Mass for an unordered pair is stored once
// under the key (min(i,j), max(i,j)); the logical cell (i,j) and its mirror
// both read that value.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix() = default;
  CooccurrenceMatrix(std::size_t dim, CoocKind kind, int window = 0);

  void add(std::uint32_t i, std::uint32_t j, double value);
  double at(std::uint32_t i, std::uint32_t j) const;  // 0.0 when absent

  std::size_t dim() const { return dim_; }
  CoocKind kind() const { return kind_; }
  int window() const { return window_; }
  std::size_t stored_size() const { return cells_.size(); }

  // Upper-triangle triplets sorted by (i, j).
  std::vector<CoocEntry> entries() const;
  // Sum over the full symmetric matrix (off-diagonal mass counted twice).
  double sum() const;

 private:
  std::size_t dim_ = 0;
  CoocKind kind_ = CoocKind::weighted_counts;
  int window_ = 0;
  std::unordered_map<std::uint64_t, double> cells_;
};

// Distance-weighted counting: every unordered token pair at distance
// n in [1, window] inside one document adds (window + 1 - n) / window.
// Out-of-vocabulary tokens contribute nothing but keep their positions, so
// distances are measured on the original sequence. Windows never cross
// document boundaries.
CooccurrenceMatrix build_cooccurrence(const DocumentStore& store,
                                      const Vocabulary& vocab, int window,
                                      int threads = 1);

// Probability normalization of the counts, for diagnostics and tests.
struct PpmiMarginals {
  double total = 0.0;
  std::vector<double> row;  // p_i* per row; rows sum to 1
};

// Positive pointwise mutual information: keeps ln(p_ij / (p_i* p_*j))
// where positive, omits every other cell. Symmetry is preserved.
CooccurrenceMatrix apply_ppmi(const CooccurrenceMatrix& counts,
                              PpmiMarginals* marginals = nullptr);

// First k words of the vocabulary ordering.
std::vector<std::string> top_k_words(const Vocabulary& vocab, std::size_t k);

// n distinct unordered pairs sampled uniformly without replacement,
// no self-pairs, deterministic under seed.
std::vector<std::pair<std::string, std::string>> generate_word_pairs(
    const std::vector<std::string>& words, std::size_t n, std::uint64_t seed);

struct WordPair {
  std::string a;
  std::string b;
  double score;  // human relatedness in [0, 1]
};

struct WordPairDataset {
  std::vector<WordPair> records;
  std::size_t size() const { return records.size(); }
};

struct WordPairLoad {
  WordPairDataset dataset;
  std::vector<std::size_t> oov_record_indices;  // pairs touching an OOV word
  std::vector<std::string> oov_words;           // distinct, first-seen order
};

// CSV `word_a,word_b,score` (or per-annotator `...,score1,score2,score3`,
// averaged), header required. Scores outside [0, 1], self-pairs, duplicate
// unordered pairs and unparseable lines raise FormatError with the line
// number. When a vocabulary is given, pairs touching OOV words stay in the
// dataset and are reported.
WordPairLoad load_word_pairs(const std::string& path,
                             const Vocabulary* vocab = nullptr);

}  // namespace bankembed
