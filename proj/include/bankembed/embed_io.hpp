#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bankembed/cooc.hpp"
#include "bankembed/embedding.hpp"

namespace bankembed {

// Text format: optional header `<count> <dim>`, then `word v1 ... vk`,
// single spaces, 9 significant digits, UTF-8, LF endings. A superset of
// the two dominant public pretrained-vector layouts.
void write_embeddings(const EmbeddingMatrix& e, const std::string& path,
                      bool header = true);
EmbeddingMatrix read_embeddings(const std::string& path);

// Key=value sidecar describing how an embedding was produced, enough to
// regenerate it: technique tag plus every training parameter.
void write_provenance(const EmbeddingMatrix& e, const std::string& path);

enum class OovPolicy { skip, zero };

struct ImportReport {
  std::size_t requested = 0;     // vocabulary size
  std::size_t found = 0;         // vocabulary words present in the file
  std::vector<std::string> oov;  // missing words, vocabulary order
  int dim = 0;                   // detected dimensionality
};

// Aligns an external embedding file to `vocab` (rows in vocabulary order).
// Missing words get zero rows; under OovPolicy::skip they are additionally
// excluded from downstream pair scoring and neighbor queries, which treat
// zero-norm rows as unscoreable.
std::pair<EmbeddingMatrix, ImportReport> import_external(
    const std::string& path, const Vocabulary& vocab,
    OovPolicy policy = OovPolicy::skip);

// Triplet TSV `i<TAB>j<TAB>value` with i <= j after a metadata line
// `#dim=<n> kind=<weighted_counts|ppmi> window=<d>`, plus a sidecar
// vocabulary file `<path>.vocab` with `word<TAB>count` per line.
void save_cooccurrence(const CooccurrenceMatrix& m, const Vocabulary& vocab,
                       const std::string& path);

struct LoadedCooccurrence {
  CooccurrenceMatrix matrix;
  std::optional<Vocabulary> vocab;  // set when the sidecar is present
};

LoadedCooccurrence load_cooccurrence(const std::string& path);

void save_vocab_file(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab_file(const std::string& path);

}  // namespace bankembed
