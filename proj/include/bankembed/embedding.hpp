#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "bankembed/cooc.hpp"

namespace bankembed {

struct Provenance {
  std::string tag;  // lsa | glove | autoencoder | cbow | imported
  std::vector<std::pair<std::string, std::string>> params;

  void set(const std::string& key, std::string value);
  const std::string* find(const std::string& key) const;
};

// Dense vocabulary-aligned embedding set: row r is the vector for
// vocabulary word r. Construction rejects non-finite entries and
// row-count mismatches.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(Vocabulary vocab, Eigen::MatrixXd vectors,
                  Provenance provenance);

  std::size_t size() const { return vocab_.size(); }
  int dim() const { return static_cast<int>(vectors_.cols()); }
  const Vocabulary& vocab() const { return vocab_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  Eigen::MatrixXd::ConstRowXpr row(std::size_t i) const {
    return vectors_.row(static_cast<Eigen::Index>(i));
  }
  std::optional<std::uint32_t> index_of(const std::string& word) const {
    return vocab_.index_of(word);
  }
  const Provenance& provenance() const { return provenance_; }

 private:
  Vocabulary vocab_;
  Eigen::MatrixXd vectors_;
  Provenance provenance_;
};

}  // namespace bankembed
