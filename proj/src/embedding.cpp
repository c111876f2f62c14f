#include "bankembed/embedding.hpp"

#include "bankembed/error.hpp"

namespace bankembed {

void Provenance::set(const std::string& key, std::string value) {
  for (auto& [k, v] : params) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  params.emplace_back(key, std::move(value));
}

const std::string* Provenance::find(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

EmbeddingMatrix::EmbeddingMatrix(Vocabulary vocab, Eigen::MatrixXd vectors,
                                 Provenance provenance)
    : vocab_(std::move(vocab)),
      vectors_(std::move(vectors)),
      provenance_(std::move(provenance)) {
  if (static_cast<std::size_t>(vectors_.rows()) != vocab_.size()) {
    throw ArgumentError("embedding rows do not match vocabulary size");
  }
  if (!vectors_.allFinite()) {
    throw NumericError("embedding contains non-finite values");
  }
}

}  // namespace bankembed
