#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "bankembed/cooc.hpp"
#include "bankembed/embedding.hpp"

namespace bankembed {

struct TrainConfig {
  int dim = 100;            // embedding (or code) dimensionality
  int max_iterations = 100; // epochs; 0 returns the random initialization
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;  // early stop on relative loss change,
                            // 5 consecutive iterations
  // GloVe
  double x_max = 100.0;
  double alpha = 0.75;
  // Autoencoder
  int batch_size = 256;
  // CBOW
  int window = 10;
  int negative_samples = 5;

  void validate() const;  // throws ArgumentError
};

struct SvdResult {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;  // descending, zero-padded past the rank
  Eigen::MatrixXd v;
};

// Rank-k truncated SVD. Matrices with max(rows, cols) <= dense threshold
// (2000) are factored exactly; larger ones go through a randomized range
// finder with two power iterations and oversampling 10, deterministic
// under seed.
SvdResult truncated_svd(const Eigen::MatrixXd& a, int k, std::uint64_t seed);
SvdResult truncated_svd_dense(const Eigen::MatrixXd& a, int k);
SvdResult truncated_svd_randomized(const Eigen::MatrixXd& a, int k,
                                   std::uint64_t seed, int oversampling = 10,
                                   int power_iterations = 2);
SvdResult truncated_svd_sparse(const CooccurrenceMatrix& m, int k,
                               std::uint64_t seed);

// Row embeddings U_k * sqrt(S_k) of the rank-k truncated SVD.
EmbeddingMatrix lsa(const CooccurrenceMatrix& m, const Vocabulary& vocab,
                    int k, std::uint64_t seed = 1);

struct TrainResult {
  EmbeddingMatrix embedding;
  std::vector<double> loss_curve;  // one value per completed iteration
};

// Weighted least squares over the nonzero cells:
//   J = sum f(X_ij) (w_i . w~_j + b_i + b~_j - ln X_ij)^2,
//   f(x) = min(1, (x / x_max)^alpha),
// with per-coordinate adaptive-gradient updates. Returns w + w~ per word.
TrainResult train_glove(const CooccurrenceMatrix& m, const Vocabulary& vocab,
                        const TrainConfig& cfg);

// Single-hidden-layer linear autoencoder over the input's rows, columns
// standardized first; returns the codes. cfg.dim is the code width and
// must be smaller than the input dimensionality.
TrainResult train_autoencoder(const EmbeddingMatrix& input,
                              const TrainConfig& cfg);

// CBOW with negative sampling: averaged context vectors predict the focus
// word against noise words drawn from the unigram distribution raised to
// 0.75. Returns the input-side vectors. Single-threaded, deterministic
// under seed.
TrainResult train_cbow(const DocumentStore& store, const Vocabulary& vocab,
                       const TrainConfig& cfg);

// --- objective evaluations shared with the finite-difference checks ---

struct GloveParams {
  Eigen::MatrixXd w;      // V x d focus vectors
  Eigen::MatrixXd w_ctx;  // V x d context vectors
  Eigen::VectorXd b;      // V focus biases
  Eigen::VectorXd b_ctx;  // V context biases
};

struct GloveCell {
  std::uint32_t i;
  std::uint32_t j;
  double x;
};

// Directed nonzero cells: both orientations of each off-diagonal entry,
// the diagonal once.
std::vector<GloveCell> glove_cells(const CooccurrenceMatrix& m);

double glove_objective(const std::vector<GloveCell>& cells,
                       const GloveParams& p, double x_max, double alpha,
                       GloveParams* grad = nullptr);

struct AutoencoderParams {
  Eigen::MatrixXd enc_w;     // D_in x D_code
  Eigen::RowVectorXd enc_b;  // D_code
  Eigen::MatrixXd dec_w;     // D_code x D_in
  Eigen::RowVectorXd dec_b;  // D_in
};

// Mean over rows of the squared reconstruction error of x.
double autoencoder_loss(const Eigen::MatrixXd& x, const AutoencoderParams& p,
                        AutoencoderParams* grad = nullptr);

// Per-column standardization (population moments; zero-variance columns
// are centered only). Exposed for the PCA oracle in tests.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x);

// CSV `iteration,loss`, 1-based iterations.
void write_loss_curve(const std::vector<double>& losses,
                      const std::string& path);

}  // namespace bankembed
