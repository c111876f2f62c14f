#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <fstream>

#include "bankembed/error.hpp"
#include "bankembed/log.hpp"
#include "bankembed/rng.hpp"
#include "bankembed/train.hpp"

namespace bankembed {

namespace {

constexpr Eigen::Index kDenseThreshold = 2000;

// Y = A * X for the symmetric sparse matrix held as upper-triangle triplets.
Eigen::MatrixXd symmetric_product(const std::vector<CoocEntry>& entries,
                                  std::size_t dim, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), x.cols());
  for (const auto& e : entries) {
    y.row(e.i) += e.value * x.row(e.j);
    if (e.i != e.j) y.row(e.j) += e.value * x.row(e.i);
  }
  return y;
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() *
         Eigen::MatrixXd::Identity(y.rows(), std::min(y.rows(), y.cols()));
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                Rng* rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng->normal();
  }
  return m;
}

SvdResult truncate_and_pad(const Eigen::MatrixXd& u, const Eigen::VectorXd& s,
                           const Eigen::MatrixXd& v, int k) {
  const Eigen::Index have = std::min<Eigen::Index>(s.size(), k);
  SvdResult out;
  out.u = Eigen::MatrixXd::Zero(u.rows(), k);
  out.u.leftCols(have) = u.leftCols(have);
  out.s = Eigen::VectorXd::Zero(k);
  out.s.head(have) = s.head(have);
  out.v = Eigen::MatrixXd::Zero(v.rows(), k);
  out.v.leftCols(have) = v.leftCols(have);
  return out;
}

void check_svd_args(Eigen::Index rows, Eigen::Index cols, int k) {
  if (k < 1) throw ArgumentError("SVD rank must be >= 1");
  if (rows == 0 || cols == 0) {
    throw DegenerateInputError("cannot factor an empty matrix");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 1) throw ArgumentError("dim must be >= 1");
  if (max_iterations < 0) throw ArgumentError("max_iterations must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw ArgumentError("learning_rate must be > 0");
  }
  if (!(tolerance >= 0.0)) throw ArgumentError("tolerance must be >= 0");
  if (!(x_max > 0.0)) throw ArgumentError("x_max must be > 0");
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be > 0");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (window < 1) throw ArgumentError("window must be >= 1");
  if (negative_samples < 1) {
    throw ArgumentError("negative_samples must be >= 1");
  }
}

SvdResult truncated_svd_dense(const Eigen::MatrixXd& a, int k) {
  check_svd_args(a.rows(), a.cols(), k);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  return truncate_and_pad(svd.matrixU(), svd.singularValues(), svd.matrixV(),
                          k);
}

SvdResult truncated_svd_randomized(const Eigen::MatrixXd& a, int k,
                                   std::uint64_t seed, int oversampling,
                                   int power_iterations) {
  check_svd_args(a.rows(), a.cols(), k);
  const Eigen::Index small = std::min(a.rows(), a.cols());
  const Eigen::Index sketch =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(k) + oversampling,
                             small);

  Rng rng(seed);
  Eigen::MatrixXd q = thin_q(a * gaussian_matrix(a.cols(), sketch, &rng));
  for (int it = 0; it < power_iterations; ++it) {
    q = thin_q(a.transpose() * q);
    q = thin_q(a * q);
  }

  Eigen::MatrixXd b = q.transpose() * a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = q * svd.matrixU();
  return truncate_and_pad(u, svd.singularValues(), svd.matrixV(), k);
}

SvdResult truncated_svd(const Eigen::MatrixXd& a, int k, std::uint64_t seed) {
  if (std::max(a.rows(), a.cols()) <= kDenseThreshold) {
    return truncated_svd_dense(a, k);
  }
  return truncated_svd_randomized(a, k, seed);
}

SvdResult truncated_svd_sparse(const CooccurrenceMatrix& m, int k,
                               std::uint64_t seed) {
  const auto dim = static_cast<Eigen::Index>(m.dim());
  check_svd_args(dim, dim, k);

  if (dim <= kDenseThreshold) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& e : m.entries()) {
      dense(e.i, e.j) = e.value;
      dense(e.j, e.i) = e.value;
    }
    return truncated_svd_dense(dense, k);
  }

  // Randomized range finder using only sparse products; A is symmetric so
  // the power iteration never needs an explicit transpose.
  const auto entries = m.entries();
  const Eigen::Index sketch =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(k) + 10, dim);
  Rng rng(seed);
  Eigen::MatrixXd q = thin_q(
      symmetric_product(entries, m.dim(), gaussian_matrix(dim, sketch, &rng)));
  for (int it = 0; it < 2; ++it) {
    q = thin_q(symmetric_product(entries, m.dim(), q));
    q = thin_q(symmetric_product(entries, m.dim(), q));
  }
  Eigen::MatrixXd b = symmetric_product(entries, m.dim(), q).transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = q * svd.matrixU();
  return truncate_and_pad(u, svd.singularValues(), svd.matrixV(), k);
}

EmbeddingMatrix lsa(const CooccurrenceMatrix& m, const Vocabulary& vocab,
                    int k, std::uint64_t seed) {
  if (vocab.size() != m.dim()) {
    throw ArgumentError("vocabulary/matrix size mismatch");
  }
  if (k < 1) throw ArgumentError("LSA dimension must be >= 1");
  if (m.stored_size() == 0) {
    throw DegenerateInputError("co-occurrence matrix is empty");
  }

  log_info("LSA: factoring " + std::to_string(m.dim()) + "x" +
           std::to_string(m.dim()) + " matrix to rank " + std::to_string(k));
  SvdResult svd = truncated_svd_sparse(m, k, seed);
  Eigen::MatrixXd vectors =
      svd.u * svd.s.cwiseSqrt().asDiagonal();

  Provenance prov;
  prov.tag = "lsa";
  prov.set("dim", std::to_string(k));
  prov.set("seed", std::to_string(seed));
  prov.set("matrix", to_string(m.kind()));
  return EmbeddingMatrix(vocab, std::move(vectors), std::move(prov));
}

void write_loss_curve(const std::vector<double>& losses,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iteration,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", losses[i]);
    out << (i + 1) << ',' << buf << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace bankembed
