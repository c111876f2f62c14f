#include <cmath>
#include <numeric>

#include "bankembed/error.hpp"
#include "bankembed/log.hpp"
#include "bankembed/rng.hpp"
#include "bankembed/train.hpp"
#include "train_detail.hpp"

namespace bankembed {

namespace {

struct Adam {
  explicit Adam(Eigen::Index rows, Eigen::Index cols)
      : m(Eigen::MatrixXd::Zero(rows, cols)),
        v(Eigen::MatrixXd::Zero(rows, cols)) {}

  void step(Eigen::MatrixXd* param, const Eigen::MatrixXd& grad, double lr,
            long t) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    param->noalias() -=
        (lr / c1) * m.cwiseQuotient(((v / c2).cwiseSqrt().array() + eps)
                                        .matrix());
  }

  Eigen::MatrixXd m, v;
};

Eigen::MatrixXd glorot_init(Eigen::Index rows, Eigen::Index cols, Rng* rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      w(r, c) = (2.0 * rng->next_double() - 1.0) * limit;
    }
  }
  return w;
}

}  // namespace

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) throw DegenerateInputError("no rows to standardize");
  Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd variance =
      (x.rowwise() - mean).array().square().colwise().mean();
  Eigen::RowVectorXd scale = variance.array().sqrt();
  for (Eigen::Index c = 0; c < scale.size(); ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
  }
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

double autoencoder_loss(const Eigen::MatrixXd& x, const AutoencoderParams& p,
                        AutoencoderParams* grad) {
  const auto n = static_cast<double>(x.rows());
  Eigen::MatrixXd h = (x * p.enc_w).rowwise() + p.enc_b;
  Eigen::MatrixXd recon = (h * p.dec_w).rowwise() + p.dec_b;
  Eigen::MatrixXd residual = recon - x;
  const double loss = residual.squaredNorm() / n;

  if (grad) {
    Eigen::MatrixXd d_recon = (2.0 / n) * residual;
    grad->dec_w = h.transpose() * d_recon;
    grad->dec_b = d_recon.colwise().sum();
    Eigen::MatrixXd d_h = d_recon * p.dec_w.transpose();
    grad->enc_w = x.transpose() * d_h;
    grad->enc_b = d_h.colwise().sum();
  }
  return loss;
}

TrainResult train_autoencoder(const EmbeddingMatrix& input,
                              const TrainConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = input.vectors().rows();
  const Eigen::Index d_in = input.vectors().cols();
  const Eigen::Index d_code = cfg.dim;
  if (n == 0) throw DegenerateInputError("no input rows");
  if (d_code >= d_in) {
    throw ArgumentError("code width " + std::to_string(cfg.dim) +
                        " must be smaller than the input dimensionality " +
                        std::to_string(d_in));
  }

  const Eigen::MatrixXd x = standardize_columns(input.vectors());

  Rng rng(cfg.seed);
  AutoencoderParams p;
  p.enc_w = glorot_init(d_in, d_code, &rng);
  p.enc_b = Eigen::RowVectorXd::Zero(d_code);
  p.dec_w = glorot_init(d_code, d_in, &rng);
  p.dec_b = Eigen::RowVectorXd::Zero(d_in);

  Adam adam_enc_w(d_in, d_code), adam_dec_w(d_code, d_in);
  Adam adam_enc_b(1, d_code), adam_dec_b(1, d_in);

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  detail::EarlyStop stop(cfg.tolerance);
  long t = 0;
  for (int epoch = 0; epoch < cfg.max_iterations; ++epoch) {
    rng.shuffle(order);
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index size =
          std::min<Eigen::Index>(cfg.batch_size, n - start);
      Eigen::MatrixXd batch(size, d_in);
      for (Eigen::Index r = 0; r < size; ++r) {
        batch.row(r) = x.row(order[start + r]);
      }
      AutoencoderParams grad;
      autoencoder_loss(batch, p, &grad);
      ++t;
      adam_enc_w.step(&p.enc_w, grad.enc_w, cfg.learning_rate, t);
      adam_dec_w.step(&p.dec_w, grad.dec_w, cfg.learning_rate, t);
      Eigen::MatrixXd eb = p.enc_b, db = p.dec_b;
      adam_enc_b.step(&eb, grad.enc_b, cfg.learning_rate, t);
      adam_dec_b.step(&db, grad.dec_b, cfg.learning_rate, t);
      p.enc_b = eb;
      p.dec_b = db;
    }
    const double loss = autoencoder_loss(x, p);
    if (!std::isfinite(loss)) {
      throw NumericError("autoencoder loss diverged at epoch " +
                         std::to_string(epoch + 1));
    }
    result.loss_curve.push_back(loss);
    if (stop.update(loss)) {
      log_info("autoencoder converged after " + std::to_string(epoch + 1) +
               " epochs");
      break;
    }
  }

  Eigen::MatrixXd codes = (x * p.enc_w).rowwise() + p.enc_b;
  Provenance prov;
  prov.tag = "autoencoder";
  prov.set("dim", std::to_string(cfg.dim));
  prov.set("input_dim", std::to_string(d_in));
  prov.set("iterations", std::to_string(result.loss_curve.size()));
  prov.set("learning_rate", std::to_string(cfg.learning_rate));
  prov.set("batch_size", std::to_string(cfg.batch_size));
  prov.set("seed", std::to_string(cfg.seed));
  result.embedding =
      EmbeddingMatrix(input.vocab(), std::move(codes), std::move(prov));
  return result;
}

}  // namespace bankembed
