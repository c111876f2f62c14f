#include <cmath>
#include <numeric>

#include "bankembed/error.hpp"
#include "bankembed/log.hpp"
#include "bankembed/rng.hpp"
#include "bankembed/train.hpp"
#include "train_detail.hpp"

namespace bankembed {

namespace {

double glove_weight(double x, double x_max, double alpha) {
  return x >= x_max ? 1.0 : std::pow(x / x_max, alpha);
}

}  // namespace

std::vector<GloveCell> glove_cells(const CooccurrenceMatrix& m) {
  std::vector<GloveCell> cells;
  cells.reserve(m.stored_size() * 2);
  for (const auto& e : m.entries()) {
    if (!(e.value > 0.0)) continue;
    cells.push_back({e.i, e.j, e.value});
    if (e.i != e.j) cells.push_back({e.j, e.i, e.value});
  }
  return cells;
}

double glove_objective(const std::vector<GloveCell>& cells,
                       const GloveParams& p, double x_max, double alpha,
                       GloveParams* grad) {
  if (grad) {
    grad->w = Eigen::MatrixXd::Zero(p.w.rows(), p.w.cols());
    grad->w_ctx = Eigen::MatrixXd::Zero(p.w_ctx.rows(), p.w_ctx.cols());
    grad->b = Eigen::VectorXd::Zero(p.b.size());
    grad->b_ctx = Eigen::VectorXd::Zero(p.b_ctx.size());
  }
  double loss = 0.0;
  for (const auto& cell : cells) {
    const double f = glove_weight(cell.x, x_max, alpha);
    const double diff = p.w.row(cell.i).dot(p.w_ctx.row(cell.j)) +
                        p.b(cell.i) + p.b_ctx(cell.j) - std::log(cell.x);
    loss += f * diff * diff;
    if (grad) {
      const double scale = 2.0 * f * diff;
      grad->w.row(cell.i) += scale * p.w_ctx.row(cell.j);
      grad->w_ctx.row(cell.j) += scale * p.w.row(cell.i);
      grad->b(cell.i) += scale;
      grad->b_ctx(cell.j) += scale;
    }
  }
  return loss;
}

TrainResult train_glove(const CooccurrenceMatrix& m, const Vocabulary& vocab,
                        const TrainConfig& cfg) {
  cfg.validate();
  if (m.kind() != CoocKind::weighted_counts) {
    throw ArgumentError("GloVe trains on weighted counts, not " +
                        std::string(to_string(m.kind())));
  }
  if (vocab.size() != m.dim()) {
    throw ArgumentError("vocabulary/matrix size mismatch");
  }
  auto cells = glove_cells(m);
  if (cells.empty()) {
    throw DegenerateInputError("co-occurrence matrix has no positive cells");
  }

  const auto v = static_cast<Eigen::Index>(vocab.size());
  const Eigen::Index d = cfg.dim;
  Rng rng(cfg.seed);
  auto init = [&] { return (rng.next_double() - 0.5) / cfg.dim; };

  GloveParams p;
  p.w.resize(v, d);
  p.w_ctx.resize(v, d);
  p.b.resize(v);
  p.b_ctx.resize(v);
  for (Eigen::Index r = 0; r < v; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) p.w(r, c) = init();
  }
  for (Eigen::Index r = 0; r < v; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) p.w_ctx(r, c) = init();
  }
  for (Eigen::Index r = 0; r < v; ++r) p.b(r) = init();
  for (Eigen::Index r = 0; r < v; ++r) p.b_ctx(r) = init();

  // Adaptive-gradient accumulators; starting at 1 keeps the first steps
  // no larger than the learning rate.
  Eigen::MatrixXd acc_w = Eigen::MatrixXd::Ones(v, d);
  Eigen::MatrixXd acc_w_ctx = Eigen::MatrixXd::Ones(v, d);
  Eigen::VectorXd acc_b = Eigen::VectorXd::Ones(v);
  Eigen::VectorXd acc_b_ctx = Eigen::VectorXd::Ones(v);

  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  detail::EarlyStop stop(cfg.tolerance);
  for (int epoch = 0; epoch < cfg.max_iterations; ++epoch) {
    rng.shuffle(order);
    double loss = 0.0;
    for (std::size_t idx : order) {
      const auto& cell = cells[idx];
      const double f = glove_weight(cell.x, cfg.x_max, cfg.alpha);
      const double diff = p.w.row(cell.i).dot(p.w_ctx.row(cell.j)) +
                          p.b(cell.i) + p.b_ctx(cell.j) - std::log(cell.x);
      loss += f * diff * diff;
      const double scale = 2.0 * f * diff;

      for (Eigen::Index c = 0; c < d; ++c) {
        const double gw = scale * p.w_ctx(cell.j, c);
        const double gc = scale * p.w(cell.i, c);
        p.w(cell.i, c) -= cfg.learning_rate * gw / std::sqrt(acc_w(cell.i, c));
        acc_w(cell.i, c) += gw * gw;
        p.w_ctx(cell.j, c) -=
            cfg.learning_rate * gc / std::sqrt(acc_w_ctx(cell.j, c));
        acc_w_ctx(cell.j, c) += gc * gc;
      }
      p.b(cell.i) -= cfg.learning_rate * scale / std::sqrt(acc_b(cell.i));
      acc_b(cell.i) += scale * scale;
      p.b_ctx(cell.j) -=
          cfg.learning_rate * scale / std::sqrt(acc_b_ctx(cell.j));
      acc_b_ctx(cell.j) += scale * scale;
    }
    if (!std::isfinite(loss)) {
      throw NumericError("GloVe loss diverged at iteration " +
                         std::to_string(epoch + 1));
    }
    result.loss_curve.push_back(loss);
    if (stop.update(loss)) {
      log_info("GloVe converged after " + std::to_string(epoch + 1) +
               " iterations");
      break;
    }
  }

  Provenance prov;
  prov.tag = "glove";
  prov.set("dim", std::to_string(cfg.dim));
  prov.set("iterations", std::to_string(result.loss_curve.size()));
  prov.set("learning_rate", std::to_string(cfg.learning_rate));
  prov.set("x_max", std::to_string(cfg.x_max));
  prov.set("alpha", std::to_string(cfg.alpha));
  prov.set("seed", std::to_string(cfg.seed));
  result.embedding =
      EmbeddingMatrix(vocab, p.w + p.w_ctx, std::move(prov));
  return result;
}

}  // namespace bankembed
