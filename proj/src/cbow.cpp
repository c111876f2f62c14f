#include <algorithm>
#include <cmath>

#include "bankembed/error.hpp"
#include "bankembed/log.hpp"
#include "bankembed/rng.hpp"
#include "bankembed/train.hpp"
#include "train_detail.hpp"

namespace bankembed {

namespace {

// Noise distribution: unigram frequency raised to 0.75, uniform when the
// vocabulary carries no counts (e.g. loaded from a bare word list).
class NoiseTable {
 public:
  explicit NoiseTable(const Vocabulary& vocab) : cumulative_(vocab.size()) {
    double running = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      const auto count = static_cast<double>(std::max<std::int64_t>(
          vocab.count(i), 0));
      running += std::pow(count, 0.75);
      cumulative_[i] = running;
    }
    if (running == 0.0) {
      for (std::size_t i = 0; i < cumulative_.size(); ++i) {
        cumulative_[i] = static_cast<double>(i + 1);
      }
      running = cumulative_.back();
    }
    total_ = running;
  }

  std::uint32_t sample(Rng* rng) const {
    const double r = rng->next_double() * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

double sigmoid(double x) {
  if (x > 30.0) return 1.0;
  if (x < -30.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

TrainResult train_cbow(const DocumentStore& store, const Vocabulary& vocab,
                       const TrainConfig& cfg) {
  cfg.validate();
  if (vocab.empty()) throw DegenerateInputError("empty vocabulary");

  // In-vocabulary id sequences; unknown tokens are dropped up front, so the
  // context window is measured over known words.
  std::vector<std::vector<std::uint32_t>> sequences;
  std::size_t total_positions = 0;
  for (const auto& doc : store) {
    std::vector<std::uint32_t> ids;
    ids.reserve(doc.tokens.size());
    for (const auto& token : doc.tokens) {
      if (auto idx = vocab.index_of(token)) ids.push_back(*idx);
    }
    if (ids.size() >= 2) {
      total_positions += ids.size();
      sequences.push_back(std::move(ids));
    }
  }
  if (sequences.empty()) {
    throw DegenerateInputError("no document has two in-vocabulary tokens");
  }

  const auto v = static_cast<Eigen::Index>(vocab.size());
  const Eigen::Index d = cfg.dim;
  Rng rng(cfg.seed);
  Eigen::MatrixXd w_in(v, d);
  for (Eigen::Index r = 0; r < v; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      w_in(r, c) = (rng.next_double() - 0.5) / cfg.dim;
    }
  }
  Eigen::MatrixXd w_out = Eigen::MatrixXd::Zero(v, d);

  NoiseTable noise(vocab);
  const double total_steps =
      static_cast<double>(cfg.max_iterations) *
          static_cast<double>(total_positions) +
      1.0;
  double processed = 0.0;

  Eigen::VectorXd h(d), e_h(d);
  TrainResult result;
  detail::EarlyStop stop(cfg.tolerance);
  for (int epoch = 0; epoch < cfg.max_iterations; ++epoch) {
    double loss = 0.0;
    for (const auto& ids : sequences) {
      const auto len = static_cast<std::ptrdiff_t>(ids.size());
      for (std::ptrdiff_t t = 0; t < len; ++t, ++processed) {
        const double lr =
            cfg.learning_rate *
            std::max(1.0 - processed / total_steps, 1e-4);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - cfg.window);
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(len - 1, t + cfg.window);
        const auto context_size = static_cast<double>(hi - lo);
        if (context_size == 0.0) continue;

        h.setZero();
        for (std::ptrdiff_t c = lo; c <= hi; ++c) {
          if (c != t) h += w_in.row(ids[c]);
        }
        h /= context_size;

        e_h.setZero();
        const std::uint32_t target = ids[t];
        for (int s = 0; s <= cfg.negative_samples; ++s) {
          std::uint32_t word;
          double label;
          if (s == 0) {
            word = target;
            label = 1.0;
          } else {
            word = noise.sample(&rng);
            if (word == target) continue;
            label = 0.0;
          }
          const double score = h.dot(w_out.row(word));
          const double pred = sigmoid(score);
          loss -= label > 0.5 ? std::log(std::max(pred, 1e-12))
                              : std::log(std::max(1.0 - pred, 1e-12));
          const double g = label - pred;
          e_h += g * w_out.row(word).transpose();
          w_out.row(word) += lr * g * h.transpose();
        }

        const Eigen::VectorXd update = (lr / context_size) * e_h;
        for (std::ptrdiff_t c = lo; c <= hi; ++c) {
          if (c != t) w_in.row(ids[c]) += update.transpose();
        }
      }
    }
    if (!std::isfinite(loss)) {
      throw NumericError("CBOW loss diverged at epoch " +
                         std::to_string(epoch + 1));
    }
    result.loss_curve.push_back(loss);
    if (stop.update(loss)) {
      log_info("CBOW converged after " + std::to_string(epoch + 1) +
               " epochs");
      break;
    }
  }

  Provenance prov;
  prov.tag = "cbow";
  prov.set("dim", std::to_string(cfg.dim));
  prov.set("window", std::to_string(cfg.window));
  prov.set("negative_samples", std::to_string(cfg.negative_samples));
  prov.set("iterations", std::to_string(result.loss_curve.size()));
  prov.set("learning_rate", std::to_string(cfg.learning_rate));
  prov.set("seed", std::to_string(cfg.seed));
  result.embedding =
      EmbeddingMatrix(vocab, std::move(w_in), std::move(prov));
  return result;
}

}  // namespace bankembed
