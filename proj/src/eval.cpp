#include "bankembed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "bankembed/error.hpp"
#include "bankembed/log.hpp"
#include "bankembed/rng.hpp"

namespace bankembed {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void format_value(char* buf, std::size_t cap, double v) {
  std::snprintf(buf, cap, "%.9g", v);
}

// Average ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInputError("constant input has no rank correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    throw ArgumentError("cosine needs equal-length vectors");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw DegenerateInputError("cosine of a zero vector is undefined");
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

PairScores score_pairs(const EmbeddingMatrix& e, const WordPairDataset& d) {
  PairScores scores;
  for (std::size_t r = 0; r < d.records.size(); ++r) {
    const auto& pair = d.records[r];
    const auto ia = e.index_of(pair.a);
    const auto ib = e.index_of(pair.b);
    if (!ia || !ib || e.row(*ia).norm() == 0.0 || e.row(*ib).norm() == 0.0) {
      scores.skipped_indices.push_back(r);
      continue;
    }
    scores.human.push_back(pair.score);
    scores.predicted.push_back(
        cosine_similarity(e.row(*ia).transpose(), e.row(*ib).transpose()));
    scores.scored_indices.push_back(r);
  }
  return scores;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw ArgumentError("spearman needs equal-length inputs");
  }
  if (x.size() < 2) {
    throw DegenerateInputError("spearman needs at least two observations");
  }
  return pearson(average_ranks(x), average_ranks(y));
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& e,
                                        const std::string& word,
                                        std::size_t k) {
  const auto query = e.index_of(word);
  if (!query) throw WordLookupError("\"" + word + "\" is not in the vocabulary");
  const Eigen::VectorXd q = e.row(*query).transpose();
  if (q.norm() == 0.0) {
    throw DegenerateInputError("\"" + word + "\" has a zero vector");
  }

  std::vector<Neighbor> all;
  all.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i == *query) continue;
    if (e.row(i).norm() == 0.0) continue;
    all.push_back({e.vocab().word(i),
                   cosine_similarity(e.row(i).transpose(), q)});
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + take, all.end(),
                    [&](const Neighbor& a, const Neighbor& b) {
                      if (a.similarity != b.similarity) {
                        return a.similarity > b.similarity;
                      }
                      return *e.index_of(a.word) < *e.index_of(b.word);
                    });
  all.resize(take);
  return all;
}

std::vector<std::tuple<std::string, double, double>> project_2d(
    const EmbeddingMatrix& e, const std::vector<std::string>& words) {
  if (e.dim() < 2) {
    throw ArgumentError("2-d projection needs at least two dimensions");
  }
  std::vector<std::tuple<std::string, double, double>> rows;
  rows.reserve(words.size());
  for (const auto& word : words) {
    const auto idx = e.index_of(word);
    if (!idx) throw WordLookupError("\"" + word + "\" is not in the vocabulary");
    rows.emplace_back(word, e.row(*idx)(0), e.row(*idx)(1));
  }
  return rows;
}

ClusterAssignment::ClusterAssignment(std::vector<std::string> words_in,
                                     std::vector<int> labels_in, int k_in) {
  if (words_in.size() != labels_in.size()) {
    throw ArgumentError("words/labels size mismatch");
  }
  k = k_in;
  words = std::move(words_in);
  labels = std::move(labels_in);
  by_word_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    by_word_.emplace(words[i], labels[i]);
  }
}

std::optional<int> ClusterAssignment::label_of(const std::string& word) const {
  auto it = by_word_.find(word);
  if (it == by_word_.end()) return std::nullopt;
  return it->second;
}

ClusterAssignment kmeans(const EmbeddingMatrix& e, int k, std::uint64_t seed,
                         int max_iter) {
  const auto n = static_cast<Eigen::Index>(e.size());
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (n < k) {
    throw DegenerateInputError("cannot form " + std::to_string(k) +
                               " clusters from " + std::to_string(n) +
                               " points");
  }
  const Eigen::MatrixXd& x = e.vectors();
  Rng rng(seed);

  // Greedy-spread seeding: first centroid uniform, the rest by squared
  // distance to the closest chosen centroid.
  Eigen::MatrixXd centroids(k, x.cols());
  Eigen::VectorXd dist2 =
      Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  {
    const auto first = static_cast<Eigen::Index>(rng.uniform_below(n));
    centroids.row(0) = x.row(first);
    for (int c = 1; c < k; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = (x.row(i) - centroids.row(c - 1)).squaredNorm();
        if (d2 < dist2(i)) dist2(i) = d2;
      }
      const double total = dist2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        const double r = rng.next_double() * total;
        double running = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          running += dist2(i);
          if (running >= r) {
            pick = i;
            break;
          }
          pick = i;
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.uniform_below(n));
      }
      centroids.row(c) = x.row(pick);
    }
  }

  std::vector<int> labels(n, -1);
  double inertia = 0.0;
  std::vector<double> trace;
  std::vector<int> counts(k, 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment: closest centroid, lowest index on ties.
    bool changed = false;
    inertia = 0.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = (x.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d2 = (x.row(i) - centroids.row(c)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
      ++counts[best];
      inertia += best_d2;
    }
    trace.push_back(inertia);
    if (!changed) break;

    // Update step; an emptied cluster is reseeded to the point farthest
    // from its current centroid.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += x.row(i);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
      } else {
        Eigen::Index farthest = 0;
        double far_d2 = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d2 = (x.row(i) - centroids.row(labels[i])).squaredNorm();
          if (d2 > far_d2) {
            far_d2 = d2;
            farthest = i;
          }
        }
        centroids.row(c) = x.row(farthest);
      }
    }
  }

  ClusterAssignment result(e.vocab().words(), std::move(labels), k);
  result.inertia = inertia;
  result.inertia_trace = std::move(trace);
  return result;
}

AgreementReport cluster_agreement(const ClusterAssignment& c,
                                  const WordPairDataset& pairs,
                                  double threshold) {
  AgreementReport report;
  std::size_t agreeing = 0;
  for (const auto& pair : pairs.records) {
    if (pair.score < threshold) {
      ++report.below_threshold;
      continue;
    }
    const auto la = c.label_of(pair.a);
    const auto lb = c.label_of(pair.b);
    if (!la || !lb) {
      ++report.excluded_unlabeled;
      continue;
    }
    const bool same = *la == *lb;
    report.rows.push_back({pair.a, pair.b, same});
    if (same) ++agreeing;
  }
  if (report.rows.empty()) {
    throw DegenerateInputError("no pair at or above the threshold is labeled");
  }
  report.accuracy = static_cast<double>(agreeing) /
                    static_cast<double>(report.rows.size());
  return report;
}

EvalReport evaluate_model(const std::string& name, const EmbeddingMatrix& e,
                          const WordPairDataset& pairs) {
  EvalReport report;
  report.model_name = name;
  report.dim = e.dim();
  const auto scores = score_pairs(e, pairs);
  report.pairs_scored = scores.scored_indices.size();
  report.pairs_skipped_oov = scores.skipped_indices.size();
  if (scores.human.size() >= 2) {
    try {
      report.spearman = spearman(scores.human, scores.predicted);
    } catch (const DegenerateInputError& err) {
      log_warn("model " + name + ": " + err.what());
    }
  }
  return report;
}

void write_eval_reports_csv(std::vector<EvalReport> reports,
                            const std::string& path) {
  std::sort(reports.begin(), reports.end(),
            [](const EvalReport& a, const EvalReport& b) {
              const double sa = a.spearman.value_or(
                  -std::numeric_limits<double>::infinity());
              const double sb = b.spearman.value_or(
                  -std::numeric_limits<double>::infinity());
              if (sa != sb) return sa > sb;
              return a.model_name < b.model_name;
            });
  auto out = open_output(path);
  out << "model,dim,spearman,pairs_scored,pairs_skipped\n";
  char buf[64];
  for (const auto& r : reports) {
    out << csv_quote(r.model_name) << ',' << r.dim << ',';
    if (r.spearman) {
      format_value(buf, sizeof buf, *r.spearman);
      out << buf;
    }
    out << ',' << r.pairs_scored << ',' << r.pairs_skipped_oov << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_neighbors_csv(const std::vector<Neighbor>& neighbors,
                         const std::string& path) {
  auto out = open_output(path);
  out << "rank,word,similarity\n";
  char buf[64];
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    format_value(buf, sizeof buf, neighbors[i].similarity);
    out << (i + 1) << ',' << csv_quote(neighbors[i].word) << ',' << buf
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_projection_csv(
    const std::vector<std::tuple<std::string, double, double>>& rows,
    const std::string& path) {
  auto out = open_output(path);
  out << "word,x,y\n";
  char bx[64], by[64];
  for (const auto& [word, x, y] : rows) {
    format_value(bx, sizeof bx, x);
    format_value(by, sizeof by, y);
    out << csv_quote(word) << ',' << bx << ',' << by << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_agreement_csv(const AgreementReport& report,
                         const std::string& path) {
  auto out = open_output(path);
  out << "word_a,word_b,same_cluster\n";
  for (const auto& row : report.rows) {
    out << csv_quote(row.word_a) << ',' << csv_quote(row.word_b) << ','
        << (row.same_cluster ? 1 : 0) << '\n';
  }
  char buf[64];
  format_value(buf, sizeof buf, report.accuracy);
  out << "accuracy,," << buf << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace bankembed
