#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "bankembed/cooc.hpp"
#include "bankembed/embedding.hpp"

namespace bankembed {

// u.v / (|u| |v|), clamped into [-1, 1]. Zero-norm input raises
// DegenerateInputError; callers treat such pairs as unscoreable.
double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v);

struct PairScores {
  std::vector<double> human;             // aligned with predicted
  std::vector<double> predicted;
  std::vector<std::size_t> scored_indices;   // into dataset.records
  std::vector<std::size_t> skipped_indices;  // OOV or zero-norm pairs
};

PairScores score_pairs(const EmbeddingMatrix& e, const WordPairDataset& d);

// Pearson correlation of the two rank vectors; ties get average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct Neighbor {
  std::string word;
  double similarity;
};

// k highest-cosine vocabulary words, the query and zero-norm rows
// excluded, descending similarity with vocabulary-index tie-break.
std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& e,
                                        const std::string& word,
                                        std::size_t k);

// Dimensions 0 and 1 of each word's vector, verbatim.
std::vector<std::tuple<std::string, double, double>> project_2d(
    const EmbeddingMatrix& e, const std::vector<std::string>& words);

struct ClusterAssignment {
  ClusterAssignment() = default;
  // Wraps an existing labeling (e.g. one loaded from disk).
  ClusterAssignment(std::vector<std::string> words, std::vector<int> labels,
                    int k);

  int k = 0;
  std::vector<int> labels;            // vocabulary order
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // after each assignment step
  std::vector<std::string> words;     // vocabulary order

  std::optional<int> label_of(const std::string& word) const;

 private:
  std::unordered_map<std::string, int> by_word_;
};

// Lloyd iteration with greedy-spread probabilistic seeding; stops at an
// assignment fixpoint or max_iter. Empty clusters are reseeded to the
// point farthest from its centroid.
ClusterAssignment kmeans(const EmbeddingMatrix& e, int k, std::uint64_t seed,
                         int max_iter = 100);

struct AgreementRow {
  std::string word_a;
  std::string word_b;
  bool same_cluster;
};

struct AgreementReport {
  double accuracy = 0.0;
  std::vector<AgreementRow> rows;        // pairs at/above the threshold
  std::size_t excluded_unlabeled = 0;    // eligible pairs with unlabeled words
  std::size_t below_threshold = 0;
};

// Fraction of pairs scoring >= threshold whose words share a cluster.
AgreementReport cluster_agreement(const ClusterAssignment& c,
                                  const WordPairDataset& pairs,
                                  double threshold = 0.8);

struct EvalReport {
  std::string model_name;
  int dim = 0;
  std::optional<double> spearman;  // empty when nothing was scoreable
  std::size_t pairs_scored = 0;
  std::size_t pairs_skipped_oov = 0;
};

EvalReport evaluate_model(const std::string& name, const EmbeddingMatrix& e,
                          const WordPairDataset& pairs);

// CSV writers for the report layouts.
void write_eval_reports_csv(std::vector<EvalReport> reports,
                            const std::string& path);  // spearman descending
void write_neighbors_csv(const std::vector<Neighbor>& neighbors,
                         const std::string& path);
void write_projection_csv(
    const std::vector<std::tuple<std::string, double, double>>& rows,
    const std::string& path);
void write_agreement_csv(const AgreementReport& report,
                         const std::string& path);

}  // namespace bankembed
