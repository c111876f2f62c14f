#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bankembed/embed_io.hpp"
#include "bankembed/train.hpp"

namespace bankembed {

struct ModelSpec {
  std::string name;
  std::string technique;  // lsa | glove | autoencoder | cbow | import
  TrainConfig config;
  std::string input_model;  // autoencoder: name of a prior lsa model
  std::string path;         // import: external embedding file
  OovPolicy policy = OovPolicy::skip;
};

// Declarative run configuration: flat sectioned key=value text with
// [corpus], [cooc], [model <name>]..., [eval] and [output] sections.
struct PipelineConfig {
  // [corpus]
  std::string input_csv;
  std::string narrative_column = "Consumer complaint narrative";
  std::string id_column = "Complaint ID";
  std::string stopword_file;  // empty -> builtin list
  double sample_fraction = 1.0;
  std::uint64_t seed = 1;
  // [cooc]
  int window = 10;
  std::int64_t min_count = 5;
  std::optional<std::size_t> max_vocab;
  // [model ...]
  std::vector<ModelSpec> models;
  // [eval]
  std::string pairs_file;
  std::vector<std::string> neighbor_queries;
  std::size_t neighbor_k = 6;
  std::vector<std::string> projection_words;
  int kmeans_k = 10;
  double agreement_threshold = 0.8;
  // [output]
  std::string out_dir;
  int threads = 1;
};

PipelineConfig parse_pipeline_config(const std::string& path);

// Fails fast (ArgumentError) before any output is written: missing input
// paths, duplicate model names, unknown techniques, autoencoder entries
// that do not reference a prior lsa entry.
void validate_pipeline_config(const PipelineConfig& cfg);

// ingest -> cooc -> train (all models) -> eval. Idempotent per output
// directory; a run that dies mid-stage leaves an INCOMPLETE marker naming
// the failed stage.
void run_pipeline(const PipelineConfig& cfg);

}  // namespace bankembed
