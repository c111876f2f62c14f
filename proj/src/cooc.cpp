#include "bankembed/cooc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "bankembed/csv.hpp"
#include "bankembed/error.hpp"
#include "bankembed/rng.hpp"

namespace bankembed {

namespace {

constexpr std::uint64_t pair_key(std::uint32_t i, std::uint32_t j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

double parse_double(const std::string& s, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("not a number: \"" + s + "\"", line);
  }
  return value;
}

std::string lowercased(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace

Vocabulary Vocabulary::from_counts(
    const std::unordered_map<std::string, std::int64_t>& counts,
    std::int64_t min_count, std::optional<std::size_t> max_size) {
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(counts.size());
  for (const auto& [word, count] : counts) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (max_size && kept.size() > *max_size) kept.resize(*max_size);

  Vocabulary vocab;
  vocab.words_.reserve(kept.size());
  vocab.counts_.reserve(kept.size());
  vocab.index_.reserve(kept.size());
  for (auto& [word, count] : kept) {
    vocab.index_.emplace(word, static_cast<std::uint32_t>(vocab.words_.size()));
    vocab.words_.push_back(std::move(word));
    vocab.counts_.push_back(count);
  }
  return vocab;
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words,
                                  std::vector<std::int64_t> counts) {
  if (!counts.empty() && counts.size() != words.size()) {
    throw ArgumentError("word/count size mismatch");
  }
  Vocabulary vocab;
  vocab.words_ = words;
  vocab.counts_ = counts.empty() ? std::vector<std::int64_t>(words.size(), 0)
                                 : std::move(counts);
  vocab.index_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto [it, inserted] =
        vocab.index_.emplace(words[i], static_cast<std::uint32_t>(i));
    if (!inserted) throw ArgumentError("duplicate word: " + words[i]);
  }
  return vocab;
}

std::optional<std::uint32_t> Vocabulary::index_of(
    const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::contains(const std::string& word) const {
  return index_.count(word) != 0;
}

Vocabulary build_vocabulary(const DocumentStore& store, std::int64_t min_count,
                            std::optional<std::size_t> max_size) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& doc : store) {
    for (const auto& token : doc.tokens) ++counts[token];
  }
  return Vocabulary::from_counts(counts, min_count, max_size);
}

const char* to_string(CoocKind kind) {
  return kind == CoocKind::ppmi ? "ppmi" : "weighted_counts";
}

std::optional<CoocKind> cooc_kind_from_string(const std::string& s) {
  if (s == "weighted_counts") return CoocKind::weighted_counts;
  if (s == "ppmi") return CoocKind::ppmi;
  return std::nullopt;
}

CooccurrenceMatrix::CooccurrenceMatrix(std::size_t dim, CoocKind kind,
                                       int window)
    : dim_(dim), kind_(kind), window_(window) {}

void CooccurrenceMatrix::add(std::uint32_t i, std::uint32_t j, double value) {
  if (i >= dim_ || j >= dim_) {
    throw ArgumentError("co-occurrence index out of range");
  }
  cells_[pair_key(i, j)] += value;
}

double CooccurrenceMatrix::at(std::uint32_t i, std::uint32_t j) const {
  auto it = cells_.find(pair_key(i, j));
  return it == cells_.end() ? 0.0 : it->second;
}

std::vector<CoocEntry> CooccurrenceMatrix::entries() const {
  std::vector<CoocEntry> out;
  out.reserve(cells_.size());
  for (const auto& [key, value] : cells_) {
    out.push_back({static_cast<std::uint32_t>(key >> 32),
                   static_cast<std::uint32_t>(key & 0xFFFFFFFFu), value});
  }
  std::sort(out.begin(), out.end(), [](const CoocEntry& a, const CoocEntry& b) {
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  return out;
}

double CooccurrenceMatrix::sum() const {
  double total = 0.0;
  for (const auto& [key, value] : cells_) {
    const auto i = static_cast<std::uint32_t>(key >> 32);
    const auto j = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    total += (i == j) ? value : 2.0 * value;
  }
  return total;
}

namespace {

void accumulate_document(const std::vector<std::string>& tokens,
                         const Vocabulary& vocab, int window,
                         std::unordered_map<std::uint64_t, double>* cells) {
  constexpr std::uint32_t kOov = 0xFFFFFFFFu;
  std::vector<std::uint32_t> ids(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    auto idx = vocab.index_of(tokens[t]);
    ids[t] = idx ? *idx : kOov;
  }
  const double denom = window;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (ids[a] == kOov) continue;
    const std::size_t last = std::min(ids.size(), a + window + 1);
    for (std::size_t b = a + 1; b < last; ++b) {
      if (ids[b] == kOov) continue;
      const double weight = (window + 1 - static_cast<double>(b - a)) / denom;
      (*cells)[pair_key(ids[a], ids[b])] += weight;
    }
  }
}

}  // namespace

CooccurrenceMatrix build_cooccurrence(const DocumentStore& store,
                                      const Vocabulary& vocab, int window,
                                      int threads) {
  if (window < 1) throw ArgumentError("window must be >= 1");
  if (threads < 1) throw ArgumentError("threads must be >= 1");

  CooccurrenceMatrix matrix(vocab.size(), CoocKind::weighted_counts, window);
  const std::size_t n = store.size();
  const auto num_shards =
      static_cast<std::size_t>(std::min<std::int64_t>(threads, n ? n : 1));

  if (num_shards <= 1) {
    std::unordered_map<std::uint64_t, double> cells;
    for (const auto& doc : store) {
      accumulate_document(doc.tokens, vocab, window, &cells);
    }
    for (const auto& [key, value] : cells) {
      matrix.add(static_cast<std::uint32_t>(key >> 32),
                 static_cast<std::uint32_t>(key & 0xFFFFFFFFu), value);
    }
    return matrix;
  }

  std::vector<std::unordered_map<std::uint64_t, double>> shard_cells(
      num_shards);
  std::vector<std::thread> workers;
  workers.reserve(num_shards);
  for (std::size_t shard = 0; shard < num_shards; ++shard) {
    const std::size_t begin = shard * n / num_shards;
    const std::size_t end = (shard + 1) * n / num_shards;
    workers.emplace_back([&, shard, begin, end] {
      for (std::size_t d = begin; d < end; ++d) {
        accumulate_document(store[d].tokens, vocab, window,
                            &shard_cells[shard]);
      }
    });
  }
  for (auto& worker : workers) worker.join();

  for (const auto& cells : shard_cells) {
    for (const auto& [key, value] : cells) {
      matrix.add(static_cast<std::uint32_t>(key >> 32),
                 static_cast<std::uint32_t>(key & 0xFFFFFFFFu), value);
    }
  }
  return matrix;
}

CooccurrenceMatrix apply_ppmi(const CooccurrenceMatrix& counts,
                              PpmiMarginals* marginals) {
  if (counts.kind() != CoocKind::weighted_counts) {
    throw ArgumentError("PPMI expects a weighted count matrix");
  }

  const auto entries = counts.entries();
  std::vector<double> row_sums(counts.dim(), 0.0);
  for (const auto& e : entries) {
    row_sums[e.i] += e.value;
    if (e.i != e.j) row_sums[e.j] += e.value;
  }
  double total = 0.0;
  for (double rs : row_sums) total += rs;
  if (!(total > 0.0)) {
    throw DegenerateInputError("co-occurrence matrix has no mass");
  }

  CooccurrenceMatrix out(counts.dim(), CoocKind::ppmi, counts.window());
  for (const auto& e : entries) {
    const double pmi =
        std::log(e.value * total / (row_sums[e.i] * row_sums[e.j]));
    if (pmi > 0.0) out.add(e.i, e.j, pmi);
  }

  if (marginals) {
    marginals->total = total;
    marginals->row.resize(row_sums.size());
    for (std::size_t i = 0; i < row_sums.size(); ++i) {
      marginals->row[i] = row_sums[i] / total;
    }
  }
  return out;
}

std::vector<std::string> top_k_words(const Vocabulary& vocab, std::size_t k) {
  const auto take = std::min(k, vocab.size());
  return {vocab.words().begin(), vocab.words().begin() + take};
}

std::vector<std::pair<std::string, std::string>> generate_word_pairs(
    const std::vector<std::string>& words, std::size_t n, std::uint64_t seed) {
  const std::size_t m = words.size();
  if (m < 2) throw DegenerateInputError("need at least two words to pair");
  const std::size_t possible = m * (m - 1) / 2;
  if (n > possible) {
    throw ArgumentError("asked for " + std::to_string(n) + " pairs but only " +
                        std::to_string(possible) + " exist");
  }

  Rng rng(seed);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(n);

  if (n * 2 > possible) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
    all.reserve(possible);
    for (std::uint32_t i = 0; i + 1 < m; ++i) {
      for (std::uint32_t j = i + 1; j < m; ++j) all.emplace_back(i, j);
    }
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t pick =
          t + static_cast<std::size_t>(rng.uniform_below(all.size() - t));
      std::swap(all[t], all[pick]);
      out.emplace_back(words[all[t].first], words[all[t].second]);
    }
    return out;
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(n * 2);
  while (out.size() < n) {
    auto a = static_cast<std::uint32_t>(rng.uniform_below(m));
    auto b = static_cast<std::uint32_t>(rng.uniform_below(m));
    if (a == b) continue;
    if (!seen.insert(pair_key(a, b)).second) continue;
    if (a > b) std::swap(a, b);
    out.emplace_back(words[a], words[b]);
  }
  return out;
}

WordPairLoad load_word_pairs(const std::string& path,
                             const Vocabulary* vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  CsvReader reader(in);

  std::vector<std::string> fields;
  std::string error;
  auto result = reader.next(&fields, &error);
  if (result != CsvReader::Result::row || fields.size() < 3) {
    throw FormatError("expected header word_a,word_b,score in " + path,
                      reader.record_line());
  }
  const std::size_t arity = fields.size();

  WordPairLoad load;
  std::unordered_set<std::uint64_t> seen_pairs;
  std::unordered_map<std::string, std::uint32_t> word_ids;
  std::unordered_set<std::string> oov_seen;
  auto intern = [&](const std::string& w) {
    auto [it, _] = word_ids.emplace(
        w, static_cast<std::uint32_t>(word_ids.size()));
    return it->second;
  };

  while ((result = reader.next(&fields, &error)) != CsvReader::Result::eof) {
    const std::size_t line = reader.record_line();
    if (result == CsvReader::Result::bad_row) {
      throw FormatError("bad row in " + path + ": " + error, line);
    }
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != arity) {
      throw FormatError("expected " + std::to_string(arity) + " fields, got " +
                            std::to_string(fields.size()),
                        line);
    }

    WordPair pair;
    pair.a = lowercased(fields[0]);
    pair.b = lowercased(fields[1]);
    if (pair.a.empty() || pair.b.empty()) {
      throw FormatError("empty word", line);
    }
    if (pair.a == pair.b) {
      throw FormatError("self-pair \"" + pair.a + "\"", line);
    }
    double sum = 0.0;
    for (std::size_t s = 2; s < arity; ++s) {
      const double score = parse_double(fields[s], line);
      if (!(score >= 0.0 && score <= 1.0)) {
        throw FormatError("score " + fields[s] + " outside [0, 1]", line);
      }
      sum += score;
    }
    pair.score = sum / static_cast<double>(arity - 2);

    if (!seen_pairs.insert(pair_key(intern(pair.a), intern(pair.b))).second) {
      throw FormatError("duplicate pair \"" + pair.a + "\"/\"" + pair.b + "\"",
                        line);
    }

    if (vocab) {
      const bool a_oov = !vocab->contains(pair.a);
      const bool b_oov = !vocab->contains(pair.b);
      if (a_oov || b_oov) {
        load.oov_record_indices.push_back(load.dataset.records.size());
        if (a_oov && oov_seen.insert(pair.a).second) {
          load.oov_words.push_back(pair.a);
        }
        if (b_oov && oov_seen.insert(pair.b).second) {
          load.oov_words.push_back(pair.b);
        }
      }
    }
    load.dataset.records.push_back(std::move(pair));
  }
  return load;
}

}  // namespace bankembed
