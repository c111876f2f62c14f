#include "bankembed/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bankembed/csv.hpp"
#include "bankembed/error.hpp"
#include "bankembed/log.hpp"
#include "bankembed/rng.hpp"

namespace bankembed {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

bool is_redaction_mask(std::string_view token) {
  if (token.size() < 2) return false;
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return c == 'x'; });
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void strip_bom(std::string* s) {
  if (s->size() >= 3 && (*s)[0] == '\xEF' && (*s)[1] == '\xBB' &&
      (*s)[2] == '\xBF') {
    s->erase(0, 3);
  }
}

}  // namespace

DocumentStore::DocumentStore(std::vector<Document> documents,
                             std::string source)
    : documents_(std::move(documents)), source_(std::move(source)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (!seen.insert(doc.id).second) {
      throw SchemaError("duplicate document id: " + doc.id);
    }
  }
}

TokenizerConfig default_tokenizer_config() {
  TokenizerConfig config;
  const auto& words = builtin_stopwords();
  config.stopwords.insert(words.begin(), words.end());
  return config;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  auto in = open_input(path);
  std::unordered_set<std::string> words;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      strip_bom(&line);
      first = false;
    }
    std::string word(trim(line));
    if (word.empty()) continue;
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    words.insert(std::move(word));
  }
  return words;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!config.stopwords.count(current) &&
        !(config.strip_redaction_masks && is_redaction_mask(current))) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (unsigned char c : text) {
    if (c >= 'a' && c <= 'z') {
      current += static_cast<char>(c);
    } else if (c >= 'A' && c <= 'Z') {
      current += static_cast<char>(c - 'A' + 'a');
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

IngestResult ingest_complaints(const std::string& path,
                               const std::string& narrative_column,
                               const TokenizerConfig& config,
                               const std::string& id_column) {
  auto in = open_input(path);
  CsvReader reader(in);

  std::vector<std::string> fields;
  std::string error;
  auto result = reader.next(&fields, &error);
  if (result == CsvReader::Result::eof) {
    throw FormatError("empty CSV: " + path);
  }
  if (result == CsvReader::Result::bad_row) {
    throw FormatError("unreadable CSV header in " + path + ": " + error,
                      reader.record_line());
  }
  if (!fields.empty()) strip_bom(&fields[0]);

  std::size_t narrative_idx = fields.size();
  std::size_t id_idx = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == narrative_column) narrative_idx = i;
    if (fields[i] == id_column) id_idx = i;
  }
  if (narrative_idx == fields.size()) {
    throw SchemaError("column \"" + narrative_column + "\" not found in " +
                      path);
  }
  const bool has_id_column = id_idx != fields.size();
  const std::size_t arity = fields.size();

  IngestResult out;
  std::vector<Document> documents;
  std::unordered_set<std::string> seen_ids;
  std::size_t ordinal = 0;

  while ((result = reader.next(&fields, &error)) != CsvReader::Result::eof) {
    ++ordinal;
    if (result == CsvReader::Result::bad_row) {
      ++out.skipped_malformed;
      log_debug("skipping malformed row at line " +
                std::to_string(reader.record_line()) + ": " + error);
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) {
      --ordinal;  // blank line, not a record
      continue;
    }
    if (fields.size() != arity) {
      ++out.skipped_malformed;
      log_debug("skipping row with " + std::to_string(fields.size()) +
                " fields (expected " + std::to_string(arity) + ") at line " +
                std::to_string(reader.record_line()));
      continue;
    }

    std::string narrative(trim(fields[narrative_idx]));
    if (narrative.empty()) {
      ++out.skipped_empty;
      continue;
    }

    std::string id;
    if (has_id_column) id = std::string(trim(fields[id_idx]));
    if (id.empty()) id = std::to_string(ordinal);
    if (!seen_ids.insert(id).second) {
      ++out.skipped_malformed;
      log_debug("skipping row with duplicate id \"" + id + "\" at line " +
                std::to_string(reader.record_line()));
      continue;
    }

    documents.push_back({std::move(id), tokenize(narrative, config)});
  }

  out.store = DocumentStore(std::move(documents), path);
  return out;
}

DocumentStore sample(const DocumentStore& store, double fraction,
                     std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ArgumentError("sample fraction must be in [0, 1], got " +
                        std::to_string(fraction));
  }
  const std::size_t n = store.size();
  const auto k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(k);
  std::sort(indices.begin(), indices.end());

  std::vector<Document> selected;
  selected.reserve(k);
  for (std::size_t idx : indices) selected.push_back(store[idx]);
  return DocumentStore(std::move(selected), store.source());
}

CorpusStats corpus_stats(const DocumentStore& store) {
  CorpusStats stats;
  stats.num_documents = store.size();
  std::unordered_set<std::string_view> vocab;
  for (const auto& doc : store) {
    stats.total_words += doc.tokens.size();
    if (doc.tokens.size() < 200) ++stats.num_short_documents;
    for (const auto& token : doc.tokens) vocab.insert(token);
  }
  stats.vocabulary_size = vocab.size();
  return stats;
}

void save_store(const DocumentStore& store, const std::string& path) {
  auto out = open_output(path);
  for (const auto& doc : store) {
    std::string id = doc.id;
    std::replace_if(
        id.begin(), id.end(), [](char c) { return c == '\t' || c == '\n'; },
        '_');
    out << id << '\t';
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << doc.tokens[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

DocumentStore load_store(const std::string& path) {
  auto in = open_input(path);
  std::vector<Document> documents;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("missing tab separator in " + path, line_no);
    }
    Document doc;
    doc.id = line.substr(0, tab);
    std::istringstream tokens(line.substr(tab + 1));
    std::string token;
    while (tokens >> token) doc.tokens.push_back(std::move(token));
    documents.push_back(std::move(doc));
  }
  return DocumentStore(std::move(documents), path);
}

void write_corpus_stats(const CorpusStats& stats, const std::string& path,
                        std::size_t skipped_empty,
                        std::size_t skipped_malformed) {
  auto out = open_output(path);
  out << "num_documents=" << stats.num_documents << '\n'
      << "total_words=" << stats.total_words << '\n'
      << "vocabulary_size=" << stats.vocabulary_size << '\n'
      << "num_short_documents=" << stats.num_short_documents << '\n'
      << "skipped_empty=" << skipped_empty << '\n'
      << "skipped_malformed=" << skipped_malformed << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace bankembed
