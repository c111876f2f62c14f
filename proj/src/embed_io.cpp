#include "bankembed/embed_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bankembed/error.hpp"
#include "bankembed/log.hpp"

namespace bankembed {

namespace {

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

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto next = line.find(' ', pos);
    if (next == std::string_view::npos) next = line.size();
    if (next > pos) parts.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

bool parse_double(std::string_view s, double* value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t* value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void format_value(char* buf, std::size_t cap, double v) {
  std::snprintf(buf, cap, "%.9g", v);
}

}  // namespace

void write_embeddings(const EmbeddingMatrix& e, const std::string& path,
                      bool header) {
  auto out = open_output(path);
  char buf[64];
  if (header) out << e.size() << ' ' << e.dim() << '\n';
  for (std::size_t r = 0; r < e.size(); ++r) {
    out << e.vocab().word(r);
    const auto row = e.row(r);
    for (int c = 0; c < e.dim(); ++c) {
      format_value(buf, sizeof buf, row(c));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

EmbeddingMatrix read_embeddings(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> words;
  std::vector<double> data;  // row-major, dim values per word
  std::optional<std::size_t> declared_count;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto parts = split_spaces(line);

    if (line_no == 1 && parts.size() == 2) {
      std::size_t count = 0, d = 0;
      if (parse_size(parts[0], &count) && parse_size(parts[1], &d)) {
        declared_count = count;
        dim = d;
        words.reserve(count);
        data.reserve(count * d);
        continue;
      }
    }
    if (parts.size() < 2) {
      throw FormatError("vector line needs a word and at least one value",
                        line_no);
    }
    if (dim == 0) dim = parts.size() - 1;
    if (parts.size() - 1 != dim) {
      throw FormatError("expected " + std::to_string(dim) + " values, got " +
                            std::to_string(parts.size() - 1),
                        line_no);
    }
    for (std::size_t c = 0; c < dim; ++c) {
      double value = 0.0;
      if (!parse_double(parts[c + 1], &value)) {
        throw FormatError(
            "not a number: \"" + std::string(parts[c + 1]) + "\"", line_no);
      }
      data.push_back(value);
    }
    words.emplace_back(parts[0]);
  }

  if (words.empty()) throw FormatError("no vectors in " + path);
  if (declared_count && *declared_count != words.size()) {
    throw FormatError("header declares " + std::to_string(*declared_count) +
                      " vectors but file has " + std::to_string(words.size()));
  }

  Eigen::MatrixXd vectors =
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>(
          data.data(), static_cast<Eigen::Index>(words.size()),
          static_cast<Eigen::Index>(dim));

  Provenance prov;
  prov.tag = "imported";
  prov.set("source", path);
  return EmbeddingMatrix(Vocabulary::from_words(words), std::move(vectors),
                         std::move(prov));
}

void write_provenance(const EmbeddingMatrix& e, const std::string& path) {
  auto out = open_output(path);
  out << "technique=" << e.provenance().tag << '\n'
      << "vectors=" << e.size() << '\n'
      << "dim=" << e.dim() << '\n';
  for (const auto& [key, value] : e.provenance().params) {
    if (key == "technique" || key == "vectors" || key == "dim") continue;
    out << key << '=' << value << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::pair<EmbeddingMatrix, ImportReport> import_external(
    const std::string& path, const Vocabulary& vocab, OovPolicy policy) {
  auto external = read_embeddings(path);
  ImportReport report;
  report.requested = vocab.size();
  report.dim = external.dim();

  Eigen::MatrixXd aligned = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(vocab.size()), external.dim());
  for (std::size_t r = 0; r < vocab.size(); ++r) {
    auto src = external.index_of(vocab.word(r));
    if (src) {
      aligned.row(static_cast<Eigen::Index>(r)) = external.row(*src);
      ++report.found;
    } else {
      report.oov.push_back(vocab.word(r));
    }
  }
  if (report.found == 0) {
    throw DegenerateInputError("no vocabulary word appears in " + path);
  }
  log_info("imported " + std::to_string(report.found) + "/" +
           std::to_string(report.requested) + " vectors from " + path);

  Provenance prov;
  prov.tag = "imported";
  prov.set("source", path);
  prov.set("oov_policy", policy == OovPolicy::skip ? "skip" : "zero");
  return {EmbeddingMatrix(vocab, std::move(aligned), std::move(prov)),
          std::move(report)};
}

void save_cooccurrence(const CooccurrenceMatrix& m, const Vocabulary& vocab,
                       const std::string& path) {
  if (vocab.size() != m.dim()) {
    throw ArgumentError("vocabulary/matrix size mismatch");
  }
  auto out = open_output(path);
  out << "#dim=" << m.dim() << " kind=" << to_string(m.kind())
      << " window=" << m.window() << '\n';
  char buf[64];
  for (const auto& e : m.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.i << '\t' << e.j << '\t' << buf << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
  save_vocab_file(vocab, path + ".vocab");
}

LoadedCooccurrence load_cooccurrence(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t dim = 0;
  std::optional<CoocKind> kind;
  int window = 0;
  {
    if (line.empty() || line[0] != '#') {
      throw FormatError("missing metadata line in " + path, 1);
    }
    std::istringstream meta(line.substr(1));
    std::string item;
    while (meta >> item) {
      auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw FormatError("bad metadata item \"" + item + "\"", 1);
      }
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (key == "dim") {
        if (!parse_size(value, &dim)) {
          throw FormatError("bad dim \"" + value + "\"", 1);
        }
      } else if (key == "kind") {
        kind = cooc_kind_from_string(value);
        if (!kind) throw FormatError("unknown kind \"" + value + "\"", 1);
      } else if (key == "window") {
        window = static_cast<int>(std::strtol(value.c_str(), nullptr, 10));
      }
    }
    if (dim == 0 || !kind) {
      throw FormatError("metadata line must set dim and kind", 1);
    }
  }

  LoadedCooccurrence loaded;
  loaded.matrix = CooccurrenceMatrix(dim, *kind, window);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t i = 0, j = 0;
    double value = 0.0;
    auto first_tab = line.find('\t');
    auto second_tab =
        first_tab == std::string::npos ? first_tab : line.find('\t', first_tab + 1);
    if (second_tab == std::string::npos ||
        !parse_size({line.data(), first_tab}, &i) ||
        !parse_size({line.data() + first_tab + 1, second_tab - first_tab - 1},
                    &j) ||
        !parse_double({line.data() + second_tab + 1,
                       line.size() - second_tab - 1},
                      &value)) {
      throw FormatError("bad triplet in " + path, line_no);
    }
    if (i > j || j >= dim) {
      throw FormatError("triplet indices out of range", line_no);
    }
    loaded.matrix.add(static_cast<std::uint32_t>(i),
                      static_cast<std::uint32_t>(j), value);
  }

  std::ifstream sidecar(path + ".vocab", std::ios::binary);
  if (sidecar) {
    sidecar.close();
    auto vocab = load_vocab_file(path + ".vocab");
    if (vocab.size() != dim) {
      throw FormatError("sidecar vocabulary has " +
                        std::to_string(vocab.size()) + " words, matrix dim is " +
                        std::to_string(dim));
    }
    loaded.vocab = std::move(vocab);
  }
  return loaded;
}

void save_vocab_file(const Vocabulary& vocab, const std::string& path) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.word(i) << '\t' << vocab.count(i) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Vocabulary load_vocab_file(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("missing tab in " + path, line_no);
    }
    std::int64_t count = 0;
    const char* begin = line.data() + tab + 1;
    auto [ptr, ec] = std::from_chars(begin, line.data() + line.size(), count);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw FormatError("bad count in " + path, line_no);
    }
    words.push_back(line.substr(0, tab));
    counts.push_back(count);
  }
  return Vocabulary::from_words(words, std::move(counts));
}

}  // namespace bankembed
