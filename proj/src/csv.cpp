#include "bankembed/csv.hpp"

namespace bankembed {

int CsvReader::get() {
  int c = in_.get();
  if (c == '\n') ++line_;
  return c;
}

void CsvReader::skip_to_line_end() {
  int c;
  while ((c = get()) != EOF) {
    if (c == '\n') return;
  }
}

CsvReader::Result CsvReader::next(std::vector<std::string>* fields,
                                  std::string* error) {
  fields->clear();
  error->clear();

  int c = in_.peek();
  if (c == EOF) return Result::eof;

  record_line_ = line_;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;

  while (true) {
    c = get();
    if (in_quotes) {
      if (c == EOF) {
        *error = "unterminated quoted field";
        return Result::bad_row;
      }
      if (c == '"') {
        int peek = in_.peek();
        if (peek == '"') {
          get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += static_cast<char>(c);
      }
      continue;
    }

    switch (c) {
      case EOF:
        fields->push_back(std::move(field));
        return Result::row;
      case ',':
        fields->push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        break;
      case '\r':
        if (in_.peek() == '\n') {
          get();
          fields->push_back(std::move(field));
          return Result::row;
        }
        field += '\r';
        break;
      case '\n':
        fields->push_back(std::move(field));
        return Result::row;
      case '"':
        if (field.empty() && !field_was_quoted) {
          in_quotes = true;
          field_was_quoted = true;
        } else {
          *error = "quote inside unquoted field";
          skip_to_line_end();
          return Result::bad_row;
        }
        break;
      default:
        if (field_was_quoted) {
          *error = "data after closing quote";
          skip_to_line_end();
          return Result::bad_row;
        }
        field += static_cast<char>(c);
        break;
    }
  }
}

}  // namespace bankembed
