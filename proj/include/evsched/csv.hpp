#pragma once

// Minimal RFC 4180 reader for the comma-separated files used by GTFS feeds
// and the trip/depot exchange formats.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evsched/error.hpp"

namespace evsched::csv {

inline std::vector<std::vector<std::string>> parse_records(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  // UTF-8 byte order mark, common in agency exports.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row.front().empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          quoted = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (!field.empty() || field_started || !row.empty()) end_row();
  return rows;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

/// Header-addressed table.
class Table {
 public:
  Table() = default;

  static Table parse(std::string_view text, const std::string& name = "<memory>") {
    Table t;
    t.name_ = name;
    auto records = parse_records(text);
    if (records.empty()) return t;
    t.header_ = records.front();
    for (std::size_t c = 0; c < t.header_.size(); ++c) {
      t.header_[c] = trim(t.header_[c]);
      t.index_.emplace(t.header_[c], c);
    }
    t.rows_.assign(std::make_move_iterator(records.begin() + 1),
                   std::make_move_iterator(records.end()));
    return t;
  }

  static Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.filename().string());
  }

  const std::string& name() const { return name_; }
  std::size_t size() const { return rows_.size(); }
  bool has_column(const std::string& col) const { return index_.count(col) > 0; }

  std::size_t column(const std::string& col) const {
    auto it = index_.find(col);
    if (it == index_.end()) throw DataError(name_ + ": missing column '" + col + "'");
    return it->second;
  }

  std::optional<std::size_t> find_column(const std::string& col) const {
    auto it = index_.find(col);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Cell text, trimmed; empty when the row is short.
  std::string at(std::size_t row, std::size_t col) const {
    const auto& r = rows_.at(row);
    return col < r.size() ? trim(r[col]) : std::string{};
  }

  std::string at(std::size_t row, const std::string& col) const { return at(row, column(col)); }

  void require_columns(std::initializer_list<const char*> cols) const {
    for (const char* c : cols) column(c);
  }

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

inline double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(context + ": not a number: '" + s + "'");
  }
}

inline std::int64_t to_int(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(context + ": not an integer: '" + s + "'");
  }
}

/// Quote a field when it contains a separator, quote, or newline.
inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace evsched::csv
