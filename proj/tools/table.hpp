#pragma once
// small table type for CLI artifacts: CSV or JSON, reals at 17 significant digits
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pkpz_cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();  // effective config
};

inline std::string fmt_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// "# config: {...}" first, then header, then rows
inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  os << "# config: " << t.config.dump() << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_quote(t.columns[i]);
  os << "\n";
  for (auto& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) os << ",";
      if (auto d = std::get_if<double>(&r[i]))
        os << fmt_real(*d);
      else if (auto k = std::get_if<long long>(&r[i]))
        os << *k;
      else
        os << csv_quote(std::get<std::string>(r[i]));
    }
    os << "\n";
  }
  return os.str();
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return *d;
  if (auto k = std::get_if<long long>(&c)) return *k;
  return std::get<std::string>(c);
}

inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["config"] = t.config;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (auto& r : t.rows) {
    auto row = nlohmann::ordered_json::array();
    for (auto& c : r) row.push_back(cell_json(c));
    j["rows"].push_back(row);
  }
  return j;
}

// nlohmann prints doubles shortest-round-trip, which is lossless
inline std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// reads back what to_csv wrote; numeric-looking cells come back as double
inline Table read_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    bool q = false;
    for (size_t i = 0; i < s.size(); ++i) {
      char c = s[i];
      if (q) {
        if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"')
          q = false;
        else
          cur += c;
      } else if (c == '"')
        q = true;
      else if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else
        cur += c;
    }
    out.push_back(cur);
    return out;
  };
  bool header = false;
  while (std::getline(is, line)) {
    if (line.rfind("# config: ", 0) == 0) {
      t.config = nlohmann::ordered_json::parse(line.substr(10));
      continue;
    }
    if (!header) {
      if (!line.empty()) t.columns = split(line);
      header = true;
      continue;
    }
    std::vector<Cell> row;
    for (auto& s : split(line)) {
      char* end = nullptr;
      double d = std::strtod(s.c_str(), &end);
      if (!s.empty() && end && *end == 0)
        row.push_back(d);
      else
        row.push_back(s);
    }
    t.rows.push_back(row);
  }
  return t;
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace pkpz_cli
