#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sfmc/core.hpp"

namespace sfmc {

inline std::string fmt_g(double v, int precision = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Matrix file: header line "n1 n2", then n1 rows of whitespace-separated
/// decimal floats.
inline void write_matrix(const std::string& path, const Matrix& M) {
  std::ostringstream ss;
  ss << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) ss << ' ';
      ss << fmt_g(M(i, j), 17);
    }
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

inline Matrix read_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open matrix file: " + path);
  Index n1 = 0, n2 = 0;
  if (!(f >> n1 >> n2) || n1 <= 0 || n2 <= 0)
    throw std::runtime_error("bad matrix header in " + path);
  Matrix M(n1, n2);
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j)
      if (!(f >> M(i, j))) throw std::runtime_error("truncated matrix file: " + path);
  return M;
}

/// Mask file: one "i j" pair per line, 0-based.
inline void write_mask(const std::string& path, const SampleMask& mask) {
  std::ostringstream ss;
  for (const auto& [i, j] : mask.entries()) ss << i << ' ' << j << '\n';
  write_text_file(path, ss.str());
}

inline SampleMask read_mask(const std::string& path, Index n1, Index n2) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open mask file: " + path);
  std::vector<std::pair<Index, Index>> entries;
  Index i, j;
  while (f >> i >> j) entries.emplace_back(i, j);
  return SampleMask(n1, n2, std::move(entries));
}

/// Observation file: one "i j value" triple per line, aligned with a mask.
inline void write_observations(const std::string& path, const SampleMask& mask,
                               const std::vector<double>& obs) {
  std::ostringstream ss;
  const auto& ent = mask.entries();
  for (size_t t = 0; t < ent.size(); ++t)
    ss << ent[t].first << ' ' << ent[t].second << ' ' << fmt_g(obs[t], 17) << '\n';
  write_text_file(path, ss.str());
}

/// Reads "i j value" triples, sorted to the SampleMask entry order.
inline std::pair<std::vector<std::pair<Index, Index>>, std::vector<double>>
read_observations(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open observation file: " + path);
  std::vector<std::pair<std::pair<Index, Index>, double>> triples;
  Index i, j;
  double y;
  while (f >> i >> j >> y) triples.push_back({{i, j}, y});
  std::sort(triples.begin(), triples.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Index, Index>> pairs;
  std::vector<double> values;
  pairs.reserve(triples.size());
  values.reserve(triples.size());
  for (const auto& [ij, v] : triples) {
    pairs.push_back(ij);
    values.push_back(v);
  }
  return {std::move(pairs), std::move(values)};
}

/// Flat key = value config text with dotted section keys and '#' comments.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text) {
    KeyValues kv;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
      kv.values_[key] = value;
    }
    return kv;
  }

  static KeyValues parse_file(const std::string& path) { return parse(read_text_file(path)); }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
  }
  long get_long(const std::string& key, long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stol(it->second);
    } catch (...) {
      throw std::runtime_error("config key '" + key + "': bad integer '" + it->second + "'");
    }
  }
  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error("config key '" + key + "': bad boolean '" + it->second + "'");
  }
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) out.push_back(parse_double(key, trim(item)));
    return out;
  }
  std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) out.push_back(trim(item));
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static double parse_double(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (...) {
      throw std::runtime_error("config key '" + key + "': bad number '" + v + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace sfmc
