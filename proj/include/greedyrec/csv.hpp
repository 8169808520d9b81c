#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"

namespace greedyrec {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse '" + std::string(token) + "' as a number");
  }
  if (!std::isfinite(v)) throw ParseError("line " + std::to_string(line) + ": NaN/Inf not allowed");
  return v;
}

/// Rows of comma-separated numbers; blank lines are skipped.
inline std::vector<std::vector<double>> read_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

struct LoadedDictionary {
  Dictionary dictionary;
  bool renormalized = false;  // some column norm deviated from 1 by more than tol::kUnitNorm
};

/// One matrix row per line, no header. Columns are rescaled to unit norm when
/// needed; NaN/Inf, ragged rows and zero columns are rejected.
inline LoadedDictionary read_dictionary_csv(std::istream& in) {
  const auto rows = detail::read_rows(in);
  if (rows.empty()) throw ParseError("dictionary file is empty");
  const std::size_t n = rows.front().size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) {
      throw ParseError("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  try {
    bool changed = false;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (std::abs(a.col(j).norm() - 1.0) > tol::kUnitNorm) changed = true;
    }
    // columns already within tolerance are kept bit for bit
    if (!changed) return LoadedDictionary{Dictionary(std::move(a)), false};
    return LoadedDictionary{Dictionary::normalized(std::move(a)), true};
  } catch (const InvalidArgs& e) {
    throw ParseError(std::string("invalid dictionary: ") + e.what());
  }
}

inline LoadedDictionary load_dictionary_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_dictionary_csv(in);
}

inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

inline std::string dictionary_to_csv(const Dictionary& d) {
  std::ostringstream out;
  write_matrix_csv(out, d.atoms());
  return out.str();
}

inline void save_dictionary_csv(const Dictionary& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_matrix_csv(out, d.atoms());
}

/// A vector is either one value per line or a single comma-separated row.
inline Eigen::VectorXd read_vector_csv(std::istream& in) {
  const auto rows = detail::read_rows(in);
  std::vector<double> flat;
  if (rows.size() == 1) {
    flat = rows.front();
  } else {
    for (const auto& r : rows) {
      if (r.size() != 1) throw ParseError("vector file must be a single row or a single column");
      flat.push_back(r.front());
    }
  }
  if (flat.empty()) throw ParseError("vector file is empty");
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

inline Eigen::VectorXd load_vector_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_vector_csv(in);
}

/// One value per line.
inline void save_vector_csv(const Eigen::VectorXd& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

}  // namespace greedyrec
