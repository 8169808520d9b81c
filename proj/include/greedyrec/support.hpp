#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "greedyrec/errors.hpp"

namespace greedyrec {

using AtomIndex = Eigen::Index;

/// Ordered set of distinct atom indices. Order is insertion order, which for
/// a greedy trace is the selection order.
class Support {
 public:
  Support() = default;

  Support(std::initializer_list<AtomIndex> indices) : Support(std::vector<AtomIndex>(indices)) {}

  explicit Support(std::vector<AtomIndex> indices) : indices_(std::move(indices)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] < 0) {
        throw InvalidArgs("support index " + std::to_string(indices_[i]) + " is negative");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (indices_[j] == indices_[i]) {
          throw InvalidArgs("duplicate support index " + std::to_string(indices_[i]));
        }
      }
    }
  }

  /// {first, first+1, ..., first+count-1}
  static Support range(AtomIndex first, AtomIndex count) {
    std::vector<AtomIndex> v(static_cast<std::size_t>(count));
    for (AtomIndex i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = first + i;
    return Support(std::move(v));
  }

  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
  [[nodiscard]] AtomIndex operator[](std::size_t i) const { return indices_[i]; }
  [[nodiscard]] auto begin() const noexcept { return indices_.begin(); }
  [[nodiscard]] auto end() const noexcept { return indices_.end(); }
  [[nodiscard]] const std::vector<AtomIndex>& indices() const noexcept { return indices_; }

  [[nodiscard]] bool contains(AtomIndex i) const {
    return std::find(indices_.begin(), indices_.end(), i) != indices_.end();
  }

  void push_back(AtomIndex i) {
    if (i < 0 || contains(i)) {
      throw InvalidArgs("cannot append index " + std::to_string(i) + " to support");
    }
    indices_.push_back(i);
  }

  /// Every element of *this belongs to other.
  [[nodiscard]] bool subset_of(const Support& other) const {
    return std::all_of(indices_.begin(), indices_.end(),
                       [&](AtomIndex i) { return other.contains(i); });
  }

  [[nodiscard]] bool disjoint_from(const Support& other) const {
    return std::none_of(indices_.begin(), indices_.end(),
                        [&](AtomIndex i) { return other.contains(i); });
  }

  /// Elements of *this not in other, keeping the order of *this.
  [[nodiscard]] Support minus(const Support& other) const {
    std::vector<AtomIndex> out;
    for (AtomIndex i : indices_) {
      if (!other.contains(i)) out.push_back(i);
    }
    return Support(std::move(out));
  }

  /// *this followed by the elements of other not already present.
  [[nodiscard]] Support united(const Support& other) const {
    Support out = *this;
    for (AtomIndex i : other) {
      if (!out.contains(i)) out.indices_.push_back(i);
    }
    return out;
  }

  [[nodiscard]] Support sorted() const {
    Support out = *this;
    std::sort(out.indices_.begin(), out.indices_.end());
    return out;
  }

  /// Same elements regardless of order.
  [[nodiscard]] bool same_set(const Support& other) const {
    return size() == other.size() && subset_of(other);
  }

  /// All indices in [0, n).
  [[nodiscard]] bool within(AtomIndex n) const {
    return std::all_of(indices_.begin(), indices_.end(), [n](AtomIndex i) { return i < n; });
  }

  friend bool operator==(const Support&, const Support&) = default;

 private:
  std::vector<AtomIndex> indices_;
};

/// Complement of s in [0, n), ascending.
inline Support complement(const Support& s, AtomIndex n) {
  std::vector<AtomIndex> out;
  for (AtomIndex i = 0; i < n; ++i) {
    if (!s.contains(i)) out.push_back(i);
  }
  return Support(std::move(out));
}

/// Parses "i,j,k" (whitespace tolerated). Empty string gives the empty support.
inline Support parse_support(const std::string& text) {
  std::vector<AtomIndex> out;
  std::string token;
  auto flush = [&]() {
    std::size_t b = token.find_first_not_of(" \t");
    if (b == std::string::npos) {
      token.clear();
      return false;
    }
    std::size_t e = token.find_last_not_of(" \t");
    std::string t = token.substr(b, e - b + 1);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      throw ParseError("bad support index '" + t + "'");
    }
    if (used != t.size()) throw ParseError("bad support index '" + t + "'");
    out.push_back(static_cast<AtomIndex>(v));
    token.clear();
    return true;
  };
  bool any_separator = false;
  for (char c : text) {
    if (c == ',') {
      any_separator = true;
      if (!flush()) throw ParseError("empty entry in support '" + text + "'");
    } else {
      token.push_back(c);
    }
  }
  if (!flush() && any_separator) throw ParseError("trailing comma in support '" + text + "'");
  try {
    return Support(std::move(out));
  } catch (const InvalidArgs& e) {
    throw ParseError(e.what());
  }
}

/// Calls f(const Support&) for every size-r subset of pool, in lexicographic
/// order of positions within pool.
template <typename F>
void for_each_subset(const Support& pool, std::size_t r, F&& f) {
  const std::size_t n = pool.size();
  if (r > n) return;
  std::vector<std::size_t> pos(r);
  for (std::size_t i = 0; i < r; ++i) pos[i] = i;
  std::vector<AtomIndex> chosen(r);
  while (true) {
    for (std::size_t i = 0; i < r; ++i) chosen[i] = pool[pos[i]];
    f(Support(chosen));
    if (r == 0) return;
    std::size_t i = r;
    while (i > 0 && pos[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++pos[i - 1];
    for (std::size_t j = i; j < r; ++j) pos[j] = pos[j - 1] + 1;
  }
}

/// Binomial coefficient as a double (exact well past the enumeration caps used here).
inline double binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0.0;
  r = std::min(r, n - r);
  double out = 1.0;
  for (std::size_t i = 1; i <= r; ++i) out = out * static_cast<double>(n - r + i) / static_cast<double>(i);
  return out;
}

}  // namespace greedyrec
