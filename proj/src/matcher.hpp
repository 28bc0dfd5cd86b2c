#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "features.hpp"

namespace fpm::matcher {

struct MatchResult {
  int mc = 0;  // corresponding minutiae
  int n = 0;   // probe good-quality tuples
  int m = 0;   // gallery good-quality tuples
  double score = 0.0;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// Exact correspondence: all eight ridge-crossing counts equal and
// non-negative, all three neighbour distances equal.
bool correspond(const MinutiaTuple& p, const MinutiaTuple& g);

// Size of the largest one-to-one pairing under correspond. Since
// correspondence is equality of the 11-integer feature vector, this is the
// multiset intersection size.
int countCorrespondence(std::span<const MinutiaTuple> probe,
                        std::span<const MinutiaTuple> gallery);

// (mc/n + mc/m) / 2 evaluated as mc*(n+m) / (2*n*m) with one rounding.
double similarityScore(int mc, int n, int m);

// Throws kEmptyTemplate when either side has no tuples and kNotEnrollable
// when either side has fewer than 10 unless force is set.
MatchResult similarity(const Template& probe, const Template& gallery, bool force = false);

// Sorted 128-bit packing of a template's matchable tuples. Tuples with a
// negative crossing count are dropped since they can never correspond.
class MatchKeys {
 public:
  MatchKeys() = default;
  explicit MatchKeys(std::span<const MinutiaTuple> tuples);

  int tupleCount() const noexcept { return count_; }
  int intersect(const MatchKeys& other) const noexcept;

 private:
  struct Key {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  std::vector<Key> keys_;
  int count_ = 0;
};

}  // namespace fpm::matcher
