#include "matcher.hpp"

#include <algorithm>

#include "error.hpp"

namespace fpm::matcher {

bool correspond(const MinutiaTuple& p, const MinutiaTuple& g) {
  for (int i = 0; i < 8; ++i) {
    if (p.rcr[i] != g.rcr[i] || p.rcr[i] < 0 || g.rcr[i] < 0) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (p.dsq[j] != g.dsq[j]) return false;
  }
  return true;
}

MatchKeys::MatchKeys(std::span<const MinutiaTuple> tuples)
    : count_(static_cast<int>(tuples.size())) {
  keys_.reserve(tuples.size());
  for (const auto& t : tuples) {
    if (std::any_of(t.rcr.begin(), t.rcr.end(), [](int v) { return v < 0; })) continue;
    std::uint64_t packed = 0;
    for (int v : t.rcr) {
      if (v > 15) throw Error(ErrorCode::kInvalidArgument, "ridge-crossing count above 15");
      packed = (packed << 4) | static_cast<std::uint64_t>(v);
    }
    for (int d : t.dsq) {
      if (d < 0) throw Error(ErrorCode::kInvalidArgument, "negative squared distance");
    }
    Key k;
    k.hi = (packed << 32) | static_cast<std::uint32_t>(t.dsq[0]);
    k.lo = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.dsq[1])) << 32) |
           static_cast<std::uint32_t>(t.dsq[2]);
    keys_.push_back(k);
  }
  std::sort(keys_.begin(), keys_.end());
}

int MatchKeys::intersect(const MatchKeys& other) const noexcept {
  int common = 0;
  auto a = keys_.begin();
  auto b = other.keys_.begin();
  while (a != keys_.end() && b != other.keys_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++common;
      ++a;
      ++b;
    }
  }
  return common;
}

int countCorrespondence(std::span<const MinutiaTuple> probe,
                        std::span<const MinutiaTuple> gallery) {
  return MatchKeys(probe).intersect(MatchKeys(gallery));
}

double similarityScore(int mc, int n, int m) {
  if (n <= 0 || m <= 0) {
    throw Error(ErrorCode::kEmptyTemplate, "similarity needs non-empty templates");
  }
  const double num = static_cast<double>(mc) * (static_cast<double>(n) + m);
  return num / (2.0 * static_cast<double>(n) * m);
}

MatchResult similarity(const Template& probe, const Template& gallery, bool force) {
  const int n = static_cast<int>(probe.tuples.size());
  const int m = static_cast<int>(gallery.tuples.size());
  if (n == 0 || m == 0) {
    throw Error(ErrorCode::kEmptyTemplate, "similarity: a template has no good-quality tuples");
  }
  if (!force && (n < kMinEnrollableTuples || m < kMinEnrollableTuples)) {
    throw NotEnrollableError(std::min(n, m));
  }
  MatchResult r;
  r.n = n;
  r.m = m;
  r.mc = countCorrespondence(probe.tuples, gallery.tuples);
  r.score = similarityScore(r.mc, n, m);
  return r;
}

}  // namespace fpm::matcher
