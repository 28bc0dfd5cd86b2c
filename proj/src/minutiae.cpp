#include "minutiae.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "ridge_trace.hpp"

namespace fpm {

double directionDegrees(int dx, int dy) {
  if (dx == 0 && dy == 0) return 0.0;
  int quarter = 0;
  while (!(dx > 0 && dy >= 0)) {
    const int ndx = dy;
    dy = -dx;
    dx = ndx;
    ++quarter;
  }
  double base = 0.0;
  if (dy == dx) {
    base = 45.0;
  } else if (dy != 0) {
    base = std::atan2(static_cast<double>(dy), static_cast<double>(dx)) * 180.0 /
           std::numbers::pi;
  }
  return base + 90.0 * quarter;
}

double angularDistance(double a, double b) {
  const double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

}  // namespace fpm

namespace fpm::minutiae {

namespace {

int roundDegrees(double deg) {
  return static_cast<int>(std::lround(deg)) % 360;
}

// Direction of a line, modulo 180.
double axialDistance(double a, double b) {
  const double d = std::fmod(std::fabs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

// Mean orientation of two axial directions in [0, 180). Returns false when the
// two are perpendicular and the mean is ambiguous.
bool axialMean(int a, int b, double& mean) {
  int diff = ((b - a) % 180 + 180) % 180;  // [0, 180)
  if (diff == 90) return false;
  if (diff > 90) diff -= 180;
  mean = std::fmod(a + diff / 2.0 + 360.0, 180.0);
  return true;
}

struct BranchWalk {
  Point first;
  RidgeTrace trace;
};

std::vector<BranchWalk> walkBranches(const RasterImage& skel, Point origin,
                                     int maxSteps) {
  const auto runs = ringRuns(skel, origin, {});
  std::vector<Point> firsts;
  firsts.reserve(runs.size());
  for (const auto& run : runs) {
    const int idx = preferredMember(run);
    firsts.push_back({origin.x + kRingDx[idx], origin.y + kRingDy[idx]});
  }
  std::vector<BranchWalk> walks;
  walks.reserve(firsts.size());
  for (std::size_t i = 0; i < firsts.size(); ++i) {
    std::vector<Point> blocked;
    for (std::size_t j = 0; j < firsts.size(); ++j) {
      if (j != i) blocked.push_back(firsts[j]);
    }
    walks.push_back({firsts[i], traceRidge(skel, origin, firsts[i], maxSteps, blocked)});
  }
  return walks;
}

// Grid of minutia indices for position lookups; -1 where none.
class MinutiaGrid {
 public:
  MinutiaGrid(const RasterImage& skel, const std::vector<Minutia>& ms,
              const std::vector<bool>& alive)
      : width_(skel.width()),
        cells_(static_cast<std::size_t>(skel.width()) * skel.height(), -1) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (alive[i]) cells_[static_cast<std::size_t>(ms[i].y) * width_ + ms[i].x] = static_cast<int>(i);
    }
  }
  int at(Point p) const { return cells_[static_cast<std::size_t>(p.y) * width_ + p.x]; }

 private:
  int width_;
  std::vector<int> cells_;
};

bool isEnding(const Minutia& m) { return m.type == MinutiaType::kEnding; }
bool isBifurcation(const Minutia& m) { return m.type == MinutiaType::kBifurcation; }

bool nearBoundary(const RasterImage& skel, const RoiMask& roi, const Minutia& m,
                  int edgeDist) {
  const int edge = std::min({m.x, m.y, skel.width() - 1 - m.x, skel.height() - 1 - m.y});
  if (edge <= edgeDist) return true;
  for (int y = m.y - edgeDist; y <= m.y + edgeDist; ++y) {
    for (int x = m.x - edgeDist; x <= m.x + edgeDist; ++x) {
      if (!roi.inside(x, y)) return true;
    }
  }
  return false;
}

bool brokenRidgePair(const Minutia& a, const Minutia& b, const FalseMinutiaeConfig& cfg) {
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  if (dx * dx + dy * dy > cfg.breakDist * cfg.breakDist) return false;
  if (angularDistance(a.theta, b.theta) < 180.0 - cfg.breakAngle) return false;
  const double ab = directionDegrees(dx, dy);
  const double ba = directionDegrees(-dx, -dy);
  return angularDistance(ab, a.theta + 180.0) <= cfg.breakAngle &&
         angularDistance(ba, b.theta + 180.0) <= cfg.breakAngle;
}

// Other bifurcations reached from bifurcation i through each of its branches
// within maxSteps; one entry per branch that ends on one.
std::vector<int> bifurcationNeighbours(const RasterImage& skel,
                                       const std::vector<Minutia>& ms,
                                       const MinutiaGrid& grid, int i, int maxSteps) {
  std::vector<int> out;
  for (const auto& walk : walkBranches(skel, {ms[i].x, ms[i].y}, maxSteps)) {
    if (walk.trace.stop != RidgeTrace::Stop::kBranch) continue;
    const int j = grid.at(walk.trace.path.back());
    if (j >= 0 && j != i && isBifurcation(ms[j])) out.push_back(j);
  }
  return out;
}

}  // namespace

int crossingNumber(const RasterImage& skel, int x, int y) {
  if (x < 1 || y < 1 || x >= skel.width() - 1 || y >= skel.height() - 1) {
    throw Error(ErrorCode::kOutOfBounds,
                "crossingNumber: (" + std::to_string(x) + "," + std::to_string(y) +
                    ") has neighbours outside the raster");
  }
  // Bit i set when ring neighbour i is ridge; table gives transitions / 2.
  static constexpr auto kTable = [] {
    std::array<int, 256> t{};
    for (int mask = 0; mask < 256; ++mask) {
      int transitions = 0;
      for (int i = 0; i < 8; ++i) {
        transitions += ((mask >> i) & 1) != ((mask >> ((i + 1) % 8)) & 1);
      }
      t[mask] = transitions / 2;
    }
    return t;
  }();
  int mask = 0;
  for (int i = 0; i < 8; ++i) {
    if (skel.at(x + kRingDx[i], y + kRingDy[i]) != 0) mask |= 1 << i;
  }
  return kTable[mask];
}

std::vector<Minutia> detectMinutiae(const RasterImage& skel, const RoiMask& roi) {
  std::vector<Minutia> out;
  for (int y = 1; y + 1 < skel.height(); ++y) {
    for (int x = 1; x + 1 < skel.width(); ++x) {
      if (!skel.at(x, y) || !roi.inside(x, y)) continue;
      const int cn = crossingNumber(skel, x, y);
      if (cn == 1) out.push_back({x, y, 0, MinutiaType::kEnding});
      if (cn == 3) out.push_back({x, y, 0, MinutiaType::kBifurcation});
    }
  }
  return out;
}

int estimateTheta(const RasterImage& skel, const Minutia& m, int traceLen) {
  if (traceLen < 3) {
    throw Error(ErrorCode::kInvalidArgument, "estimateTheta: traceLen must be >= 3");
  }
  if (!skel.ridge(m.x, m.y)) {
    throw Error(ErrorCode::kInvalidArgument, "estimateTheta: minutia is not on a ridge");
  }
  const auto walks = walkBranches(skel, {m.x, m.y}, traceLen);
  const std::size_t expected = isEnding(m) ? 1 : 3;
  if (walks.size() != expected) {
    throw Error(ErrorCode::kTruncatedRidge, "estimateTheta: ridge structure does not match minutia type");
  }
  std::array<int, 3> angles{};
  for (std::size_t i = 0; i < walks.size(); ++i) {
    const auto& path = walks[i].trace.path;
    if (path.size() < 3) {
      throw Error(ErrorCode::kTruncatedRidge,
                  "estimateTheta: fewer than 3 traceable ridge steps at (" +
                      std::to_string(m.x) + "," + std::to_string(m.y) + ")");
    }
    angles[i] = roundDegrees(directionDegrees(path.back().x - m.x, path.back().y - m.y));
  }
  if (isEnding(m)) return angles[0];

  std::array<int, 3> spread{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) spread[i] += static_cast<int>(angularDistance(angles[i], angles[j]));
    }
  }
  const int best = *std::max_element(spread.begin(), spread.end());
  std::vector<int> tied;
  for (int i = 0; i < 3; ++i) {
    if (spread[i] == best) tied.push_back(i);
  }
  if (tied.size() == 2) {
    // Mirror-symmetric pair: take the one whose counter-clockwise successor is
    // the third branch. Invariant under grid rotation.
    const int other = 3 - tied[0] - tied[1];
    auto ccwGap = [&](int from, int to) { return ((angles[to] - angles[from]) % 360 + 360) % 360; };
    for (int k = 0; k < 2; ++k) {
      const int b = tied[k];
      const int partner = tied[1 - k];
      if (ccwGap(b, other) < ccwGap(b, partner)) return angles[b];
    }
  }
  return angles[tied.front()];
}

std::vector<Minutia> removeFalseMinutiae(const RasterImage& skel, const RoiMask& roi,
                                         const std::vector<Minutia>& ms,
                                         const FalseMinutiaeConfig& cfg) {
  const std::size_t n = ms.size();
  std::vector<bool> alive(n, true);
  auto sweep = [&](auto&& markStage) {
    std::vector<bool> marked(n, false);
    markStage(marked);
    for (std::size_t i = 0; i < n; ++i) {
      if (marked[i]) alive[i] = false;
    }
  };

  // Boundary endings.
  sweep([&](std::vector<bool>& marked) {
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i] && isEnding(ms[i]) && nearBoundary(skel, roi, ms[i], cfg.edgeDist)) {
        marked[i] = true;
      }
    }
  });

  // Broken ridges: facing ending pairs.
  sweep([&](std::vector<bool>& marked) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || !isEnding(ms[i])) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (alive[j] && isEnding(ms[j]) && brokenRidgePair(ms[i], ms[j], cfg)) {
          marked[i] = marked[j] = true;
        }
      }
    }
  });

  // Short ridges and spurs.
  sweep([&](std::vector<bool>& marked) {
    const MinutiaGrid grid(skel, ms, alive);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || !isEnding(ms[i])) continue;
      const auto walks = walkBranches(skel, {ms[i].x, ms[i].y}, cfg.spurLen);
      if (walks.size() != 1 || walks[0].trace.stop == RidgeTrace::Stop::kLength) continue;
      const int j = grid.at(walks[0].trace.path.back());
      if (j >= 0 && j != static_cast<int>(i)) {
        marked[i] = true;
        marked[j] = true;
      }
    }
  });

  // Bridges.
  sweep([&](std::vector<bool>& marked) {
    const MinutiaGrid grid(skel, ms, alive);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || !isBifurcation(ms[i])) continue;
      for (int j : bifurcationNeighbours(skel, ms, grid, static_cast<int>(i), cfg.bridgeLen)) {
        double mean = 0.0;
        if (!axialMean(ms[i].theta, ms[j].theta, mean)) continue;
        const double path = directionDegrees(ms[j].x - ms[i].x, ms[j].y - ms[i].y);
        if (axialDistance(path, mean) >= cfg.bridgeAngle) {
          marked[i] = true;
          marked[j] = true;
        }
      }
    }
  });

  // Holes: two branches of one bifurcation ending on the same other one.
  sweep([&](std::vector<bool>& marked) {
    const MinutiaGrid grid(skel, ms, alive);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || !isBifurcation(ms[i])) continue;
      auto nbrs = bifurcationNeighbours(skel, ms, grid, static_cast<int>(i), cfg.holeLen);
      std::sort(nbrs.begin(), nbrs.end());
      for (std::size_t k = 1; k < nbrs.size(); ++k) {
        if (nbrs[k] == nbrs[k - 1]) {
          marked[i] = true;
          marked[nbrs[k]] = true;
        }
      }
    }
  });

  // Triangles of mutually connected bifurcations.
  sweep([&](std::vector<bool>& marked) {
    const MinutiaGrid grid(skel, ms, alive);
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || !isBifurcation(ms[i])) continue;
      auto nbrs = bifurcationNeighbours(skel, ms, grid, static_cast<int>(i), cfg.holeLen);
      adj[i] = std::move(nbrs);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int j : std::vector<int>(adj[i])) adj[j].push_back(static_cast<int>(i));
    }
    for (auto& a : adj) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    auto linked = [&](int a, int b) {
      return std::binary_search(adj[a].begin(), adj[a].end(), b);
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (int j : adj[i]) {
        for (int k : adj[i]) {
          if (j < k && linked(j, k)) {
            marked[i] = marked[j] = marked[k] = true;
          }
        }
      }
    }
  });

  std::vector<Minutia> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(ms[i]);
  }
  return out;
}

std::vector<Minutia> removeFalseMinutiae(const RasterImage& skel,
                                         const std::vector<Minutia>& ms,
                                         const FalseMinutiaeConfig& cfg) {
  return removeFalseMinutiae(skel, RoiMask::full(skel.width(), skel.height()), ms, cfg);
}

std::vector<Minutia> extract(const RasterImage& skel, const RoiMask& roi,
                             const MinutiaeConfig& cfg) {
  std::vector<Minutia> detected;
  for (Minutia m : detectMinutiae(skel, roi)) {
    try {
      m.theta = estimateTheta(skel, m, cfg.traceLen);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTruncatedRidge) throw;
      continue;
    }
    detected.push_back(m);
  }
  return removeFalseMinutiae(skel, roi, detected, cfg.falseMinutiae);
}

}  // namespace fpm::minutiae
