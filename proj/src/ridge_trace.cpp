#include "ridge_trace.hpp"

#include <algorithm>

namespace fpm {

namespace {

bool listed(std::span<const Point> pts, Point p) {
  return std::find(pts.begin(), pts.end(), p) != pts.end();
}

}  // namespace

int preferredMember(const RingRun& run) {
  for (int idx : run.members) {
    if (kRingDx[idx] == 0 || kRingDy[idx] == 0) return idx;
  }
  return run.members.front();
}

std::vector<RingRun> ringRuns(const RasterImage& skel, Point p,
                              std::span<const Point> excluded) {
  std::array<bool, 8> on{};
  int count = 0;
  for (int i = 0; i < 8; ++i) {
    on[i] = skel.ridge(p.x + kRingDx[i], p.y + kRingDy[i]);
    count += on[i];
  }
  std::vector<RingRun> runs;
  if (count == 0) return runs;

  int start = 0;
  if (count < 8) {
    while (!(on[start] && !on[(start + 7) % 8])) ++start;
  }
  RingRun current;
  for (int k = 0; k < 8; ++k) {
    const int i = (start + k) % 8;
    if (on[i]) {
      current.members.push_back(i);
    } else if (!current.members.empty()) {
      runs.push_back(std::move(current));
      current = {};
    }
  }
  if (!current.members.empty()) runs.push_back(std::move(current));

  std::erase_if(runs, [&](const RingRun& run) {
    return std::any_of(run.members.begin(), run.members.end(), [&](int i) {
      return listed(excluded, {p.x + kRingDx[i], p.y + kRingDy[i]});
    });
  });
  return runs;
}

RidgeTrace traceRidge(const RasterImage& skel, Point origin, Point first,
                      int maxSteps, std::span<const Point> blocked) {
  std::vector<Point> visited(blocked.begin(), blocked.end());
  visited.push_back(origin);
  visited.push_back(first);

  RidgeTrace trace;
  trace.path.push_back(first);
  Point cur = first;
  for (;;) {
    const auto runs = ringRuns(skel, cur, visited);
    if (runs.empty()) {
      trace.stop = RidgeTrace::Stop::kDeadEnd;
      break;
    }
    if (runs.size() >= 2) {
      trace.stop = RidgeTrace::Stop::kBranch;
      break;
    }
    if (static_cast<int>(trace.path.size()) >= maxSteps) {
      trace.stop = RidgeTrace::Stop::kLength;
      break;
    }
    const int idx = preferredMember(runs.front());
    cur = {cur.x + kRingDx[idx], cur.y + kRingDy[idx]};
    trace.path.push_back(cur);
    visited.push_back(cur);
  }
  return trace;
}

}  // namespace fpm
