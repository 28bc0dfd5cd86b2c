#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "error.hpp"
#include "features.hpp"
#include "raster.hpp"

namespace testutil {

// Builds a binary or skeleton raster from rows of '#' (ridge) and '.'.
inline fpm::RasterImage fromRows(const std::vector<std::string>& rows,
                                 fpm::RasterKind kind = fpm::RasterKind::kSkeleton) {
  const int h = static_cast<int>(rows.size());
  const int w = h ? static_cast<int>(rows[0].size()) : 0;
  fpm::RasterImage img(w, h, kind);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = rows[y][x] == '#' ? 1 : 0;
  }
  return img;
}

inline void drawLine(fpm::RasterImage& img, int x0, int y0, int x1, int y1) {
  const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  for (int i = 0; i <= steps; ++i) {
    const int x = steps ? x0 + (x1 - x0) * i / steps : x0;
    const int y = steps ? y0 + (y1 - y0) * i / steps : y0;
    if (img.contains(x, y)) img.at(x, y) = 1;
  }
}

// Number of 8-connected ridge components.
inline int components8(const fpm::RasterImage& img) {
  std::vector<char> seen(static_cast<std::size_t>(img.width()) * img.height(), 0);
  int count = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y) || seen[y * img.width() + x]) continue;
      ++count;
      stack.push_back({x, y});
      seen[y * img.width() + x] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!img.ridge(nx, ny) || seen[ny * img.width() + nx]) continue;
            seen[ny * img.width() + nx] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return count;
}

inline fpm::RasterImage pad(const fpm::RasterImage& img, int margin) {
  fpm::RasterImage out(img.width() + 2 * margin, img.height() + 2 * margin, img.kind());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x + margin, y + margin) = img.at(x, y);
  }
  return out;
}

// Textbook two-subiteration Zhang-Suen thinning, written for clarity rather
// than speed; no post-processing.
inline fpm::RasterImage referenceZhangSuen(const fpm::RasterImage& in) {
  fpm::RasterImage img = in.withKind(fpm::RasterKind::kSkeleton);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int step = 0; step < 2; ++step) {
      std::vector<std::pair<int, int>> remove;
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          if (!img.at(x, y)) continue;
          // P2..P9 clockwise from north.
          const int p[8] = {img.ridge(x, y - 1), img.ridge(x + 1, y - 1), img.ridge(x + 1, y),
                            img.ridge(x + 1, y + 1), img.ridge(x, y + 1), img.ridge(x - 1, y + 1),
                            img.ridge(x - 1, y), img.ridge(x - 1, y - 1)};
          int b = 0;
          int a = 0;
          for (int i = 0; i < 8; ++i) {
            b += p[i];
            a += p[i] == 0 && p[(i + 1) % 8] == 1;
          }
          if (b < 2 || b > 6 || a != 1) continue;
          const bool ok = step == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                    : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
          if (ok) remove.push_back({x, y});
        }
      }
      for (auto [x, y] : remove) img.at(x, y) = 0;
      changed = changed || !remove.empty();
    }
  }
  return img;
}

// Maximum bipartite matching by augmenting paths over an explicit
// compatibility test; independent of the multiset shortcut.
inline int bruteForceMatching(const std::vector<fpm::MinutiaTuple>& p,
                              const std::vector<fpm::MinutiaTuple>& g) {
  auto compatible = [](const fpm::MinutiaTuple& a, const fpm::MinutiaTuple& b) {
    for (int i = 0; i < 8; ++i) {
      if (a.rcr[i] < 0 || b.rcr[i] < 0 || a.rcr[i] != b.rcr[i]) return false;
    }
    return a.dsq[0] == b.dsq[0] && a.dsq[1] == b.dsq[1] && a.dsq[2] == b.dsq[2];
  };
  std::vector<int> owner(g.size(), -1);
  std::function<bool(std::size_t, std::vector<char>&)> augment = [&](std::size_t i,
                                                                    std::vector<char>& used) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (used[j] || !compatible(p[i], g[j])) continue;
      used[j] = 1;
      if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]), used)) {
        owner[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<char> used(g.size(), 0);
    if (augment(i, used)) ++matched;
  }
  return matched;
}

// Random good-quality tuple drawn from a deliberately small value space so
// collisions are frequent.
inline fpm::MinutiaTuple smallTuple(std::mt19937_64& rng) {
  fpm::MinutiaTuple t;
  t.mq = 1;
  for (int& v : t.rcr) v = static_cast<int>(rng() % 2);
  int a = static_cast<int>(rng() % 3);
  int b = a + static_cast<int>(rng() % 2);
  t.dsq = {a, b, b};
  return t;
}

// A template of `count` distinct good tuples.
inline fpm::Template distinctTemplate(int count, int salt, fpm::TemplateIdentity id = {}) {
  fpm::Template t;
  t.identity = id;
  for (int i = 0; i < count; ++i) {
    fpm::MinutiaTuple tp;
    tp.mq = 1;
    tp.rcr = {i % 10, salt % 10, 1, 2, 3, 4, 5, 6};
    tp.dsq = {100 + i, 200 + salt, 300 + i + salt};
    t.tuples.push_back(tp);
  }
  return t;
}

// Code of the fpm::Error thrown by f; nullopt when nothing is thrown.
template <typename F>
std::optional<fpm::ErrorCode> errorCode(F&& f) {
  try {
    f();
  } catch (const fpm::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fpm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
