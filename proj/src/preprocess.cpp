#include "preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "error.hpp"

namespace fpm::preprocess {

namespace {

void requireKind(const RasterImage& img, RasterKind kind, const char* op) {
  if (img.kind() != kind) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(op) + ": unexpected raster kind");
  }
}

struct BlockStats {
  double mean = 0.0;
  double variance = 0.0;
};

BlockStats blockStats(const RasterImage& img, int bx, int by, int blockSize) {
  const int x0 = bx * blockSize;
  const int y0 = by * blockSize;
  const int x1 = std::min(x0 + blockSize, img.width());
  const int y1 = std::min(y0 + blockSize, img.height());
  double sum = 0.0;
  double sumSq = 0.0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const double v = img.at(x, y);
      sum += v;
      sumSq += v * v;
    }
  }
  const double count = static_cast<double>((x1 - x0) * (y1 - y0));
  BlockStats s;
  s.mean = sum / count;
  s.variance = std::max(0.0, sumSq / count - s.mean * s.mean);
  return s;
}

// Neighbour order P2..P9 of the Zhang-Suen formulation: N, NE, E, SE, S, SW,
// W, NW.
constexpr std::array<int, 8> kZsDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kZsDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> neighbours(const RasterImage& img, int x, int y) {
  std::array<int, 8> p{};
  for (int i = 0; i < 8; ++i) p[i] = img.ridge(x + kZsDx[i], y + kZsDy[i]);
  return p;
}

bool zhangSuenCandidate(const std::array<int, 8>& p, bool firstPass) {
  int b = 0;
  int a = 0;
  for (int i = 0; i < 8; ++i) {
    b += p[i];
    if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
  }
  if (b < 2 || b > 6 || a != 1) return false;
  // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W).
  if (firstPass) return p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0;
  return p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0;
}

// Removing (x, y) keeps its ridge neighbours 8-connected among themselves.
bool isSimple(const RasterImage& img, int x, int y) {
  std::array<int, 8> parent{};
  std::array<bool, 8> on{};
  int count = 0;
  for (int i = 0; i < 8; ++i) {
    parent[i] = i;
    on[i] = img.ridge(x + kZsDx[i], y + kZsDy[i]);
    count += on[i];
  }
  if (count < 2) return false;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      if (!on[i] || !on[j]) continue;
      if (std::abs(kZsDx[i] - kZsDx[j]) <= 1 &&
          std::abs(kZsDy[i] - kZsDy[j]) <= 1) {
        parent[find(i)] = find(j);
      }
    }
  }
  int roots = 0;
  for (int i = 0; i < 8; ++i) {
    if (on[i] && find(i) == i) ++roots;
  }
  return roots == 1;
}

bool removeOneSquarePixel(RasterImage& img) {
  bool changed = false;
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (!(img.ridge(x, y) && img.ridge(x + 1, y) && img.ridge(x, y + 1) &&
            img.ridge(x + 1, y + 1))) {
        continue;
      }
      const std::array<std::array<int, 2>, 4> corners = {
          {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}}};
      for (const auto& c : corners) {
        if (isSimple(img, c[0], c[1])) {
          img.at(c[0], c[1]) = 0;
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

}  // namespace

NormalizeResult normalize(const RasterImage& img, double targetMean,
                          double targetVar) {
  requireKind(img, RasterKind::kGrayscale, "normalize");
  if (!(targetVar > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "normalize: targetVar must be > 0");
  }
  NormalizeResult result{img, false};
  if (img.empty()) return result;

  double sum = 0.0;
  double sumSq = 0.0;
  for (std::uint8_t v : img.pixels()) {
    sum += v;
    sumSq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(img.pixels().size());
  const double mean = sum / n;
  const double var = std::max(0.0, sumSq / n - mean * mean);

  auto toByte = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  auto out = result.image.pixels();
  if (var == 0.0) {
    std::fill(out.begin(), out.end(), toByte(targetMean));
    result.zeroVariance = true;
    return result;
  }
  const double gain = std::sqrt(targetVar / var);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = toByte(targetMean + (img.pixels()[i] - mean) * gain);
  }
  return result;
}

RoiMask segmentRoi(const RasterImage& img, int blockSize, double varThreshold) {
  requireKind(img, RasterKind::kGrayscale, "segmentRoi");
  if (blockSize < 4) {
    throw Error(ErrorCode::kInvalidArgument, "segmentRoi: blockSize must be >= 4");
  }
  RoiMask candidate(img.width(), img.height(), blockSize);
  for (int by = 0; by < candidate.blocksY(); ++by) {
    for (int bx = 0; bx < candidate.blocksX(); ++bx) {
      candidate.setBlock(bx, by,
                         blockStats(img, bx, by, blockSize).variance >= varThreshold);
    }
  }

  // Largest 4-connected component; the earliest in row-major order wins ties.
  const int bw = candidate.blocksX();
  const int bh = candidate.blocksY();
  std::vector<int> label(static_cast<std::size_t>(bw) * bh, -1);
  int bestLabel = -1;
  int bestSize = 0;
  int next = 0;
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      if (!candidate.block(bx, by) || label[by * bw + bx] >= 0) continue;
      int size = 0;
      std::queue<std::pair<int, int>> q;
      q.emplace(bx, by);
      label[by * bw + bx] = next;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        ++size;
        constexpr int dx[] = {1, -1, 0, 0};
        constexpr int dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k];
          const int ny = cy + dy[k];
          if (nx < 0 || ny < 0 || nx >= bw || ny >= bh) continue;
          if (!candidate.block(nx, ny) || label[ny * bw + nx] >= 0) continue;
          label[ny * bw + nx] = next;
          q.emplace(nx, ny);
        }
      }
      if (size > bestSize) {
        bestSize = size;
        bestLabel = next;
      }
      ++next;
    }
  }
  if (bestLabel < 0) {
    throw Error(ErrorCode::kEmptyRoi, "segmentRoi: no block reaches the variance threshold");
  }
  RoiMask roi(img.width(), img.height(), blockSize);
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      roi.setBlock(bx, by, label[by * bw + bx] == bestLabel);
    }
  }
  return roi;
}

RasterImage binarize(const RasterImage& img, const RoiMask& roi, int blockSize) {
  requireKind(img, RasterKind::kGrayscale, "binarize");
  if (roi.width() != img.width() || roi.height() != img.height()) {
    throw Error(ErrorCode::kInvalidArgument, "binarize: ROI dimensions differ from image");
  }
  if (blockSize <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "binarize: blockSize must be positive");
  }
  RasterImage out(img.width(), img.height(), RasterKind::kBinary);
  const int bw = (img.width() + blockSize - 1) / blockSize;
  const int bh = (img.height() + blockSize - 1) / blockSize;
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const double mean = blockStats(img, bx, by, blockSize).mean;
      const int x1 = std::min((bx + 1) * blockSize, img.width());
      const int y1 = std::min((by + 1) * blockSize, img.height());
      for (int y = by * blockSize; y < y1; ++y) {
        for (int x = bx * blockSize; x < x1; ++x) {
          out.at(x, y) = roi.inside(x, y) && img.at(x, y) < mean ? 1 : 0;
        }
      }
    }
  }
  return out;
}

RasterImage thin(const RasterImage& img) {
  requireKind(img, RasterKind::kBinary, "thin");
  RasterImage work = img;
  std::vector<std::size_t> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (bool firstPass : {true, false}) {
      marked.clear();
      for (int y = 0; y < work.height(); ++y) {
        for (int x = 0; x < work.width(); ++x) {
          if (work.at(x, y) && zhangSuenCandidate(neighbours(work, x, y), firstPass)) {
            marked.push_back(static_cast<std::size_t>(y) * work.width() + x);
          }
        }
      }
      for (std::size_t idx : marked) work.pixels()[idx] = 0;
      changed = changed || !marked.empty();
    }
  }
  while (removeOneSquarePixel(work)) {
  }
  return work.withKind(RasterKind::kSkeleton);
}

Preprocessed run(const RasterImage& gray, const PreprocessConfig& cfg) {
  const RasterImage norm = normalize(gray, cfg.targetMean, cfg.targetVar).image;
  RoiMask roi = segmentRoi(norm, cfg.blockSize, cfg.varThreshold);
  RasterImage skeleton = thin(binarize(norm, roi, cfg.blockSize));
  return {std::move(skeleton), std::move(roi)};
}

}  // namespace fpm::preprocess
