#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "error.hpp"
#include "image_io.hpp"
#include "pipeline.hpp"

namespace fs = std::filesystem;

namespace fpm::synth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBorderMargin = 18;
constexpr int kMinSeparation = 12;

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double wrap(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a <= 0) a += 2 * kPi;
  return a - kPi;
}

struct Wave {
  double kx = 0;
  double ky = 0;
  double amplitude = 0;
  double offset = 0;
};

struct Field {
  double omega = 0;
  double nx = 1;
  double ny = 0;
  double phase0 = 0;
  std::vector<Wave> waves;

  double phase(double x, double y) const {
    double p = phase0 + omega * (nx * x + ny * y);
    for (const auto& w : waves) p += w.amplitude * std::sin(w.kx * x + w.ky * y + w.offset);
    return p;
  }
  void gradient(double x, double y, double& gx, double& gy) const {
    gx = omega * nx;
    gy = omega * ny;
    for (const auto& w : waves) {
      const double c = w.amplitude * std::cos(w.kx * x + w.ky * y + w.offset);
      gx += c * w.kx;
      gy += c * w.ky;
    }
  }
};

Field makeField(const SynthSpec& spec) {
  std::mt19937_64 rng(mix(spec.orientationSeed, 0x6f7269656e74ULL));
  Field f;
  f.omega = 2 * kPi / spec.ridgePeriod;
  const double alpha = unit(rng) * kPi;
  f.nx = std::cos(alpha);
  f.ny = std::sin(alpha);
  f.phase0 = unit(rng) * 2 * kPi;
  if (!spec.flatField) {
    constexpr int kWaves = 3;
    for (int k = 0; k < kWaves; ++k) {
      const double wavelength = 180.0 + 140.0 * unit(rng);
      const double dir = unit(rng) * 2 * kPi;
      const double kappa = 2 * kPi / wavelength;
      Wave w;
      w.kx = kappa * std::cos(dir);
      w.ky = kappa * std::sin(dir);
      w.amplitude = 0.25 * f.omega / (kWaves * kappa);
      w.offset = unit(rng) * 2 * kPi;
      f.waves.push_back(w);
    }
  }
  return f;
}

struct Site {
  double x = 0;
  double y = 0;
  int charge = 1;
  MinutiaType type = MinutiaType::kEnding;
  double theta = 0;  // radians
};

// Phase and gradient at site i from the smooth field plus every other site.
void restPhase(const Field& f, const std::vector<Site>& sites, std::size_t i, double& phase,
               double& gx, double& gy) {
  const double x = sites[i].x;
  const double y = sites[i].y;
  phase = f.phase(x, y);
  f.gradient(x, y, gx, gy);
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (j == i) continue;
    const double dx = x - sites[j].x;
    const double dy = y - sites[j].y;
    const double r2 = dx * dx + dy * dy;
    phase += sites[j].charge * std::atan2(dy, dx);
    gx += sites[j].charge * (-dy / r2);
    gy += sites[j].charge * (dx / r2);
  }
}

// Shifts each site along the local phase gradient until the dislocation's
// ridge line leaves the site in the direction that yields its type: the
// extra line of a charge-s dislocation lies on the -s * rot90(g) side; an
// ending puts a ridge there, a bifurcation a valley.
void placeSites(const Field& f, std::vector<Site>& sites) {
  for (int iter = 0; iter < 50; ++iter) {
    double worst = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      double r = 0;
      double gx = 0;
      double gy = 0;
      restPhase(f, sites, i, r, gx, gy);
      const double s = sites[i].charge;
      double ux = -gy;
      double uy = gx;
      if (sites[i].type == MinutiaType::kEnding) {
        ux *= -s;
        uy *= -s;
      } else {
        ux *= s;
        uy *= s;
      }
      const double theta = std::atan2(uy, ux);
      const double target = kPi - s * theta;
      const double delta = wrap(target - r);
      const double g2 = gx * gx + gy * gy;
      sites[i].x += delta * gx / g2;
      sites[i].y += delta * gy / g2;
      sites[i].theta = theta;
      worst = std::max(worst, std::fabs(delta));
    }
    if (worst < 1e-9) break;
  }
}

void validate(const SynthSpec& spec) {
  if (spec.width < 1 || spec.height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synth: raster size must be positive");
  }
  if (!(spec.ridgePeriod >= 4.0)) {
    throw Error(ErrorCode::kInvalidArgument, "synth: ridge period must be at least 4 px");
  }
  if (!(spec.noiseLevel >= 0.0 && spec.noiseLevel <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "synth: noise level outside [0, 1]");
  }
  for (std::size_t i = 0; i < spec.planted.size(); ++i) {
    const auto& p = spec.planted[i];
    if (p.x < kBorderMargin || p.y < kBorderMargin || p.x > spec.width - 1 - kBorderMargin ||
        p.y > spec.height - 1 - kBorderMargin) {
      throw Error(ErrorCode::kSpecInfeasible, "synth: planted minutia closer than 18 px to a border");
    }
    if (p.type != MinutiaType::kEnding && p.type != MinutiaType::kBifurcation) {
      throw Error(ErrorCode::kInvalidArgument, "synth: planted type must be ending or bifurcation");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const int dx = p.x - spec.planted[j].x;
      const int dy = p.y - spec.planted[j].y;
      if (dx * dx + dy * dy < kMinSeparation * kMinSeparation) {
        throw Error(ErrorCode::kSpecInfeasible, "synth: planted minutiae closer than 12 px");
      }
    }
  }
}

}  // namespace

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Synthesized generate(const SynthSpec& spec) {
  validate(spec);
  const Field field = makeField(spec);

  std::vector<Site> sites;
  for (std::size_t i = 0; i < spec.planted.size(); ++i) {
    Site s;
    s.x = spec.planted[i].x;
    s.y = spec.planted[i].y;
    s.type = spec.planted[i].type;
    s.charge = (mix(spec.orientationSeed, 0x5173 + i) & 1) ? 1 : -1;
    sites.push_back(s);
  }
  placeSites(field, sites);

  Synthesized out;
  out.image = RasterImage(spec.width, spec.height, RasterKind::kGrayscale);
  std::mt19937_64 noise(mix(spec.noiseSeed, 0x6e6f697365ULL));
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double base = field.phase(x, y);
      std::complex<double> w(std::cos(base), std::sin(base));
      for (std::size_t j = 0; j < sites.size(); ++j) {
        const std::complex<double> d(x - sites[j].x, y - sites[j].y);
        w *= sites[j].charge > 0 ? d : std::conj(d);
        if ((j & 7) == 7) {
          const double a = std::abs(w);
          if (a > 0) w /= a;
        }
      }
      const double a = std::abs(w);
      const double c = a > 0 ? w.real() / a : 0.0;
      double v = 128.0 + 100.0 * c;
      if (spec.noiseLevel > 0) v += spec.noiseLevel * 127.0 * (2.0 * unit(noise) - 1.0);
      out.image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }

  // The ridge (or stem) centre line starts a quarter period from the
  // singular point, which is where a skeleton places the minutia.
  const double tip = spec.ridgePeriod / 4.0;
  for (const auto& s : sites) {
    Minutia m;
    m.x = static_cast<int>(std::lround(s.x + tip * std::cos(s.theta)));
    m.y = static_cast<int>(std::lround(s.y + tip * std::sin(s.theta)));
    double deg = s.theta * 180.0 / kPi;
    if (deg < 0) deg += 360.0;
    m.theta = static_cast<int>(std::lround(deg)) % 360;
    m.type = s.type;
    out.truth.push_back(m);
  }
  return out;
}

std::vector<PlantedMinutia> samplePlanted(int width, int height, int count, int minSpacing,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 0x706c616e74ULL));
  std::vector<PlantedMinutia> out;
  const int spanX = width - 2 * kBorderMargin;
  const int spanY = height - 2 * kBorderMargin;
  if (spanX <= 0 || spanY <= 0) return out;
  const long long spacing2 = static_cast<long long>(minSpacing) * minSpacing;
  for (long long attempt = 0; attempt < 100LL * count && static_cast<int>(out.size()) < count;
       ++attempt) {
    PlantedMinutia p;
    p.x = kBorderMargin + static_cast<int>(unit(rng) * spanX);
    p.y = kBorderMargin + static_cast<int>(unit(rng) * spanY);
    p.type = unit(rng) < 0.5 ? MinutiaType::kEnding : MinutiaType::kBifurcation;
    const bool clear = std::all_of(out.begin(), out.end(), [&](const PlantedMinutia& q) {
      const long long dx = p.x - q.x;
      const long long dy = p.y - q.y;
      return dx * dx + dy * dy >= spacing2;
    });
    if (clear) out.push_back(p);
  }
  return out;
}

namespace {

DatasetResult build(int subjects, int impressions, const DatasetSpec& spec, const Config& cfg,
                    const std::string* outDir) {
  if (subjects < 1 || impressions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synth: subjects and impressions must be at least 1");
  }
  if (!spec.fieldSeeds.empty() && static_cast<int>(spec.fieldSeeds.size()) != subjects) {
    throw Error(ErrorCode::kInvalidArgument, "synth: one field seed per subject required");
  }
  if (spec.minSpacing < kMinSeparation) {
    throw Error(ErrorCode::kSpecInfeasible, "synth: minimum spacing below 12 px");
  }
  const gallery::CropSpec cropSpec = pipeline::cropSpec(cfg);
  fs::path printDir;
  if (outDir) {
    printDir = fs::path(*outDir) / "prints";
    std::error_code ec;
    fs::create_directories(printDir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + printDir.string());
  }

  DatasetResult r;
  r.gallery.manifest.subjects = subjects;
  r.gallery.manifest.fingersPerSubject = 1;
  r.gallery.manifest.impressionsPerFinger = impressions;
  r.gallery.manifest.partialsPerPrint = cropSpec.rows * cropSpec.cols;
  r.gallery.manifest.cropSpec = cropSpec;
  r.gallery.manifest.sourceDatasetName = "synthetic";

  for (int s = 1; s <= subjects; ++s) {
    const std::uint64_t fieldSeed =
        spec.fieldSeeds.empty() ? mix(spec.seed, static_cast<std::uint64_t>(s)) : spec.fieldSeeds[s - 1];
    SynthSpec ss;
    ss.width = spec.width;
    ss.height = spec.height;
    ss.ridgePeriod = spec.ridgePeriod;
    ss.orientationSeed = fieldSeed;
    ss.planted = samplePlanted(spec.width, spec.height, spec.minutiae, spec.minSpacing, fieldSeed);
    ss.noiseLevel = spec.noiseLevel;
    for (int k = 1; k <= impressions; ++k) {
      ss.noiseSeed = mix(mix(spec.seed, 0x2000 + static_cast<std::uint64_t>(s)),
                         static_cast<std::uint64_t>(k));
      const Synthesized print = generate(ss);
      ++r.prints;
      if (outDir) {
        const std::string stem = std::to_string(s) + "_" + std::to_string(k);
        io::writeImage(print.image, (printDir / (stem + ".pgm")).string());
        if (k == 1) {
          std::ofstream os(printDir / (std::to_string(s) + "_truth.csv"), std::ios::binary);
          features::writeMinutiaeCsv(os, print.truth);
        }
      }
      for (const auto& crop : gallery::cropGrid(print.image, cropSpec).crops) {
        ++r.partials;
        Template t;
        try {
          t = pipeline::extractImage(crop.image, {s, 1, k, crop.row, crop.col}, cfg);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kIo) throw;
          ++r.rejected;
          continue;
        }
        if (!t.enrollable()) {
          ++r.rejected;
          continue;
        }
        r.gallery.enroll(std::move(t));
      }
    }
  }
  if (outDir) gallery::saveGallery(r.gallery, *outDir);
  return r;
}

}  // namespace

DatasetResult makeSyntheticDataset(int subjects, int impressions, const DatasetSpec& spec,
                                   const Config& cfg) {
  return build(subjects, impressions, spec, cfg, nullptr);
}

DatasetResult makeSyntheticDataset(int subjects, int impressions, const DatasetSpec& spec,
                                   const Config& cfg, const std::string& outDir) {
  return build(subjects, impressions, spec, cfg, &outDir);
}

}  // namespace fpm::synth
