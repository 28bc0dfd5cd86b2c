#pragma once

#include <string>
#include <vector>

#include "features.hpp"
#include "preprocess.hpp"

namespace fpm {

struct SweepRange {
  double lo = 0.0;
  double hi = 0.2;
  double step = 0.001;

  // lo, lo+step, ... up to hi inclusive (within half a step).
  std::vector<double> thresholds() const;
};

SweepRange parseSweep(const std::string& text);

// Every tunable of the toolkit as one flat key/value document.
struct Config {
  preprocess::PreprocessConfig preprocess;
  features::FeatureConfig features;
  int cropRows = 4;
  int cropCols = 5;
  int cropWidth = 150;
  int cropHeight = 150;
  SweepRange sweep;
  double masterprintFraction = 0.04;
  double matchThreshold = 0.044;
  int workers = 1;

  // Throws kConfig for unknown keys and values that fail validation; the
  // config is unchanged on failure.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  // key = value lines; '#' starts a comment; values may be double-quoted.
  void loadFile(const std::string& path);
  void validate() const;

  static const std::vector<std::string>& keys();
};

}  // namespace fpm
