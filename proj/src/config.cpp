#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "error.hpp"

namespace fpm {

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorCode::kConfig, why); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int toInt(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    bad(key + ": '" + v + "' is not an integer");
  }
  if (used != v.size()) bad(key + ": '" + v + "' is not an integer");
  return out;
}

double toReal(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    bad(key + ": '" + v + "' is not a number");
  }
  if (used != v.size() || !std::isfinite(out)) bad(key + ": '" + v + "' is not a number");
  return out;
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"targetMean", [](Config& c, auto& k, auto& v) { c.preprocess.targetMean = toReal(k, v); }},
      {"targetVar", [](Config& c, auto& k, auto& v) { c.preprocess.targetVar = toReal(k, v); }},
      {"blockSize", [](Config& c, auto& k, auto& v) { c.preprocess.blockSize = toInt(k, v); }},
      {"varThreshold", [](Config& c, auto& k, auto& v) { c.preprocess.varThreshold = toReal(k, v); }},
      {"traceLen", [](Config& c, auto& k, auto& v) { c.features.minutiae.traceLen = toInt(k, v); }},
      {"edgeDist", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.edgeDist = toInt(k, v); }},
      {"breakDist", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.breakDist = toInt(k, v); }},
      {"breakAngle", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.breakAngle = toInt(k, v); }},
      {"spurLen", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.spurLen = toInt(k, v); }},
      {"bridgeLen", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.bridgeLen = toInt(k, v); }},
      {"bridgeAngle", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.bridgeAngle = toInt(k, v); }},
      {"holeLen", [](Config& c, auto& k, auto& v) { c.features.minutiae.falseMinutiae.holeLen = toInt(k, v); }},
      {"cropRows", [](Config& c, auto& k, auto& v) { c.cropRows = toInt(k, v); }},
      {"cropCols", [](Config& c, auto& k, auto& v) { c.cropCols = toInt(k, v); }},
      {"cropWidth", [](Config& c, auto& k, auto& v) { c.cropWidth = toInt(k, v); }},
      {"cropHeight", [](Config& c, auto& k, auto& v) { c.cropHeight = toInt(k, v); }},
      {"sweep", [](Config& c, auto&, auto& v) { c.sweep = parseSweep(v); }},
      {"masterprintFraction", [](Config& c, auto& k, auto& v) { c.masterprintFraction = toReal(k, v); }},
      {"matchThreshold", [](Config& c, auto& k, auto& v) { c.matchThreshold = toReal(k, v); }},
      {"workers", [](Config& c, auto& k, auto& v) { c.workers = toInt(k, v); }},
  };
  return table;
}

}  // namespace

std::vector<double> SweepRange::thresholds() const {
  std::vector<double> out;
  const long count = std::lround(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

SweepRange parseSweep(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) bad("sweep: expected lo:hi:step, got '" + text + "'");
  SweepRange r;
  r.lo = toReal("sweep", trim(text.substr(0, a)));
  r.hi = toReal("sweep", trim(text.substr(a + 1, b - a - 1)));
  r.step = toReal("sweep", trim(text.substr(b + 1)));
  if (!(r.step > 0.0) || r.hi < r.lo) bad("sweep: need step > 0 and hi >= lo");
  return r;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) bad("unknown config key '" + key + "'");
  Config next = *this;
  it->second(next, key, value);
  next.validate();
  *this = next;
}

std::string Config::get(const std::string& key) const {
  const auto& fm = features.minutiae.falseMinutiae;
  auto real = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const std::map<std::string, std::string> values = {
      {"targetMean", real(preprocess.targetMean)},
      {"targetVar", real(preprocess.targetVar)},
      {"blockSize", std::to_string(preprocess.blockSize)},
      {"varThreshold", real(preprocess.varThreshold)},
      {"traceLen", std::to_string(features.minutiae.traceLen)},
      {"edgeDist", std::to_string(fm.edgeDist)},
      {"breakDist", std::to_string(fm.breakDist)},
      {"breakAngle", std::to_string(fm.breakAngle)},
      {"spurLen", std::to_string(fm.spurLen)},
      {"bridgeLen", std::to_string(fm.bridgeLen)},
      {"bridgeAngle", std::to_string(fm.bridgeAngle)},
      {"holeLen", std::to_string(fm.holeLen)},
      {"cropRows", std::to_string(cropRows)},
      {"cropCols", std::to_string(cropCols)},
      {"cropWidth", std::to_string(cropWidth)},
      {"cropHeight", std::to_string(cropHeight)},
      {"sweep", real(sweep.lo) + ":" + real(sweep.hi) + ":" + real(sweep.step)},
      {"masterprintFraction", real(masterprintFraction)},
      {"matchThreshold", real(matchThreshold)},
      {"workers", std::to_string(workers)},
  };
  const auto it = values.find(key);
  if (it == values.end()) bad("unknown config key '" + key + "'");
  return it->second;
}

void Config::loadFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read config " + path);
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(path + ":" + std::to_string(lineNo) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    set(key, value);
  }
}

void Config::validate() const {
  const auto& fm = features.minutiae.falseMinutiae;
  if (!(preprocess.targetVar > 0)) bad("targetVar must be > 0");
  if (preprocess.blockSize < 4) bad("blockSize must be >= 4");
  if (preprocess.varThreshold < 0) bad("varThreshold must be >= 0");
  if (features.minutiae.traceLen < 3) bad("traceLen must be >= 3");
  if (fm.edgeDist < 0 || fm.breakDist < 0 || fm.spurLen < 1 || fm.bridgeLen < 1 || fm.holeLen < 1) {
    bad("false-minutiae distances must be positive");
  }
  if (fm.breakAngle < 0 || fm.breakAngle > 180 || fm.bridgeAngle < 0 || fm.bridgeAngle > 90) {
    bad("false-minutiae angles out of range");
  }
  if (cropRows < 1 || cropCols < 1 || cropWidth < 1 || cropHeight < 1) bad("crop spec must be positive");
  if (sweep.lo < 0 || sweep.hi > 1) bad("sweep must lie within [0, 1]");
  if (!(matchThreshold >= 0 && matchThreshold <= 1)) bad("matchThreshold must be in [0, 1]");
  if (!(masterprintFraction > 0 && masterprintFraction <= 1)) bad("masterprintFraction must be in (0, 1]");
  if (workers < 1) bad("workers must be >= 1");
}

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : setters()) v.push_back(k);
    return v;
  }();
  return names;
}

}  // namespace fpm
