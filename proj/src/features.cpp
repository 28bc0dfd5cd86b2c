#include "features.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "error.hpp"
#include "json.hpp"

namespace fpm::features {

using ordered_json = nlohmann::ordered_json;

std::array<int, 3> neighborDistances(const std::vector<Minutia>& ms, std::size_t k) {
  if (ms.size() < 4) {
    throw Error(ErrorCode::kTooFewMinutiae,
                "neighborDistances needs at least 4 minutiae, got " + std::to_string(ms.size()));
  }
  if (k >= ms.size()) {
    throw Error(ErrorCode::kInvalidArgument, "neighborDistances: index out of range");
  }
  std::vector<std::tuple<int, int, int>> cand;  // (dsq, x, y)
  cand.reserve(ms.size() - 1);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i == k) continue;
    const int dx = ms[i].x - ms[k].x;
    const int dy = ms[i].y - ms[k].y;
    cand.emplace_back(dx * dx + dy * dy, ms[i].x, ms[i].y);
  }
  std::partial_sort(cand.begin(), cand.begin() + 3, cand.end());
  return {std::get<0>(cand[0]), std::get<0>(cand[1]), std::get<0>(cand[2])};
}

int startAxis(int theta) {
  if (theta < 0 || theta > 359) {
    throw Error(ErrorCode::kInvalidArgument, "startAxis: theta outside [0, 359]");
  }
  if (theta >= 338 || theta <= 22) return 0;
  return (theta - 23) / 45 + 1;
}

std::array<int, 8> ridgeCrossings(const RasterImage& skel, const RoiMask& roi,
                                  const Minutia& m) {
  std::array<int, 8> raw{};
  for (int a = 0; a < 8; ++a) {
    bool truncated = false;
    std::array<bool, kAxisLength> sample{};
    for (int s = 1; s <= kAxisLength; ++s) {
      const int x = m.x + s * kAxisDx[a];
      const int y = m.y + s * kAxisDy[a];
      if (!skel.contains(x, y) || !roi.inside(x, y)) {
        truncated = true;
        break;
      }
      sample[s - 1] = skel.at(x, y) != 0;
    }
    if (truncated) {
      raw[a] = -1;
      continue;
    }
    int s = 0;
    while (s < kAxisLength && sample[s]) ++s;
    int runs = 0;
    for (; s < kAxisLength; ++s) {
      if (sample[s] && (s == 0 || !sample[s - 1])) ++runs;
    }
    raw[a] = runs;
  }
  const int start = startAxis(m.theta);
  std::array<int, 8> ordered{};
  for (int i = 0; i < 8; ++i) ordered[i] = raw[(start + i) % 8];
  return ordered;
}

std::array<int, 8> ridgeCrossings(const RasterImage& skel, const Minutia& m) {
  return ridgeCrossings(skel, RoiMask::full(skel.width(), skel.height()), m);
}

int minutiaQuality(const std::array<int, 8>& rcr) {
  int absSum = 0;
  int sum = 0;
  for (int v : rcr) {
    absSum += std::abs(v);
    sum += v;
  }
  return absSum - sum == 0 ? 1 : 0;
}

MinutiaTuple buildTuple(const RasterImage& skel, const RoiMask& roi,
                        const std::vector<Minutia>& ms, std::size_t k) {
  MinutiaTuple t;
  t.rcr = ridgeCrossings(skel, roi, ms.at(k));
  t.mq = minutiaQuality(t.rcr);
  t.dsq = neighborDistances(ms, k);
  return t;
}

Template extractTemplate(const RasterImage& skel, const RoiMask& roi,
                         const TemplateIdentity& identity, const FeatureConfig& cfg) {
  Template t;
  t.identity = identity;
  t.minutiae = minutiae::extract(skel, roi, cfg.minutiae);
  if (t.minutiae.size() < 4) return t;
  for (std::size_t k = 0; k < t.minutiae.size(); ++k) {
    MinutiaTuple tuple = buildTuple(skel, roi, t.minutiae, k);
    if (tuple.mq == 1) t.tuples.push_back(tuple);
  }
  return t;
}

Template buildTemplate(const RasterImage& skel, const RoiMask& roi,
                       const TemplateIdentity& identity, const FeatureConfig& cfg) {
  Template t = extractTemplate(skel, roi, identity, cfg);
  if (!t.enrollable()) throw NotEnrollableError(static_cast<int>(t.tuples.size()));
  return t;
}

std::string templateToJson(const Template& t) {
  ordered_json j;
  j["subject"] = t.identity.subject;
  j["finger"] = t.identity.finger;
  j["impression"] = t.identity.impression;
  j["cropRow"] = t.identity.cropRow;
  j["cropCol"] = t.identity.cropCol;
  ordered_json tuples = ordered_json::array();
  for (const auto& tp : t.tuples) {
    ordered_json e;
    e["mq"] = tp.mq;
    e["rcr"] = tp.rcr;
    e["dsq"] = tp.dsq;
    tuples.push_back(std::move(e));
  }
  j["tuples"] = std::move(tuples);
  ordered_json ms = ordered_json::array();
  for (const auto& m : t.minutiae) {
    ordered_json e;
    e["x"] = m.x;
    e["y"] = m.y;
    e["theta"] = m.theta;
    e["type"] = static_cast<int>(m.type);
    ms.push_back(std::move(e));
  }
  j["minutiae"] = std::move(ms);
  return j.dump() + "\n";
}

namespace {

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::kCorruptTemplate, why);
}

int intField(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) corrupt(std::string("missing field '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) corrupt(std::string("field '") + key + "' is not an integer");
  return v.get<int>();
}

template <std::size_t N>
std::array<int, N> intArray(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array() || obj.at(key).size() != N) {
    corrupt(std::string("field '") + key + "' must be an array of " + std::to_string(N));
  }
  std::array<int, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const auto& v = obj.at(key)[i];
    if (!v.is_number_integer()) corrupt(std::string("field '") + key + "' holds a non-integer");
    out[i] = v.get<int>();
  }
  return out;
}

}  // namespace

Template templateFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("template is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) corrupt("template must be a JSON object");
  Template t;
  t.identity = {intField(j, "subject"), intField(j, "finger"), intField(j, "impression"),
                intField(j, "cropRow"), intField(j, "cropCol")};
  if (!j.contains("tuples") || !j["tuples"].is_array()) corrupt("missing tuples array");
  for (const auto& e : j["tuples"]) {
    MinutiaTuple tp;
    tp.mq = intField(e, "mq");
    tp.rcr = intArray<8>(e, "rcr");
    tp.dsq = intArray<3>(e, "dsq");
    for (int v : tp.rcr) {
      if (v < -1 || v > kAxisLength / 2) corrupt("rcr value out of range");
    }
    if (tp.mq != minutiaQuality(tp.rcr)) corrupt("mq disagrees with rcr");
    if (tp.mq != 1) corrupt("stored tuples must be good quality");
    if (tp.dsq[0] < 0 || tp.dsq[0] > tp.dsq[1] || tp.dsq[1] > tp.dsq[2]) {
      corrupt("dsq must be non-negative and ascending");
    }
    t.tuples.push_back(tp);
  }
  if (!j.contains("minutiae") || !j["minutiae"].is_array()) corrupt("missing minutiae array");
  for (const auto& e : j["minutiae"]) {
    Minutia m;
    m.x = intField(e, "x");
    m.y = intField(e, "y");
    m.theta = intField(e, "theta");
    const int type = intField(e, "type");
    if (m.x < 0 || m.y < 0 || m.theta < 0 || m.theta > 359) corrupt("minutia out of range");
    if (type != 1 && type != 3) corrupt("minutia type must be 1 or 3");
    m.type = static_cast<MinutiaType>(type);
    t.minutiae.push_back(m);
  }
  return t;
}

std::string templateFileName(const TemplateIdentity& id) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "S%d_F%d_I%d_R%dC%d.tpl.json", id.subject, id.finger,
                id.impression, id.cropRow, id.cropCol);
  return buf;
}

void saveTemplate(const Template& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path);
  os << templateToJson(t);
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path);
}

Template loadTemplate(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return templateFromJson(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void writeMinutiaeCsv(std::ostream& os, const std::vector<Minutia>& ms) {
  os << "x,y,theta,type\n";
  for (const auto& m : ms) {
    os << m.x << ',' << m.y << ',' << m.theta << ','
       << (m.type == MinutiaType::kEnding ? "ending" : "bifurcation") << '\n';
  }
}

}  // namespace fpm::features
