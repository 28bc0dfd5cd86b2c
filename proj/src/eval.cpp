#include "eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "error.hpp"

namespace fs = std::filesystem;

namespace fpm::eval {

void parallelFor(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t n = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(count, 1));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n - 1);
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

FrozenGallery::FrozenGallery(const gallery::GalleryIndex& g) : manifest_(g.manifest) {
  for (const auto& [id, t] : g.entries()) {
    ids_.push_back(id);
    counts_.push_back(static_cast<int>(t.tuples.size()));
    keys_.emplace_back(t.tuples);
    subjects_.push_back(id.subject);
  }
  std::sort(subjects_.begin(), subjects_.end());
  subjects_.erase(std::unique(subjects_.begin(), subjects_.end()), subjects_.end());
  for (const auto& id : ids_) {
    subjectIndex_.push_back(static_cast<int>(
        std::lower_bound(subjects_.begin(), subjects_.end(), id.subject) - subjects_.begin()));
  }
  if (manifest_.subjects == 0) manifest_.subjects = static_cast<int>(subjects_.size());
}

ScoreMatrix::ScoreMatrix(const FrozenGallery& g, int workers) : size_(g.size()) {
  counts_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) counts_[i] = g.tupleCount(i);
  mc_.assign(static_cast<std::size_t>(pairCount()), 0);
  parallelFor(size_, workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < size_; ++j) {
      const int mc = g.keys(i).intersect(g.keys(j));
      if (mc > std::numeric_limits<std::uint16_t>::max()) {
        throw Error(ErrorCode::kInternal, "correspondence count overflow");
      }
      mc_[offset(i, j)] = static_cast<std::uint16_t>(mc);
    }
  });
}

std::size_t ScoreMatrix::offset(std::size_t i, std::size_t j) const {
  return i * (2 * size_ - i - 1) / 2 + (j - i - 1);
}

int ScoreMatrix::mc(std::size_t i, std::size_t j) const {
  if (i == j || i >= size_ || j >= size_) {
    throw Error(ErrorCode::kInvalidArgument, "score matrix index");
  }
  if (i > j) std::swap(i, j);
  return mc_[offset(i, j)];
}

double ScoreMatrix::score(std::size_t i, std::size_t j) const {
  return matcher::similarityScore(mc(i, j), counts_[i], counts_[j]);
}

std::vector<ScoreRecord> allPairsScores(const gallery::GalleryIndex& g, int workers) {
  const FrozenGallery fg(g);
  const ScoreMatrix sm(fg, workers);
  std::vector<ScoreRecord> out;
  out.reserve(static_cast<std::size_t>(sm.pairCount()));
  for (std::size_t i = 0; i < fg.size(); ++i) {
    for (std::size_t j = i + 1; j < fg.size(); ++j) {
      out.push_back({fg.id(i), fg.id(j), sm.score(i, j), fg.id(i).subject == fg.id(j).subject});
    }
  }
  return out;
}

const char* outcomeName(Outcome o) {
  switch (o) {
    case Outcome::kCorrect: return "correct";
    case Outcome::kFalseMatch: return "falseMatch";
    case Outcome::kRejected: return "rejected";
  }
  return "unknown";
}

Identification identify(const gallery::GalleryIndex& g, const Template& probe, double theta) {
  if (probe.tuples.empty()) {
    throw Error(ErrorCode::kEmptyTemplate, "identify: probe has no good-quality tuples");
  }
  const matcher::MatchKeys pk(probe.tuples);
  const int n = static_cast<int>(probe.tuples.size());
  std::map<int, double> best;
  for (const auto& [id, t] : g.entries()) {
    if (id == probe.identity) continue;
    const int mc = pk.intersect(matcher::MatchKeys(t.tuples));
    const double s = matcher::similarityScore(mc, n, static_cast<int>(t.tuples.size()));
    auto [it, inserted] = best.try_emplace(id.subject, s);
    if (!inserted) it->second = std::max(it->second, s);
  }
  Identification r;
  for (const auto& [subject, s] : best) r.ranking.push_back({subject, s});
  std::stable_sort(r.ranking.begin(), r.ranking.end(),
                   [](const RankedSubject& a, const RankedSubject& b) { return a.score > b.score; });
  if (r.ranking.empty() || r.ranking.front().score < theta) {
    r.outcome = Outcome::kRejected;
    return r;
  }
  r.tie = r.ranking.size() > 1 && r.ranking[1].score == r.ranking[0].score;
  r.outcome = r.ranking.front().subject == probe.identity.subject ? Outcome::kCorrect
                                                                    : Outcome::kFalseMatch;
  return r;
}

double imr(int above, const gallery::Manifest& m) {
  const long long denom = static_cast<long long>(m.subjects - 1) * m.partialsPerPrint *
                          m.printsPerSubject();
  if (denom <= 0) return 0.0;
  return static_cast<double>(above) / static_cast<double>(denom);
}

double imr(const gallery::GalleryIndex& g, const Template& probe, double theta) {
  const matcher::MatchKeys pk(probe.tuples);
  const int n = static_cast<int>(probe.tuples.size());
  int above = 0;
  for (const auto& [id, t] : g.entries()) {
    if (id.subject == probe.identity.subject) continue;
    const int mc = pk.intersect(matcher::MatchKeys(t.tuples));
    if (matcher::similarityScore(mc, n, static_cast<int>(t.tuples.size())) > theta) ++above;
  }
  gallery::Manifest m = g.manifest;
  if (m.subjects == 0) m.subjects = FrozenGallery(g).manifest().subjects;
  return imr(above, m);
}

namespace {

// Number of leading entries of a descending list strictly above theta.
int countAbove(const std::vector<double>& desc, double theta) {
  return static_cast<int>(
      std::partition_point(desc.begin(), desc.end(), [&](double v) { return v > theta; }) -
      desc.begin());
}

int masterprintMinimum(int subjects, double fraction) {
  const double need = std::ceil(fraction * subjects - 1e-9);
  return std::max(1, static_cast<int>(need));
}

}  // namespace

Evaluation::Evaluation(const gallery::GalleryIndex& g, int workers)
    : frozen_(g), matrix_(frozen_, workers), probes_(frozen_.size()) {
  const std::size_t subjects = frozen_.subjects().size();
  parallelFor(frozen_.size(), workers, [&](std::size_t i) {
    ProbeSummary& s = probes_[i];
    s.subjectMax.assign(subjects, -1.0);
    const int own = frozen_.subjectIndex(i);
    for (std::size_t j = 0; j < frozen_.size(); ++j) {
      if (j == i) continue;
      const double v = matrix_.score(i, j);
      const int sj = frozen_.subjectIndex(j);
      s.subjectMax[sj] = std::max(s.subjectMax[sj], v);
      if (v > 0.0) (sj == own ? s.genuineDesc : s.impostorDesc).push_back(v);
    }
    for (std::size_t k = 0; k < subjects; ++k) {
      if (static_cast<int>(k) != own && s.subjectMax[k] > 0.0) s.otherMaxDesc.push_back(s.subjectMax[k]);
      if (s.subjectMax[k] > s.bestScore) {
        s.bestScore = s.subjectMax[k];
        s.best = static_cast<int>(k);
        s.tie = false;
      } else if (s.subjectMax[k] == s.bestScore && s.best >= 0) {
        s.tie = true;
      }
    }
    std::sort(s.otherMaxDesc.rbegin(), s.otherMaxDesc.rend());
    std::sort(s.impostorDesc.rbegin(), s.impostorDesc.rend());
    std::sort(s.genuineDesc.rbegin(), s.genuineDesc.rend());
  });
}

SweepPoint Evaluation::point(double theta, double fraction) const {
  SweepPoint p;
  p.threshold = theta;
  const int need = masterprintMinimum(frozen_.manifest().subjects, fraction);
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    const ProbeSummary& s = probes_[i];
    ++p.nt;
    if (s.best < 0 || s.bestScore < theta) {
      ++p.nr;
    } else {
      if (s.tie) ++p.ties;
      (s.best == frozen_.subjectIndex(i) ? p.nc : p.nf) += 1;
    }
    if (countAbove(s.otherMaxDesc, theta) >= need) ++p.masterprints;
    p.maxImr = std::max(p.maxImr, imr(i, theta));
  }
  return p;
}

std::vector<SweepPoint> Evaluation::sweep(std::span<const double> thresholds,
                                          double fraction) const {
  std::vector<SweepPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) out.push_back(point(t, fraction));
  return out;
}

double Evaluation::imr(std::size_t probe, double theta) const {
  return eval::imr(countAbove(probes_.at(probe).impostorDesc, theta), frozen_.manifest());
}

std::vector<MasterPrint> Evaluation::masterprints(double theta, double fraction) const {
  const int need = masterprintMinimum(frozen_.manifest().subjects, fraction);
  std::vector<MasterPrint> out;
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    const ProbeSummary& s = probes_[i];
    if (countAbove(s.otherMaxDesc, theta) < need) continue;
    MasterPrint mp;
    mp.probe = frozen_.id(i);
    const int own = frozen_.subjectIndex(i);
    for (std::size_t k = 0; k < s.subjectMax.size(); ++k) {
      if (static_cast<int>(k) != own && s.subjectMax[k] > theta) {
        mp.subjects.push_back(frozen_.subjects()[k]);
      }
    }
    out.push_back(std::move(mp));
  }
  return out;
}

int Evaluation::subjectRank(const ProbeSummary& s, int own, double theta) const {
  const double mine = s.subjectMax[own];
  if (mine < 0.0 || mine < theta) return 0;
  int rank = 1;
  for (std::size_t k = 0; k < s.subjectMax.size(); ++k) {
    const int ki = static_cast<int>(k);
    if (ki == own) continue;
    if (s.subjectMax[k] > mine || (s.subjectMax[k] == mine && ki < own)) ++rank;
  }
  return rank;
}

std::vector<double> Evaluation::cmc(double theta, int maxRank) const {
  if (maxRank < 1) throw Error(ErrorCode::kInvalidArgument, "cmc: maxRank must be at least 1");
  std::vector<int> hits(static_cast<std::size_t>(maxRank) + 1, 0);
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    const int r = subjectRank(probes_[i], frozen_.subjectIndex(i), theta);
    if (r >= 1 && r <= maxRank) ++hits[r];
  }
  std::vector<double> out;
  int cumulative = 0;
  for (int k = 1; k <= maxRank; ++k) {
    cumulative += hits[k];
    out.push_back(probes_.empty() ? 0.0 : static_cast<double>(cumulative) / probes_.size());
  }
  return out;
}

VerifyResult Evaluation::verify(double theta) const {
  VerifyResult v;
  int above4 = 0;
  int above8 = 0;
  for (const auto& s : probes_) {
    const int c = countAbove(s.genuineDesc, theta);
    ++v.histogram[c];
    if (c > 4) ++above4;
    if (c > 8) ++above8;
  }
  if (!probes_.empty()) {
    v.above4 = static_cast<double>(above4) / probes_.size();
    v.above8 = static_cast<double>(above8) / probes_.size();
  }
  return v;
}

namespace {

std::vector<std::pair<double, std::uint64_t>> runLengths(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, std::uint64_t>> out;
  for (double d : v) {
    if (!out.empty() && out.back().first == d) {
      ++out.back().second;
    } else {
      out.emplace_back(d, 1);
    }
  }
  return out;
}

}  // namespace

EerResult Evaluation::eer() const {
  std::vector<double> genuine;
  std::vector<double> impostor;
  std::uint64_t impostorZeros = 0;
  for (std::size_t i = 0; i < frozen_.size(); ++i) {
    for (std::size_t j = i + 1; j < frozen_.size(); ++j) {
      const double s = matrix_.score(i, j);
      if (frozen_.subjectIndex(i) == frozen_.subjectIndex(j)) {
        genuine.push_back(s);
      } else if (s == 0.0) {
        ++impostorZeros;
      } else {
        impostor.push_back(s);
      }
    }
  }
  auto g = runLengths(genuine);
  auto im = runLengths(impostor);
  if (impostorZeros > 0) im.insert(im.begin(), {0.0, impostorZeros});
  return eerFromCounts(g, im);
}

std::vector<ScatterPoint> Evaluation::scatter() const {
  std::vector<ScatterPoint> out;
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    const ProbeSummary& s = probes_[i];
    out.push_back({frozen_.id(i), std::max(s.bestScore, 0.0),
                   s.best >= 0 && s.best == frozen_.subjectIndex(i)});
  }
  return out;
}

EerResult eerFromCounts(const std::vector<std::pair<double, std::uint64_t>>& genuine,
                        const std::vector<std::pair<double, std::uint64_t>>& impostor) {
  std::uint64_t totalG = 0;
  std::uint64_t totalI = 0;
  for (const auto& [_, c] : genuine) totalG += c;
  for (const auto& [_, c] : impostor) totalI += c;
  if (totalG == 0 || totalI == 0) {
    throw Error(ErrorCode::kEmptyScoreList, "eer needs genuine and impostor scores");
  }
  std::vector<double> values;
  for (const auto& [v, _] : genuine) values.push_back(v);
  for (const auto& [v, _] : impostor) values.push_back(v);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // Counts of scores <= the current value.
  std::uint64_t gBelow = 0;
  std::uint64_t iBelow = 0;
  std::size_t gi = 0;
  std::size_t ii = 0;
  EerResult best;
  double bestGap = std::numeric_limits<double>::infinity();
  auto consider = [&](double theta) {
    const double fmr = static_cast<double>(totalI - iBelow) / static_cast<double>(totalI);
    const double fnmr = static_cast<double>(gBelow) / static_cast<double>(totalG);
    const double gap = std::fabs(fmr - fnmr);
    if (gap < bestGap) {
      bestGap = gap;
      best = {(fmr + fnmr) / 2.0, theta};
    }
  };
  consider(values.front());
  for (std::size_t k = 0; k < values.size(); ++k) {
    while (gi < genuine.size() && genuine[gi].first <= values[k]) gBelow += genuine[gi++].second;
    while (ii < impostor.size() && impostor[ii].first <= values[k]) iBelow += impostor[ii++].second;
    double rep;
    if (k + 1 < values.size()) {
      rep = values[k] + (values[k + 1] - values[k]) / 2.0;
      if (!(rep > values[k])) rep = values[k + 1];
    } else {
      rep = std::nextafter(values[k], std::numeric_limits<double>::infinity());
    }
    consider(rep);
  }
  return best;
}

EerResult eerCompute(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) {
    throw Error(ErrorCode::kEmptyScoreList, "eerCompute: empty score list");
  }
  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> im(impostor.begin(), impostor.end());
  for (double v : g) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "eerCompute: non-finite score");
  }
  for (double v : im) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "eerCompute: non-finite score");
  }
  return eerFromCounts(runLengths(g), runLengths(im));
}

std::vector<MasterPrint> masterprintScan(const gallery::GalleryIndex& g, double theta,
                                         double fraction, int workers) {
  return Evaluation(g, workers).masterprints(theta, fraction);
}

std::vector<double> cmcCurve(const gallery::GalleryIndex& g, double theta, int maxRank,
                             int workers) {
  return Evaluation(g, workers).cmc(theta, maxRank);
}

VerifyResult verifyDistribution(const gallery::GalleryIndex& g, double theta, int workers) {
  return Evaluation(g, workers).verify(theta);
}

SweepResult sweep(const Evaluation& e, std::span<const double> thresholds, double fraction) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorCode::kInvalidArgument, "sweep thresholds must be ascending");
  }
  SweepResult r;
  r.points = e.sweep(thresholds, fraction);
  for (const auto& p : r.points) {
    if (!r.zeroMasterprintThreshold && p.masterprints == 0) r.zeroMasterprintThreshold = p.threshold;
  }
  return r;
}

namespace {

std::string f6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

void writeText(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  os << text;
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + p.string());
}

}  // namespace

std::string identityKey(const TemplateIdentity& id) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "S%d_F%d_I%d_R%dC%d", id.subject, id.finger, id.impression,
                id.cropRow, id.cropCol);
  return buf;
}

std::string masterprintsJson(const std::vector<MasterPrint>& mps, double theta, double fraction) {
  std::string s = "{\n  \"threshold\": " + f6(theta) + ",\n  \"fraction\": " + f6(fraction) +
                  ",\n  \"count\": " + std::to_string(mps.size()) + ",\n  \"masterprints\": [";
  for (std::size_t i = 0; i < mps.size(); ++i) {
    s += i ? ",\n    " : "\n    ";
    s += "{\"probe\": " + quoted(identityKey(mps[i].probe)) + ", \"subjects\": [";
    for (std::size_t k = 0; k < mps[i].subjects.size(); ++k) {
      if (k) s += ", ";
      s += std::to_string(mps[i].subjects[k]);
    }
    s += "]}";
  }
  s += mps.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return s;
}

void writeReports(const Evaluation& e, const SweepResult& sw, double reportTheta, double fraction,
                  const std::string& outDir) {
  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + outDir + ": " + ec.message());
  const fs::path dir(outDir);

  std::string metrics = "threshold,NT,NC,NF,NR,TMR,FMR,FNMR,masterprintCount,maxIMR\n";
  for (const auto& p : sw.points) {
    metrics += f6(p.threshold) + "," + std::to_string(p.nt) + "," + std::to_string(p.nc) + "," +
               std::to_string(p.nf) + "," + std::to_string(p.nr) + "," + f6(p.tmr()) + "," +
               f6(p.fmr()) + "," + f6(p.fnmr()) + "," + std::to_string(p.masterprints) + "," +
               f6(p.maxImr) + "\n";
  }
  writeText(dir / "metrics.csv", metrics);

  std::string scatter = "probe,score,genuine\n";
  for (const auto& sp : e.scatter()) {
    scatter += identityKey(sp.probe) + "," + f6(sp.score) + "," + (sp.genuine ? "1" : "0") + "\n";
  }
  writeText(dir / "scatter.csv", scatter);

  const int maxRank = std::max<int>(1, static_cast<int>(e.gallery().subjects().size()));
  const auto cmc = e.cmc(reportTheta, maxRank);
  std::string cmcCsv = "rank,rate\n";
  for (std::size_t k = 0; k < cmc.size(); ++k) {
    cmcCsv += std::to_string(k + 1) + "," + f6(cmc[k]) + "\n";
  }
  writeText(dir / "cmc.csv", cmcCsv);

  std::optional<EerResult> eer;
  try {
    eer = e.eer();
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kEmptyScoreList) throw;
  }
  writeText(dir / "eer.json",
            eer ? "{\n  \"eer\": " + f6(eer->eer) + ",\n  \"threshold\": " + f6(eer->threshold) +
                      "\n}\n"
                : std::string("{\n  \"eer\": null,\n  \"threshold\": null\n}\n"));

  const auto mps = e.masterprints(reportTheta, fraction);
  writeText(dir / "masterprints.json", masterprintsJson(mps, reportTheta, fraction));

  const VerifyResult v = e.verify(reportTheta);
  std::string verify = "{\n  \"threshold\": " + f6(reportTheta) + ",\n  \"above4\": " +
                       f6(v.above4) + ",\n  \"above8\": " + f6(v.above8) +
                       ",\n  \"histogram\": [";
  bool first = true;
  for (const auto& [count, probes] : v.histogram) {
    verify += first ? "\n    " : ",\n    ";
    first = false;
    verify += "{\"count\": " + std::to_string(count) + ", \"probes\": " + std::to_string(probes) + "}";
  }
  verify += v.histogram.empty() ? "]\n}\n" : "\n  ]\n}\n";
  writeText(dir / "verify.json", verify);

  const SweepPoint rp = e.point(reportTheta, fraction);
  const auto& m = e.gallery().manifest();
  std::string summary = "{\n";
  summary += "  \"templates\": " + std::to_string(e.gallery().size()) + ",\n";
  summary += "  \"pairs\": " + std::to_string(e.matrix().pairCount()) + ",\n";
  summary += "  \"N\": " + std::to_string(m.subjects) + ",\n";
  summary += "  \"J\": " + std::to_string(m.fingersPerSubject) + ",\n";
  summary += "  \"K\": " + std::to_string(m.impressionsPerFinger) + ",\n";
  summary += "  \"L\": " + std::to_string(m.partialsPerPrint) + ",\n";
  summary += "  \"zeroMasterprintThreshold\": " +
             (sw.zeroMasterprintThreshold ? f6(*sw.zeroMasterprintThreshold) : std::string("null")) +
             ",\n";
  summary += "  \"reportThreshold\": " + f6(reportTheta) + ",\n";
  summary += "  \"NT\": " + std::to_string(rp.nt) + ",\n";
  summary += "  \"NC\": " + std::to_string(rp.nc) + ",\n";
  summary += "  \"NF\": " + std::to_string(rp.nf) + ",\n";
  summary += "  \"NR\": " + std::to_string(rp.nr) + ",\n";
  summary += "  \"TMR\": " + f6(rp.tmr()) + ",\n";
  summary += "  \"VR\": " + f6(rp.vr()) + ",\n";
  summary += "  \"FMR\": " + f6(rp.fmr()) + ",\n";
  summary += "  \"FNMR\": " + f6(rp.fnmr()) + ",\n";
  summary += "  \"ties\": " + std::to_string(rp.ties) + ",\n";
  summary += "  \"masterprintCount\": " + std::to_string(mps.size()) + ",\n";
  summary += "  \"maxIMR\": " + f6(rp.maxImr) + ",\n";
  summary += "  \"eer\": " + (eer ? f6(eer->eer) : std::string("null")) + ",\n";
  summary += "  \"eerThreshold\": " + (eer ? f6(eer->threshold) : std::string("null")) + "\n";
  summary += "}\n";
  writeText(dir / "summary.json", summary);
}

}  // namespace fpm::eval
