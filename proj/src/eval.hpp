#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gallery.hpp"
#include "matcher.hpp"

namespace fpm::eval {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
// handled exactly once; callers write only to slots owned by i.
void parallelFor(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

// Flat, read-only view of a gallery prepared for bulk matching.
class FrozenGallery {
 public:
  explicit FrozenGallery(const gallery::GalleryIndex& g);

  std::size_t size() const noexcept { return ids_.size(); }
  const TemplateIdentity& id(std::size_t i) const { return ids_[i]; }
  int tupleCount(std::size_t i) const { return counts_[i]; }
  const matcher::MatchKeys& keys(std::size_t i) const { return keys_[i]; }
  // Index into subjects() of entry i's subject.
  int subjectIndex(std::size_t i) const { return subjectIndex_[i]; }
  const std::vector<int>& subjects() const noexcept { return subjects_; }
  const gallery::Manifest& manifest() const noexcept { return manifest_; }

 private:
  std::vector<TemplateIdentity> ids_;
  std::vector<int> counts_;
  std::vector<matcher::MatchKeys> keys_;
  std::vector<int> subjectIndex_;
  std::vector<int> subjects_;
  gallery::Manifest manifest_;
};

// Correspondence counts for every unordered pair, stored as an upper
// triangle. Scores are derived on demand so the stored data is integral.
class ScoreMatrix {
 public:
  ScoreMatrix(const FrozenGallery& g, int workers);

  std::size_t size() const noexcept { return size_; }
  std::uint64_t pairCount() const noexcept {
    return static_cast<std::uint64_t>(size_) * (size_ - (size_ > 0 ? 1 : 0)) / 2;
  }
  int mc(std::size_t i, std::size_t j) const;
  double score(std::size_t i, std::size_t j) const;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  std::size_t size_ = 0;
  std::vector<int> counts_;
  std::vector<std::uint16_t> mc_;
};

struct ScoreRecord {
  TemplateIdentity probe;
  TemplateIdentity gallery;
  double score = 0.0;
  bool genuine = false;
};

// Every unordered pair once, in (i < j) gallery order.
std::vector<ScoreRecord> allPairsScores(const gallery::GalleryIndex& g, int workers = 1);

enum class Outcome { kCorrect, kFalseMatch, kRejected };
const char* outcomeName(Outcome o);

struct RankedSubject {
  int subject = 0;
  double score = 0.0;  // best score over the subject's partials
};

struct Identification {
  Outcome outcome = Outcome::kRejected;
  std::vector<RankedSubject> ranking;  // score descending, ties by subject id
  bool tie = false;                    // top score shared by several subjects
};

// Ranks gallery subjects for an external probe. A gallery entry with the
// probe's own identity is skipped.
Identification identify(const gallery::GalleryIndex& g, const Template& probe, double theta);

// IMR for `above` impostor partial scores exceeding the threshold.
double imr(int above, const gallery::Manifest& m);
double imr(const gallery::GalleryIndex& g, const Template& probe, double theta);

struct MasterPrint {
  TemplateIdentity probe;
  std::vector<int> subjects;  // other subjects matched above the threshold
};

struct SweepPoint {
  double threshold = 0.0;
  int nt = 0;
  int nc = 0;
  int nf = 0;
  int nr = 0;
  int masterprints = 0;
  int ties = 0;
  double maxImr = 0.0;

  double tmr() const { return nt ? static_cast<double>(nc) / nt : 0.0; }
  double fmr() const { return nt ? static_cast<double>(nf) / nt : 0.0; }
  double fnmr() const { return nt ? static_cast<double>(nr) / nt : 0.0; }
  double vr() const { return tmr(); }
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// FMR(t) = share of impostor scores >= t, FNMR(t) = share of genuine scores
// < t. Both are constant between consecutive distinct scores; each interval
// is represented by its midpoint (the lowest by the smallest score, the
// highest by the next double above the largest). The representative
// minimising |FMR - FNMR| is returned, the smallest on ties.
EerResult eerCompute(std::span<const double> genuine, std::span<const double> impostor);
// Same, over ascending distinct (score, count) lists.
EerResult eerFromCounts(const std::vector<std::pair<double, std::uint64_t>>& genuine,
                        const std::vector<std::pair<double, std::uint64_t>>& impostor);

struct VerifyResult {
  std::map<int, int> histogram;  // genuine matches above threshold -> probes
  double above4 = 0.0;
  double above8 = 0.0;
};

struct ScatterPoint {
  TemplateIdentity probe;
  double score = 0.0;  // best score over all other partials
  bool genuine = false;
};

// All-vs-all evaluation where every enrolled partial is a probe against the
// rest of the gallery. Pair scores are computed once; every threshold query
// afterwards works from per-probe summaries.
class Evaluation {
 public:
  Evaluation(const gallery::GalleryIndex& g, int workers = 1);

  const FrozenGallery& gallery() const noexcept { return frozen_; }
  const ScoreMatrix& matrix() const noexcept { return matrix_; }

  SweepPoint point(double theta, double fraction) const;
  std::vector<SweepPoint> sweep(std::span<const double> thresholds, double fraction) const;
  std::vector<MasterPrint> masterprints(double theta, double fraction) const;
  std::vector<double> cmc(double theta, int maxRank) const;
  VerifyResult verify(double theta) const;
  // Pair-level genuine/impostor split over all unordered pairs.
  EerResult eer() const;
  std::vector<ScatterPoint> scatter() const;
  double imr(std::size_t probe, double theta) const;

 private:
  struct ProbeSummary {
    std::vector<double> subjectMax;  // per subject index, -1 when absent
    int best = -1;                   // subject index
    double bestScore = -1.0;
    bool tie = false;
    std::vector<double> otherMaxDesc;  // positive other-subject maxima
    std::vector<double> impostorDesc;  // positive impostor partial scores
    std::vector<double> genuineDesc;   // positive same-subject partial scores
  };

  int subjectRank(const ProbeSummary& s, int own, double theta) const;

  FrozenGallery frozen_;
  ScoreMatrix matrix_;
  std::vector<ProbeSummary> probes_;
};

std::vector<MasterPrint> masterprintScan(const gallery::GalleryIndex& g, double theta,
                                         double fraction = 0.04, int workers = 1);
std::vector<double> cmcCurve(const gallery::GalleryIndex& g, double theta, int maxRank,
                             int workers = 1);
VerifyResult verifyDistribution(const gallery::GalleryIndex& g, double theta, int workers = 1);

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> zeroMasterprintThreshold;  // smallest swept threshold
};

SweepResult sweep(const Evaluation& e, std::span<const double> thresholds, double fraction);

// Writes metrics.csv, scatter.csv, cmc.csv, eer.json, masterprints.json,
// verify.json and summary.json. reportTheta selects the operating point for
// the threshold-specific files.
void writeReports(const Evaluation& e, const SweepResult& s, double reportTheta, double fraction,
                  const std::string& outDir);

std::string masterprintsJson(const std::vector<MasterPrint>& mps, double theta, double fraction);
std::string identityKey(const TemplateIdentity& id);

}  // namespace fpm::eval
