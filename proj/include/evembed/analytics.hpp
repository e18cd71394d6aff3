#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "evembed/common.hpp"
#include "evembed/corpus.hpp"
#include "evembed/solver.hpp"

namespace evembed {

/// Unclamped cosine with explicit zero-vector conventions: two zero vectors
/// compare as 1 (nothing changed about nothing), exactly one zero as 0.
template <typename DerivedA, typename DerivedB>
double cosine_raw(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size()) throw DataError("cosine: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 && nv == 0.0) return 1.0;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.template cast<double>().cwiseProduct(v.template cast<double>()).sum() / (nu * nv);
}

/// Cosine clamped into [0,1]; negative associations read as "fully changed".
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& u,
                         const Eigen::MatrixBase<DerivedB>& v) {
  return std::clamp(cosine_raw(u, v), 0.0, 1.0);
}

struct SimilaritySeries {
  enum class Mode { kBaseline, kConsecutive };
  uint32_t event_index = 0;
  Mode mode = Mode::kBaseline;
  std::vector<double> values;
};

namespace detail {

inline void check_event(const EmbeddingSeries& series, uint32_t event) {
  if (event >= series.vocab_size()) throw DataError("event index out of range");
}

inline void check_slice(const EmbeddingSeries& series, uint32_t t) {
  if (t >= series.slice_count()) throw DataError("slice index out of range");
}

}  // namespace detail

/// values[t] = similarity of the event's vector at t to its vector at 0;
/// values[0] is exactly 1.
inline SimilaritySeries baseline_similarity_series(const EmbeddingSeries& series,
                                                   uint32_t event) {
  detail::check_event(series, event);
  SimilaritySeries out{event, SimilaritySeries::Mode::kBaseline, {}};
  out.values.reserve(series.slice_count());
  out.values.push_back(1.0);
  for (uint32_t t = 1; t < series.slice_count(); ++t)
    out.values.push_back(
        cosine_similarity(series.slices[0].row(event), series.slices[t].row(event)));
  return out;
}

/// values[i] = similarity between slices i and i+1; length T-1 (empty at T=1).
inline SimilaritySeries consecutive_similarity_series(const EmbeddingSeries& series,
                                                      uint32_t event) {
  detail::check_event(series, event);
  SimilaritySeries out{event, SimilaritySeries::Mode::kConsecutive, {}};
  for (uint32_t t = 1; t < series.slice_count(); ++t)
    out.values.push_back(
        cosine_similarity(series.slices[t - 1].row(event), series.slices[t].row(event)));
  return out;
}

struct Neighbor {
  uint32_t event_index = 0;
  double similarity = 0.0;
};

/// All other events ranked by descending similarity to `event` at slice t,
/// ties broken by ascending index, truncated to k.
inline std::vector<Neighbor> neighborhood(const EmbeddingSeries& series, uint32_t event,
                                          uint32_t t, uint32_t k) {
  detail::check_event(series, event);
  detail::check_slice(series, t);
  if (k < 1) throw DataError("k must be at least 1");
  const auto& H = series.slices[t];
  std::vector<Neighbor> all;
  all.reserve(series.vocab_size() - 1);
  for (uint32_t e = 0; e < series.vocab_size(); ++e) {
    if (e == event) continue;
    all.push_back({e, cosine_similarity(H.row(event), H.row(e))});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.event_index < b.event_index;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

/// Per-event share of the total embedding movement between slices t-1 and t.
/// Scores are normalized over all events before any filtering, so they are
/// comparable across differently filtered runs.
struct DriftReport {
  uint32_t slice_index = 0;  // the "to" slice t
  std::vector<double> scores;
  std::vector<uint32_t> ranking;  // included events, descending score
  uint64_t min_count_filter = 0;
  bool zero_drift = false;
};

inline DriftReport weighted_drift(const EmbeddingSeries& series, uint32_t t,
                                  const std::vector<uint64_t>& totals = {},
                                  uint64_t min_count = 0) {
  if (t < 1) throw DataError("drift needs t >= 1");
  detail::check_slice(series, t);
  const uint32_t E = series.vocab_size();
  if (!totals.empty() && totals.size() != E)
    throw DataError("totals size does not match vocabulary");

  DriftReport report;
  report.slice_index = t;
  report.min_count_filter = min_count;
  report.scores.resize(E);
  double total = 0.0;
  for (uint32_t e = 0; e < E; ++e) {
    report.scores[e] = (series.slices[t - 1].row(e) - series.slices[t].row(e)).norm();
    total += report.scores[e];
  }
  if (total == 0.0) {
    std::fill(report.scores.begin(), report.scores.end(), 0.0);
    report.zero_drift = true;
    return report;
  }
  for (auto& s : report.scores) s /= total;

  for (uint32_t e = 0; e < E; ++e)
    if (totals.empty() || totals[e] >= min_count) report.ranking.push_back(e);
  std::sort(report.ranking.begin(), report.ranking.end(), [&](uint32_t a, uint32_t b) {
    if (report.scores[a] != report.scores[b]) return report.scores[a] > report.scores[b];
    return a < b;
  });
  return report;
}

/// value[t] = Euclidean norm of the event's vector at slice t.
inline std::vector<double> norm_series(const EmbeddingSeries& series, uint32_t event) {
  detail::check_event(series, event);
  std::vector<double> out;
  out.reserve(series.slice_count());
  for (const auto& H : series.slices) out.push_back(H.row(event).norm());
  return out;
}

namespace detail {

/// Linear-interpolation quantile of a sample, q in [0,1].
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

}  // namespace detail

/// Corpus-wide usage-change survey: per-slice drift rankings (rare events
/// filtered out) plus a histogram counting, per slice, how many events'
/// drift share exceeds a cutoff pooled across all slices.
struct GlobalChangeReport {
  uint32_t top_m = 5;
  uint64_t min_count = 100;
  double quantile = 0.9;
  double cutoff = 0.0;
  std::vector<DriftReport> drifts;                // index i covers slice i+1
  std::vector<std::vector<Neighbor>> top;         // reusing Neighbor as (event, score)
  std::vector<uint32_t> histogram;                // index i covers slice i+1
};

inline GlobalChangeReport global_change_report(const EmbeddingSeries& series,
                                               const std::vector<uint64_t>& totals,
                                               uint32_t top_m, uint64_t min_count = 100,
                                               double quantile = 0.9) {
  if (top_m < 1) throw DataError("top_m must be at least 1");
  if (quantile < 0.0 || quantile > 1.0) throw DataError("quantile must be in [0,1]");
  GlobalChangeReport report;
  report.top_m = top_m;
  report.min_count = min_count;
  report.quantile = quantile;

  std::vector<double> pooled;
  for (uint32_t t = 1; t < series.slice_count(); ++t) {
    report.drifts.push_back(weighted_drift(series, t, totals, min_count));
    const auto& d = report.drifts.back();
    pooled.insert(pooled.end(), d.scores.begin(), d.scores.end());
  }
  report.cutoff = detail::quantile(pooled, quantile);

  for (const auto& d : report.drifts) {
    std::vector<Neighbor> top;
    for (uint32_t e : d.ranking) {
      if (top.size() >= top_m) break;
      top.push_back({e, d.scores[e]});
    }
    report.top.push_back(std::move(top));
    uint32_t above = 0;
    for (double s : d.scores)
      if (s > report.cutoff) ++above;
    report.histogram.push_back(above);
  }
  return report;
}

/// Flags positions whose value drops below the rolling mean of the previous
/// `window` values by more than drop_threshold.  Deliberately simple.
inline std::vector<uint32_t> detect_change_points(const SimilaritySeries& series,
                                                  double drop_threshold, uint32_t window) {
  if (drop_threshold <= 0.0 || drop_threshold >= 1.0)
    throw DataError("drop_threshold must be in (0,1)");
  if (window < 1) throw DataError("window must be at least 1");
  std::vector<uint32_t> flags;
  const auto& v = series.values;
  if (v.size() < window) return flags;
  for (size_t t = window; t < v.size(); ++t) {
    double mean = 0.0;
    for (size_t i = t - window; i < t; ++i) mean += v[i];
    mean /= static_cast<double>(window);
    if (v[t] < mean - drop_threshold) flags.push_back(static_cast<uint32_t>(t));
  }
  return flags;
}

/// Per-slice top-k neighborhoods plus the raw vectors for one event, the
/// data behind external 2-D projection tooling.
struct TrajectoryData {
  uint32_t event_index = 0;
  std::vector<std::vector<Neighbor>> neighbors_per_slice;
  std::vector<Eigen::VectorXd> rows;
};

inline TrajectoryData export_trajectory(const EmbeddingSeries& series, uint32_t event,
                                        uint32_t k) {
  detail::check_event(series, event);
  if (k < 1) throw DataError("k must be at least 1");
  TrajectoryData out;
  out.event_index = event;
  for (uint32_t t = 0; t < series.slice_count(); ++t) {
    out.neighbors_per_slice.push_back(neighborhood(series, event, t, k));
    out.rows.push_back(series.slices[t].row(event).transpose());
  }
  return out;
}

// --- Report serialization ----------------------------------------------------

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// `slice,event_id,score` rows for one drift report.
inline void write_drift_csv(const DriftReport& report, const EventVocabulary& vocab,
                            std::ostream& out, bool header = true) {
  if (header) out << "slice,event_id,score\n";
  for (uint32_t e : report.ranking)
    out << report.slice_index << "," << vocab.event_id(e) << ","
        << detail::fmt_g17(report.scores[e]) << "\n";
}

/// `slice,value` rows for a similarity or norm series.
inline void write_series_csv(const std::vector<double>& values, uint32_t first_slice,
                             std::ostream& out, const std::string& value_name = "value") {
  out << "slice," << value_name << "\n";
  for (size_t i = 0; i < values.size(); ++i)
    out << (first_slice + i) << "," << detail::fmt_g17(values[i]) << "\n";
}

}  // namespace evembed
