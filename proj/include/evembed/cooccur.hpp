#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <vector>

#include "evembed/common.hpp"
#include "evembed/corpus.hpp"

namespace evembed {

/// Symmetric co-occurrence counts for one slice.  Each unordered position
/// pair is counted exactly once and stored under (min(i,j), max(i,j)); a pair
/// of equal events at two distinct positions contributes to (i,i).  Marginals
/// are plain per-event token counts and token_count the slice's token total,
/// shared denominators for the joint and marginal probabilities.
class PairCounts {
public:
  static uint64_t key(uint32_t i, uint32_t j) {
    if (i > j) std::swap(i, j);
    return (static_cast<uint64_t>(i) << 32) | j;
  }
  static std::pair<uint32_t, uint32_t> unkey(uint64_t k) {
    return {static_cast<uint32_t>(k >> 32), static_cast<uint32_t>(k & 0xffffffffu)};
  }

  explicit PairCounts(uint32_t slice_index = 0) : slice_index_(slice_index) {}

  void add_pair(uint32_t i, uint32_t j, uint64_t n = 1) { cells_[key(i, j)] += n; }

  void add_token(uint32_t i) {
    if (i >= marginals_.size()) marginals_.resize(i + 1, 0);
    ++marginals_[i];
    ++token_count_;
  }

  uint64_t pair_count(uint32_t i, uint32_t j) const {
    auto it = cells_.find(key(i, j));
    return it == cells_.end() ? 0 : it->second;
  }

  uint64_t marginal(uint32_t i) const { return i < marginals_.size() ? marginals_[i] : 0; }
  uint64_t token_count() const { return token_count_; }
  uint32_t slice_index() const { return slice_index_; }

  /// Ordered (by (i, j)) iteration over stored cells.
  const std::map<uint64_t, uint64_t>& cells() const { return cells_; }

private:
  uint32_t slice_index_;
  std::map<uint64_t, uint64_t> cells_;
  std::vector<uint64_t> marginals_;
  uint64_t token_count_ = 0;
};

/// Counts co-occurrences within a centered window of `half_window` positions
/// on each side.  For a total neighborhood of c positions pass c/2; the
/// window is symmetric so c must be even.  Windows never cross sequence
/// boundaries.
inline PairCounts count_pairs(const TimeSlice& slice, uint32_t half_window) {
  if (half_window == 0) throw DataError("half_window must be at least 1");
  PairCounts counts(slice.slice_index);
  for (const auto& seq : slice.sequences) {
    const auto& ev = seq.events;
    const size_t n = ev.size();
    for (size_t p = 0; p < n; ++p) {
      counts.add_token(ev[p].second);
      const size_t hi = std::min(n, p + 1 + half_window);
      for (size_t q = p + 1; q < hi; ++q) counts.add_pair(ev[p].second, ev[q].second);
    }
  }
  return counts;
}

/// One slice's positive PMI matrix in sparse symmetric form.  Only strictly
/// positive cells are stored, each unordered pair once.
struct PpmiMatrix {
  uint32_t slice_index = 0;
  uint32_t dimension = 0;
  std::map<uint64_t, double> cells;  // key as in PairCounts

  double get(uint32_t i, uint32_t j) const {
    auto it = cells.find(PairCounts::key(i, j));
    return it == cells.end() ? 0.0 : it->second;
  }
};

/// value(i,j) = max(log((W_ij/N) / ((W_i/N)(W_j/N))), 0) with N the slice
/// token count, evaluated only where W_ij > 0; non-positive logs are
/// dropped.  `dimension` defaults to the highest event index seen.
inline PpmiMatrix build_ppmi(const PairCounts& counts, uint32_t dimension = 0) {
  PpmiMatrix ppmi;
  ppmi.slice_index = counts.slice_index();
  ppmi.dimension = dimension;
  const double total = static_cast<double>(counts.token_count());
  for (const auto& [k, c] : counts.cells()) {
    auto [i, j] = PairCounts::unkey(k);
    const double wi = static_cast<double>(counts.marginal(i));
    const double wj = static_cast<double>(counts.marginal(j));
    if (wi == 0.0 || wj == 0.0)
      throw std::logic_error("pair count with zero marginal: impossible state");
    if (dimension == 0) ppmi.dimension = std::max(ppmi.dimension, j + 1);
    const double v = std::log(static_cast<double>(c) * total / (wi * wj));
    if (v > 0.0) ppmi.cells.emplace(k, v);
  }
  return ppmi;
}

/// Per-slice window counts then PPMI, with dimension pinned to |E|.
inline std::vector<PpmiMatrix> build_ppmi_series(const EventCorpus& corpus,
                                                 uint32_t half_window) {
  std::vector<PpmiMatrix> out;
  out.reserve(corpus.slice_count());
  for (const auto& slice : corpus.slices)
    out.push_back(build_ppmi(count_pairs(slice, half_window), corpus.vocabulary.size()));
  return out;
}

/// Debug dump: one `i j value` line per stored cell, ascending (i, j).
/// %.17g round-trips doubles exactly.
inline void dump_ppmi(const PpmiMatrix& ppmi, std::ostream& out) {
  char buf[64];
  for (const auto& [k, v] : ppmi.cells) {
    auto [i, j] = PairCounts::unkey(k);
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << i << " " << j << " " << buf << "\n";
  }
}

}  // namespace evembed
