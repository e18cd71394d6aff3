#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "evembed/common.hpp"
#include "evembed/cooccur.hpp"
#include "evembed/rng.hpp"

namespace evembed {

struct SolverConfig {
  uint32_t dim = 50;
  double alpha = 10.0;
  double beta = 40.0;
  uint32_t epochs = 5;
  uint64_t seed = 1;
  uint32_t threads = 1;  // results are identical for any value

  void validate() const {
    if (dim < 1) throw DataError("dim must be at least 1");
    if (alpha < 0.0) throw DataError("alpha must be non-negative");
    if (beta < 0.0) throw DataError("beta must be non-negative");
    if (epochs < 1) throw DataError("epochs must be at least 1");
  }
};

/// T aligned embedding matrices, one |E| x d matrix per slice; row r of
/// slice t is event r's vector at time t.
struct EmbeddingSeries {
  std::vector<Eigen::MatrixXd> slices;
  SolverConfig config;
  std::vector<double> objective_trace;  // one value per completed sweep
  uint64_t jitter_retries = 0;
  uint64_t backtracks = 0;

  uint32_t slice_count() const { return static_cast<uint32_t>(slices.size()); }
  uint32_t vocab_size() const {
    return slices.empty() ? 0 : static_cast<uint32_t>(slices[0].rows());
  }
  uint32_t dim() const { return slices.empty() ? 0 : static_cast<uint32_t>(slices[0].cols()); }
};

/// Seeded uniform [0, 1/sqrt(d)] fill, one stream across all slices in
/// slice-major row-major order, so a fixed seed reproduces bit-identically.
inline EmbeddingSeries init_embeddings(uint32_t vocab_size, uint32_t slice_count,
                                       const SolverConfig& config) {
  config.validate();
  if (vocab_size < 1) throw DataError("vocab_size must be at least 1");
  if (slice_count < 1) throw DataError("slice_count must be at least 1");
  EmbeddingSeries series;
  series.config = config;
  Rng rng(config.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.dim));
  series.slices.reserve(slice_count);
  for (uint32_t t = 0; t < slice_count; ++t) {
    Eigen::MatrixXd H(vocab_size, config.dim);
    for (uint32_t r = 0; r < vocab_size; ++r)
      for (uint32_t k = 0; k < config.dim; ++k) H(r, k) = rng.uniform01() * scale;
    series.slices.push_back(std::move(H));
  }
  return series;
}

namespace detail {

/// Symmetric expansion of a sparse PPMI matrix: per-row neighbor lists with
/// ascending column index, plus the mirrored squared Frobenius norm.
struct SymmetricRows {
  std::vector<std::vector<std::pair<uint32_t, double>>> rows;
  double sq_norm = 0.0;
};

inline SymmetricRows expand_symmetric(const PpmiMatrix& ppmi, uint32_t n_rows) {
  SymmetricRows out;
  out.rows.resize(n_rows);
  for (const auto& [k, v] : ppmi.cells) {
    auto [i, j] = PairCounts::unkey(k);
    if (j >= n_rows) throw DataError("ppmi cell index exceeds embedding rows");
    out.rows[i].emplace_back(j, v);
    if (i != j) {
      out.rows[j].emplace_back(i, v);
      out.sq_norm += 2.0 * v * v;
    } else {
      out.sq_norm += v * v;
    }
  }
  return out;
}

/// <Y, A A^T> with Y the mirrored symmetric matrix behind stored cells.
inline double data_inner(const PpmiMatrix& ppmi, const Eigen::MatrixXd& A) {
  double acc = 0.0;
  for (const auto& [k, v] : ppmi.cells) {
    auto [i, j] = PairCounts::unkey(k);
    const double w = A.row(i).dot(A.row(j));
    acc += (i == j ? 1.0 : 2.0) * v * w;
  }
  return acc;
}

inline double mirrored_sq_norm(const PpmiMatrix& ppmi) {
  double acc = 0.0;
  for (const auto& [k, v] : ppmi.cells) {
    auto [i, j] = PairCounts::unkey(k);
    acc += (i == j ? 1.0 : 2.0) * v * v;
  }
  return acc;
}

/// Objective restricted to one slice: data term (with Y's squared norm
/// included), alpha ridge, and beta distance to each temporal neighbor.
inline double slice_objective(const Eigen::MatrixXd& A, const PpmiMatrix& ppmi, double y_sq,
                              double alpha, double beta,
                              const std::vector<const Eigen::MatrixXd*>& neighbors) {
  const Eigen::MatrixXd G = A.transpose() * A;
  double f = 0.5 * (y_sq - 2.0 * data_inner(ppmi, A) + G.squaredNorm());
  f += 0.5 * alpha * A.squaredNorm();
  for (const auto* Hn : neighbors) f += 0.5 * beta * (*Hn - A).squaredNorm();
  return f;
}

/// Runs fn(r) over [0, n) split into contiguous blocks, one per thread.
/// Every row's computation is independent, so the result does not depend on
/// the thread count.
template <typename Fn>
inline void parallel_rows(uint32_t n, uint32_t threads, Fn&& fn) {
  if (threads <= 1 || n < 128) {
    for (uint32_t r = 0; r < n; ++r) fn(r);
    return;
  }
  const uint32_t nt = std::min(threads, n);
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (uint32_t w = 0; w < nt; ++w) {
    const uint32_t lo = static_cast<uint32_t>(static_cast<uint64_t>(n) * w / nt);
    const uint32_t hi = static_cast<uint32_t>(static_cast<uint64_t>(n) * (w + 1) / nt);
    workers.emplace_back([lo, hi, &fn] {
      for (uint32_t r = lo; r < hi; ++r) fn(r);
    });
  }
  for (auto& th : workers) th.join();
}

}  // namespace detail

/// Full objective: 0.5 * sum_t ||Y_t - H_t H_t^T||_F^2
///               + 0.5 * alpha * sum_t ||H_t||_F^2
///               + 0.5 * beta * sum_{t>=1} ||H_{t-1} - H_t||_F^2
/// Unstored PPMI cells count as exact zeros; the reconstruction is never
/// materialized densely.
inline double objective(const EmbeddingSeries& series, const std::vector<PpmiMatrix>& ppmi) {
  const uint32_t T = series.slice_count();
  if (ppmi.size() != T) throw DataError("objective: slice count mismatch");
  double f = 0.0;
  for (uint32_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd& H = series.slices[t];
    if (ppmi[t].dimension != static_cast<uint32_t>(H.rows()))
      throw DataError("objective: embedding rows do not match ppmi dimension");
    const Eigen::MatrixXd G = H.transpose() * H;
    f += 0.5 * (detail::mirrored_sq_norm(ppmi[t]) - 2.0 * detail::data_inner(ppmi[t], H) +
                G.squaredNorm());
    f += 0.5 * series.config.alpha * H.squaredNorm();
    if (t > 0) f += 0.5 * series.config.beta * (series.slices[t - 1] - H).squaredNorm();
  }
  return f;
}

/// One Gauss-Seidel pass over t = 0..T-1.  Each slice solves the ridge
/// system A (H^T H + (alpha + beta*n_t) I) = Y H + beta*(H_prev + H_next)
/// with the right-hand factor frozen at the current H_t, then backtracks on
/// the restricted objective so a sweep never increases the total objective.
/// A non-positive-definite system gets one jittered retry, reported.
inline void sweep(EmbeddingSeries& series, const std::vector<PpmiMatrix>& ppmi) {
  const uint32_t T = series.slice_count();
  if (ppmi.size() != T) throw DataError("sweep: slice count mismatch");
  const uint32_t d = series.dim();
  const double alpha = series.config.alpha;
  const double beta = series.config.beta;

  for (uint32_t t = 0; t < T; ++t) {
    Eigen::MatrixXd& Hc = series.slices[t];
    const uint32_t E = static_cast<uint32_t>(Hc.rows());
    std::vector<const Eigen::MatrixXd*> neighbors;
    if (t > 0) neighbors.push_back(&series.slices[t - 1]);
    if (t + 1 < T) neighbors.push_back(&series.slices[t + 1]);
    const double ridge = alpha + beta * static_cast<double>(neighbors.size());

    const auto sym = detail::expand_symmetric(ppmi[t], E);

    Eigen::MatrixXd B = Hc.transpose() * Hc;
    B.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) {
      B.diagonal().array() += 1e-8;
      llt.compute(B);
      ++series.jitter_retries;
      if (llt.info() != Eigen::Success)
        throw std::logic_error("normal matrix not positive definite after jitter");
    }

    Eigen::MatrixXd M(E, d);
    detail::parallel_rows(E, series.config.threads, [&](uint32_t r) {
      Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(d);
      for (const auto& [j, v] : sym.rows[r]) m.noalias() += v * Hc.row(j);
      for (const auto* Hn : neighbors) m.noalias() += beta * Hn->row(r);
      M.row(r) = m;
    });

    Eigen::MatrixXd A(E, d);
    detail::parallel_rows(E, series.config.threads, [&](uint32_t r) {
      A.row(r) = llt.solve(M.row(r).transpose()).transpose();
    });

    const double f0 = detail::slice_objective(Hc, ppmi[t], sym.sq_norm, alpha, beta, neighbors);
    double f1 = detail::slice_objective(A, ppmi[t], sym.sq_norm, alpha, beta, neighbors);
    double s = 1.0;
    while (f1 > f0 && s > 1.0 / 64) {
      s *= 0.5;
      ++series.backtracks;
      Eigen::MatrixXd A2 = Hc + s * (A - Hc);
      f1 = detail::slice_objective(A2, ppmi[t], sym.sq_norm, alpha, beta, neighbors);
      if (f1 <= f0) A = std::move(A2);
    }
    if (f1 > f0) continue;  // keep the current iterate
    Hc = std::move(A);
  }
}

/// Seeded init plus config.epochs sweeps; objective recorded after each.
inline EmbeddingSeries train(const std::vector<PpmiMatrix>& ppmi, const SolverConfig& config) {
  config.validate();
  if (ppmi.empty()) throw DataError("train: no slices");
  const uint32_t E = ppmi[0].dimension;
  for (const auto& m : ppmi)
    if (m.dimension != E) throw DataError("train: inconsistent ppmi dimensions");
  if (E < 1) throw DataError("train: empty vocabulary");

  EmbeddingSeries series =
      init_embeddings(E, static_cast<uint32_t>(ppmi.size()), config);
  series.objective_trace.reserve(config.epochs);
  for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    sweep(series, ppmi);
    series.objective_trace.push_back(objective(series, ppmi));
  }
  return series;
}

// --- Embedding store ---------------------------------------------------------
//
// Binary layout: magic "TEMB", u16 version (=1), u32 T, u32 |E|, u32 d, then
// T*|E|*d float32 values in slice-major, row-major order.  All integers and
// floats little-endian.

namespace detail {

inline void put_u16(std::ostream& out, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

inline void put_u32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline void put_f32(std::ostream& out, float v) {
  uint32_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

inline uint16_t get_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

inline uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline float get_f32(std::istream& in) {
  uint32_t bits = get_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace detail

inline void save_embeddings(const EmbeddingSeries& series, std::ostream& out) {
  out.write("TEMB", 4);
  detail::put_u16(out, 1);
  detail::put_u32(out, series.slice_count());
  detail::put_u32(out, series.vocab_size());
  detail::put_u32(out, series.dim());
  for (const auto& H : series.slices)
    for (Eigen::Index r = 0; r < H.rows(); ++r)
      for (Eigen::Index k = 0; k < H.cols(); ++k)
        detail::put_f32(out, static_cast<float>(H(r, k)));
}

inline void save_embeddings_file(const EmbeddingSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open embedding store for writing: " + path);
  save_embeddings(series, out);
  if (!out) throw DataError("write failure on embedding store: " + path);
}

inline EmbeddingSeries load_embeddings(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "TEMB")
    throw DataError("not an embedding store (bad magic)");
  const uint16_t version = detail::get_u16(in);
  if (version != 1)
    throw DataError("unsupported embedding store version " + std::to_string(version));
  const uint32_t T = detail::get_u32(in);
  const uint32_t E = detail::get_u32(in);
  const uint32_t d = detail::get_u32(in);
  if (!in || T == 0 || E == 0 || d == 0)
    throw DataError("embedding store header invalid");
  EmbeddingSeries series;
  series.config.dim = d;
  series.slices.reserve(T);
  for (uint32_t t = 0; t < T; ++t) {
    Eigen::MatrixXd H(E, d);
    for (uint32_t r = 0; r < E; ++r)
      for (uint32_t k = 0; k < d; ++k) H(r, k) = static_cast<double>(detail::get_f32(in));
    if (!in) throw DataError("embedding store truncated");
    series.slices.push_back(std::move(H));
  }
  return series;
}

inline EmbeddingSeries load_embeddings_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding store: " + path);
  return load_embeddings(in);
}

/// Objective trace CSV: header then one `sweep,objective` row per sweep.
inline void save_trace(const EmbeddingSeries& series, std::ostream& out) {
  char buf[64];
  out << "sweep,objective\n";
  for (size_t k = 0; k < series.objective_trace.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", series.objective_trace[k]);
    out << (k + 1) << "," << buf << "\n";
  }
}

}  // namespace evembed
