#include <cmath>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "evembed/analytics.hpp"
#include "evembed/solver.hpp"
#include "evembed/synth.hpp"

using namespace evembed;

namespace {

PpmiMatrix dense_from(const Eigen::MatrixXd& Y, uint32_t dimension) {
  PpmiMatrix ppmi;
  ppmi.dimension = dimension;
  for (uint32_t i = 0; i < dimension; ++i)
    for (uint32_t j = i; j < dimension; ++j)
      if (Y(i, j) > 0.0) ppmi.cells[PairCounts::key(i, j)] = Y(i, j);
  return ppmi;
}

std::vector<PpmiMatrix> small_fixture(uint32_t vocab, uint32_t T, uint64_t seed) {
  Scenario sc;
  sc.vocab_size = vocab;
  sc.slice_count = T;
  sc.machines = 20;
  sc.len_mean = 30;
  sc.len_spread = 7;
  sc.seed = seed;
  sc.campaigns.push_back({"c", {vocab - 3, vocab - 2, vocab - 1}, 0, T, 2.0, {}, {}, {}});
  return build_ppmi_series(generate_corpus(sc), 4);
}

}  // namespace

TEST_CASE("init is seeded, shaped, and ranged") {
  SolverConfig config;
  config.dim = 50;
  config.seed = 7;
  auto a = init_embeddings(100, 4, config);
  auto b = init_embeddings(100, 4, config);
  REQUIRE(a.slice_count() == 4);
  REQUIRE(a.vocab_size() == 100);
  REQUIRE(a.dim() == 50);
  const double hi = 1.0 / std::sqrt(50.0);
  for (uint32_t t = 0; t < 4; ++t) {
    REQUIRE((a.slices[t].array() == b.slices[t].array()).all());
    REQUIRE(a.slices[t].minCoeff() >= 0.0);
    REQUIRE(a.slices[t].maxCoeff() <= hi);
  }
  // distinct slices draw from one continuing stream
  REQUIRE((a.slices[0].array() != a.slices[1].array()).any());
}

TEST_CASE("config bounds are enforced") {
  SolverConfig config;
  config.epochs = 0;
  REQUIRE_THROWS_AS(config.validate(), DataError);
  config = {};
  config.dim = 0;
  REQUIRE_THROWS_AS(config.validate(), DataError);
  config = {};
  config.alpha = -1.0;
  REQUIRE_THROWS_AS(config.validate(), DataError);
  config = {};
  config.beta = -0.5;
  REQUIRE_THROWS_AS(config.validate(), DataError);
  REQUIRE_THROWS_AS(train({}, SolverConfig{}), DataError);
}

TEST_CASE("objective of the empty problem is zero") {
  SolverConfig config;
  config.dim = 3;
  config.alpha = 10.0;
  config.beta = 40.0;
  auto series = init_embeddings(5, 2, config);
  for (auto& H : series.slices) H.setZero();
  std::vector<PpmiMatrix> ppmi(2);
  for (auto& m : ppmi) m.dimension = 5;
  REQUIRE(objective(series, ppmi) == 0.0);
}

TEST_CASE("a single mirrored cell contributes v squared at zero embeddings") {
  SolverConfig config;
  config.dim = 3;
  config.alpha = 10.0;
  auto series = init_embeddings(4, 1, config);
  series.slices[0].setZero();
  std::vector<PpmiMatrix> ppmi(1);
  ppmi[0].dimension = 4;
  const double v = 1.3;
  ppmi[0].cells[PairCounts::key(1, 2)] = v;
  REQUIRE(objective(series, ppmi) == Catch::Approx(v * v).epsilon(1e-15));
  // diagonal cells are stored once and not mirrored
  ppmi[0].cells.clear();
  ppmi[0].cells[PairCounts::key(2, 2)] = v;
  REQUIRE(objective(series, ppmi) == Catch::Approx(0.5 * v * v).epsilon(1e-15));
}

TEST_CASE("zero alignment weight decouples slices") {
  auto ppmi = small_fixture(30, 3, 11);
  SolverConfig config;
  config.dim = 8;
  config.alpha = 5.0;
  config.beta = 0.0;
  config.seed = 3;
  auto series = init_embeddings(30, 3, config);

  double total = objective(series, ppmi);
  double parts = 0.0;
  for (uint32_t t = 0; t < 3; ++t) {
    EmbeddingSeries one;
    one.config = config;
    one.slices.push_back(series.slices[t]);
    parts += objective(one, {ppmi[t]});
  }
  REQUIRE(total == Catch::Approx(parts).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
  SolverConfig config;
  config.dim = 4;
  auto series = init_embeddings(6, 2, config);
  std::vector<PpmiMatrix> wrong_count(1);
  wrong_count[0].dimension = 6;
  REQUIRE_THROWS_AS(objective(series, wrong_count), DataError);
  std::vector<PpmiMatrix> wrong_dim(2);
  wrong_dim[0].dimension = 7;
  wrong_dim[1].dimension = 7;
  REQUIRE_THROWS_AS(objective(series, wrong_dim), DataError);
}

TEST_CASE("one sweep strictly decreases a random start") {
  auto ppmi = small_fixture(40, 4, 19);
  SolverConfig config;
  config.seed = 5;
  auto series = init_embeddings(40, 4, config);
  const double before = objective(series, ppmi);
  sweep(series, ppmi);
  const double after = objective(series, ppmi);
  REQUIRE(after < before);
}

TEST_CASE("objective trace never increases beyond tolerance") {
  auto ppmi = small_fixture(60, 6, 23);
  SolverConfig config;
  config.epochs = 8;
  config.seed = 2;
  auto series = train(ppmi, config);
  REQUIRE(series.objective_trace.size() == 8);
  for (size_t k = 1; k < series.objective_trace.size(); ++k)
    REQUIRE(series.objective_trace[k] <=
            series.objective_trace[k - 1] * (1.0 + 1e-6));
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto ppmi = small_fixture(30, 3, 29);
  SolverConfig config;
  config.epochs = 3;
  config.seed = 77;
  auto a = train(ppmi, config);
  auto b = train(ppmi, config);
  for (uint32_t t = 0; t < a.slice_count(); ++t)
    REQUIRE((a.slices[t].array() == b.slices[t].array()).all());
  REQUIRE(a.objective_trace == b.objective_trace);
}

TEST_CASE("thread count does not change the result") {
  auto ppmi = small_fixture(150, 3, 31);
  SolverConfig config;
  config.epochs = 3;
  config.seed = 13;
  config.threads = 1;
  auto a = train(ppmi, config);
  config.threads = 4;
  auto b = train(ppmi, config);
  for (uint32_t t = 0; t < a.slice_count(); ++t)
    REQUIRE((a.slices[t].array() == b.slices[t].array()).all());
}

TEST_CASE("planted low-rank matrix is recovered without regularization") {
  const uint32_t E = 20, d = 4;
  Rng rng(123);
  Eigen::MatrixXd Hstar(E, d);
  for (uint32_t r = 0; r < E; ++r)
    for (uint32_t k = 0; k < d; ++k) Hstar(r, k) = 0.2 + rng.uniform01();
  const Eigen::MatrixXd Y = Hstar * Hstar.transpose();
  std::vector<PpmiMatrix> ppmi = {dense_from(Y, E)};

  SolverConfig config;
  config.dim = d;
  config.alpha = 0.0;
  config.beta = 0.0;
  config.epochs = 50;
  config.seed = 9;
  auto series = train(ppmi, config);

  const Eigen::MatrixXd R = Y - series.slices[0] * series.slices[0].transpose();
  REQUIRE(R.norm() / Y.norm() < 1e-3);

  // the data-term residual also collapses relative to the random start
  auto init = init_embeddings(E, 1, config);
  const double f0 = objective(init, ppmi);
  REQUIRE(series.objective_trace.back() < 1e-6 * f0);
}

TEST_CASE("huge alignment weight forces slices together") {
  auto one = small_fixture(25, 1, 37);
  std::vector<PpmiMatrix> ppmi(4, one[0]);
  SolverConfig config;
  config.dim = 6;
  config.beta = 1e6;
  config.seed = 21;
  auto series = init_embeddings(25, 4, config);

  double prev = -1.0;
  for (int s = 0; s < 6; ++s) {
    sweep(series, ppmi);
    double gap = 0.0;
    for (uint32_t t = 0; t + 1 < 4; ++t)
      gap = std::max(gap, (series.slices[t] - series.slices[t + 1]).norm());
    if (prev >= 0.0) REQUIRE(gap <= prev * (1.0 + 1e-9));
    prev = gap;
  }
}

TEST_CASE("alignment raises consecutive similarity for every covered event") {
  auto one = small_fixture(30, 1, 41);
  std::vector<PpmiMatrix> ppmi(4, one[0]);
  for (auto& m : ppmi) m.slice_index = 0;

  SolverConfig config;
  config.dim = 10;
  config.epochs = 5;
  config.seed = 55;
  config.beta = 40.0;
  auto aligned = train(ppmi, config);
  config.beta = 0.0;
  auto loose = train(ppmi, config);

  std::vector<bool> covered(30, false);
  for (const auto& [k, v] : one[0].cells) {
    auto [i, j] = PairCounts::unkey(k);
    covered[i] = covered[j] = true;
  }
  size_t checked = 0;
  for (uint32_t e = 0; e < 30; ++e) {
    if (!covered[e]) continue;
    ++checked;
    auto mean_consec = [&](const EmbeddingSeries& s) {
      auto series = consecutive_similarity_series(s, e);
      double acc = 0.0;
      for (double v : series.values) acc += v;
      return acc / series.values.size();
    };
    REQUIRE(mean_consec(aligned) > mean_consec(loose));
  }
  REQUIRE(checked > 5);
}

TEST_CASE("rank-deficient zero start triggers the reported jitter retry") {
  auto ppmi = small_fixture(20, 2, 43);
  SolverConfig config;
  config.dim = 5;
  config.alpha = 0.0;
  config.beta = 0.0;
  auto series = init_embeddings(20, 2, config);
  for (auto& H : series.slices) H.setZero();
  sweep(series, ppmi);
  REQUIRE(series.jitter_retries >= 1);
  for (const auto& H : series.slices) REQUIRE(H.allFinite());
}

TEST_CASE("store round trip preserves float32-rounded values") {
  auto ppmi = small_fixture(15, 3, 47);
  SolverConfig config;
  config.dim = 7;
  config.epochs = 2;
  auto series = train(ppmi, config);

  std::ostringstream buf;
  save_embeddings(series, buf);
  std::istringstream in(buf.str());
  auto loaded = load_embeddings(in);
  REQUIRE(loaded.slice_count() == series.slice_count());
  REQUIRE(loaded.vocab_size() == series.vocab_size());
  REQUIRE(loaded.dim() == series.dim());
  for (uint32_t t = 0; t < series.slice_count(); ++t)
    for (uint32_t r = 0; r < series.vocab_size(); ++r)
      for (uint32_t k = 0; k < series.dim(); ++k)
        REQUIRE(loaded.slices[t](r, k) ==
                static_cast<double>(static_cast<float>(series.slices[t](r, k))));
}

TEST_CASE("store header is validated") {
  {
    std::istringstream in("XEMB");
    REQUIRE_THROWS_AS(load_embeddings(in), DataError);
  }
  {
    SolverConfig config;
    config.dim = 3;
    auto series = init_embeddings(4, 2, config);
    std::ostringstream buf;
    save_embeddings(series, buf);
    std::string bytes = buf.str();
    bytes.resize(bytes.size() - 7);  // truncate mid-payload
    std::istringstream in(bytes);
    REQUIRE_THROWS_AS(load_embeddings(in), DataError);
  }
}

TEST_CASE("trace export is one csv row per sweep") {
  auto ppmi = small_fixture(15, 2, 53);
  SolverConfig config;
  config.epochs = 3;
  auto series = train(ppmi, config);
  std::ostringstream out;
  save_trace(series, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "sweep,objective");
  size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    REQUIRE(std::stoul(line.substr(0, comma)) == rows);
    REQUIRE(std::stod(line.substr(comma + 1)) == series.objective_trace[rows - 1]);
  }
  REQUIRE(rows == 3);
}
