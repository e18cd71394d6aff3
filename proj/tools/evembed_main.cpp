// Command-line front end: synth -> ingest -> embed -> analyze.
// Exit codes: 0 ok, 1 usage, 2 bad data, 3 internal.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "evembed/analytics.hpp"
#include "evembed/common.hpp"
#include "evembed/cooccur.hpp"
#include "evembed/corpus.hpp"
#include "evembed/solver.hpp"
#include "evembed/synth.hpp"

namespace {

using evembed::DataError;
using ordered_json = nlohmann::ordered_json;

/// Flag values that parse but violate a documented domain (odd --window,
/// zero --epochs, ...).  Reported like CLI11 parse failures, exit code 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

void write_manifest(const std::string& out_path, const ordered_json& manifest) {
  auto f = open_out(out_path + ".manifest.json");
  f << manifest.dump(2) << "\n";
  if (!f) throw DataError("write failure on manifest for: " + out_path);
}

uint32_t env_threads() {
  const char* v = std::getenv("EVEMBED_THREADS");
  if (!v) return 1;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (!end || *end != '\0' || n < 1) return 1;
  return static_cast<uint32_t>(n);
}

uint32_t resolve_event(const evembed::EventVocabulary& vocab, const std::string& id) {
  if (auto idx = vocab.find(id)) return *idx;
  std::string msg = "unknown event id '" + id + "'";
  auto near = vocab.nearest(id, 3);
  if (!near.empty()) {
    msg += "; closest:";
    for (const auto& n : near) msg += " " + n;
  }
  throw DataError(msg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- ingest ------------------------------------------------------------------

struct IngestArgs {
  std::string log_path;
  std::string out_path;
  std::string vocab_out;
  int64_t period = 0;
  int64_t origin = 0;
};

int run_ingest(const IngestArgs& a) {
  if (a.period <= 0) throw UsageError("--period must be positive");
  std::ifstream in(a.log_path, std::ios::binary);
  if (!in) throw DataError("cannot open event log: " + a.log_path);

  evembed::ParseStats stats;
  auto records = evembed::parse_event_log(in, stats);
  auto corpus = evembed::build_corpus(records, a.period, a.origin, stats);
  evembed::save_corpus_file(corpus, a.out_path);
  if (!a.vocab_out.empty()) {
    auto vf = open_out(a.vocab_out);
    evembed::save_vocabulary(corpus.vocabulary, vf);
  }

  ordered_json manifest;
  manifest["tool"] = evembed::kToolVersion;
  manifest["command"] = "ingest";
  manifest["inputs"] = {{"log", a.log_path}};
  manifest["params"] = {{"period", a.period}, {"origin", a.origin}};
  manifest["outputs"] = {a.out_path};
  write_manifest(a.out_path, manifest);

  std::cout << "ingested events=" << corpus.vocabulary.size()
            << " slices=" << corpus.slice_count() << " tokens=" << corpus.total_tokens()
            << " skipped_malformed=" << stats.skipped_malformed
            << " rejected_before_origin=" << stats.rejected_before_origin << "\n";
  return evembed::kExitOk;
}

// --- embed -------------------------------------------------------------------

struct EmbedArgs {
  std::string corpus_path;
  std::string out_path;
  std::string trace_path;
  uint32_t dim = 50;
  double alpha = 10.0;
  double beta = 40.0;
  uint32_t window = 8;
  uint32_t epochs = 5;
  uint64_t seed = 1;
  uint32_t threads = 0;  // 0: take EVEMBED_THREADS (default 1)
};

int run_embed(const EmbedArgs& a) {
  if (a.window < 2 || a.window % 2 != 0) throw UsageError("--window must be even and >= 2");
  if (a.dim < 1) throw UsageError("--dim must be at least 1");
  if (a.epochs < 1) throw UsageError("--epochs must be at least 1");
  if (a.alpha < 0.0) throw UsageError("--alpha must be non-negative");
  if (a.beta < 0.0) throw UsageError("--beta must be non-negative");

  auto corpus = evembed::load_corpus_file(a.corpus_path);

  const auto t0 = std::chrono::steady_clock::now();
  auto ppmi = evembed::build_ppmi_series(corpus, a.window / 2);
  const double ppmi_seconds = seconds_since(t0);

  evembed::SolverConfig config;
  config.dim = a.dim;
  config.alpha = a.alpha;
  config.beta = a.beta;
  config.epochs = a.epochs;
  config.seed = a.seed;
  config.threads = a.threads == 0 ? env_threads() : a.threads;

  const auto t1 = std::chrono::steady_clock::now();
  auto series = evembed::train(ppmi, config);
  const double train_seconds = seconds_since(t1);

  evembed::save_embeddings_file(series, a.out_path);
  const std::string trace_path =
      a.trace_path.empty() ? a.out_path + ".trace.csv" : a.trace_path;
  {
    auto tf = open_out(trace_path);
    evembed::save_trace(series, tf);
  }

  ordered_json manifest;
  manifest["tool"] = evembed::kToolVersion;
  manifest["command"] = "embed";
  manifest["inputs"] = {{"corpus", a.corpus_path}};
  manifest["params"] = {{"dim", a.dim},     {"alpha", a.alpha},   {"beta", a.beta},
                        {"window", a.window}, {"epochs", a.epochs}, {"seed", a.seed},
                        {"threads", config.threads}};
  manifest["outputs"] = {a.out_path, trace_path};
  write_manifest(a.out_path, manifest);

  char line[256];
  std::snprintf(line, sizeof(line),
                "embedded events=%u slices=%u dim=%u ppmi_seconds=%.2f train_seconds=%.2f "
                "final_objective=%.6g jitter_retries=%llu",
                series.vocab_size(), series.slice_count(), series.dim(), ppmi_seconds,
                train_seconds,
                series.objective_trace.empty() ? 0.0 : series.objective_trace.back(),
                static_cast<unsigned long long>(series.jitter_retries));
  std::cout << line << "\n";
  return evembed::kExitOk;
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string store_path;
  std::string corpus_path;
  std::string out_path;
  // similar
  std::string event_id;
  uint32_t k = 3;
  std::string slice_spec = "first,last";
  // drift / changes
  uint32_t slice = 1;
  uint32_t top_m = 5;
  uint64_t min_count = 100;
  double quantile = 0.9;
  // fidelity
  std::string mode = "baseline";
  double drop_threshold = 0.2;
  uint32_t cp_window = 3;
};

struct AnalyzeContext {
  evembed::EventCorpus corpus;
  evembed::EmbeddingSeries series;
};

AnalyzeContext load_analyze_inputs(const AnalyzeArgs& a) {
  AnalyzeContext ctx;
  ctx.corpus = evembed::load_corpus_file(a.corpus_path);
  ctx.series = evembed::load_embeddings_file(a.store_path);
  if (ctx.series.vocab_size() != ctx.corpus.vocabulary.size())
    throw DataError("store/corpus vocabulary size mismatch: " +
                    std::to_string(ctx.series.vocab_size()) + " vs " +
                    std::to_string(ctx.corpus.vocabulary.size()));
  if (ctx.series.slice_count() != ctx.corpus.slice_count())
    throw DataError("store/corpus slice count mismatch: " +
                    std::to_string(ctx.series.slice_count()) + " vs " +
                    std::to_string(ctx.corpus.slice_count()));
  return ctx;
}

std::vector<uint32_t> parse_slice_spec(const std::string& spec, uint32_t T) {
  std::vector<uint32_t> out;
  for (auto tok : evembed::detail::split(spec, ',')) {
    tok = evembed::detail::trim(tok);
    if (tok == "first") {
      out.push_back(0);
    } else if (tok == "last") {
      out.push_back(T - 1);
    } else {
      int64_t v = 0;
      if (!evembed::detail::parse_int64(tok, v) || v < 0)
        throw UsageError("bad --slice entry '" + std::string(tok) + "'");
      if (v >= static_cast<int64_t>(T))
        throw DataError("slice " + std::to_string(v) + " out of range (T=" +
                        std::to_string(T) + ")");
      out.push_back(static_cast<uint32_t>(v));
    }
  }
  if (out.empty()) throw UsageError("--slice selects no slices");
  return out;
}

ordered_json analyze_manifest(const AnalyzeArgs& a, const std::string& subcommand,
                              ordered_json params) {
  ordered_json manifest;
  manifest["tool"] = evembed::kToolVersion;
  manifest["command"] = "analyze " + subcommand;
  manifest["inputs"] = {{"store", a.store_path}, {"corpus", a.corpus_path}};
  manifest["params"] = std::move(params);
  manifest["outputs"] = {a.out_path};
  return manifest;
}

int run_analyze_similar(const AnalyzeArgs& a) {
  if (a.k < 1) throw UsageError("--k must be at least 1");
  auto ctx = load_analyze_inputs(a);
  const uint32_t event = resolve_event(ctx.corpus.vocabulary, a.event_id);
  const auto slices = parse_slice_spec(a.slice_spec, ctx.series.slice_count());

  auto out = open_out(a.out_path);
  out << "slice,rank,event_id,similarity\n";
  for (uint32_t t : slices) {
    auto neighbors = evembed::neighborhood(ctx.series, event, t, a.k);
    for (size_t r = 0; r < neighbors.size(); ++r)
      out << t << "," << (r + 1) << "," << ctx.corpus.vocabulary.event_id(neighbors[r].event_index)
          << "," << fmt(neighbors[r].similarity) << "\n";
    std::cout << "slice " << t << " nearest to " << a.event_id << ":";
    for (const auto& n : neighbors)
      std::cout << " " << ctx.corpus.vocabulary.event_id(n.event_index);
    std::cout << "\n";
  }
  write_manifest(a.out_path, analyze_manifest(a, "similar",
                                              {{"event", a.event_id},
                                               {"k", a.k},
                                               {"slice", a.slice_spec}}));
  return evembed::kExitOk;
}

int run_analyze_drift(const AnalyzeArgs& a) {
  auto ctx = load_analyze_inputs(a);
  if (a.slice < 1 || a.slice >= ctx.series.slice_count())
    throw DataError("drift slice must be in [1, T)");
  const auto totals = evembed::total_event_counts(ctx.corpus);
  auto report = evembed::weighted_drift(ctx.series, a.slice, totals, a.min_count);

  auto out = open_out(a.out_path);
  evembed::write_drift_csv(report, ctx.corpus.vocabulary, out);
  write_manifest(a.out_path, analyze_manifest(a, "drift",
                                              {{"slice", a.slice},
                                               {"min_count", a.min_count}}));
  std::cout << "drift slice=" << a.slice << " ranked=" << report.ranking.size()
            << (report.zero_drift ? " zero_drift=1" : "") << "\n";
  return evembed::kExitOk;
}

int run_analyze_trend(const AnalyzeArgs& a) {
  auto ctx = load_analyze_inputs(a);
  const uint32_t event = resolve_event(ctx.corpus.vocabulary, a.event_id);
  const auto norms = evembed::norm_series(ctx.series, event);

  auto out = open_out(a.out_path);
  evembed::write_series_csv(norms, 0, out, "norm");
  write_manifest(a.out_path, analyze_manifest(a, "trend", {{"event", a.event_id}}));
  std::cout << "trend " << a.event_id << " slices=" << norms.size() << "\n";
  return evembed::kExitOk;
}

int run_analyze_changes(const AnalyzeArgs& a) {
  if (a.top_m < 1) throw UsageError("--top must be at least 1");
  if (a.quantile < 0.0 || a.quantile > 1.0) throw UsageError("--quantile must be in [0,1]");
  auto ctx = load_analyze_inputs(a);
  const auto totals = evembed::total_event_counts(ctx.corpus);
  auto report =
      evembed::global_change_report(ctx.series, totals, a.top_m, a.min_count, a.quantile);

  ordered_json j;
  j["top_m"] = report.top_m;
  j["min_count"] = report.min_count;
  j["quantile"] = report.quantile;
  j["cutoff"] = report.cutoff;
  j["slices"] = ordered_json::array();
  for (size_t i = 0; i < report.drifts.size(); ++i) {
    ordered_json entry;
    entry["slice"] = report.drifts[i].slice_index;
    entry["above_cutoff"] = report.histogram[i];
    entry["top"] = ordered_json::array();
    for (const auto& n : report.top[i])
      entry["top"].push_back({{"event_id", ctx.corpus.vocabulary.event_id(n.event_index)},
                              {"score", n.similarity}});
    j["slices"].push_back(std::move(entry));
  }
  auto out = open_out(a.out_path);
  out << j.dump(2) << "\n";
  write_manifest(a.out_path, analyze_manifest(a, "changes",
                                              {{"top", a.top_m},
                                               {"min_count", a.min_count},
                                               {"quantile", a.quantile}}));

  uint32_t peak = 0;
  for (size_t i = 1; i < report.histogram.size(); ++i)
    if (report.histogram[i] > report.histogram[peak]) peak = static_cast<uint32_t>(i);
  std::cout << "changes slices=" << report.histogram.size() << " cutoff=" << fmt(report.cutoff)
            << (report.histogram.empty()
                    ? ""
                    : " peak_slice=" + std::to_string(report.drifts[peak].slice_index))
            << "\n";
  return evembed::kExitOk;
}

int run_analyze_fidelity(const AnalyzeArgs& a) {
  if (a.mode != "baseline" && a.mode != "consecutive")
    throw UsageError("--mode must be baseline or consecutive");
  if (a.drop_threshold <= 0.0 || a.drop_threshold >= 1.0)
    throw UsageError("--drop-threshold must be in (0,1)");
  if (a.cp_window < 1) throw UsageError("--cp-window must be at least 1");
  auto ctx = load_analyze_inputs(a);
  const uint32_t event = resolve_event(ctx.corpus.vocabulary, a.event_id);

  const bool baseline = a.mode == "baseline";
  auto series = baseline ? evembed::baseline_similarity_series(ctx.series, event)
                         : evembed::consecutive_similarity_series(ctx.series, event);
  auto flags = evembed::detect_change_points(series, a.drop_threshold, a.cp_window);

  auto out = open_out(a.out_path);
  evembed::write_series_csv(series.values, baseline ? 0 : 1, out, "similarity");
  write_manifest(a.out_path, analyze_manifest(a, "fidelity",
                                              {{"event", a.event_id},
                                               {"mode", a.mode},
                                               {"drop_threshold", a.drop_threshold},
                                               {"cp_window", a.cp_window}}));

  std::cout << "fidelity " << a.event_id << " mode=" << a.mode << " change_points=";
  for (size_t i = 0; i < flags.size(); ++i)
    std::cout << (i ? "," : "") << (flags[i] + (baseline ? 0 : 1));
  std::cout << "\n";
  return evembed::kExitOk;
}

int run_analyze_trajectory(const AnalyzeArgs& a) {
  if (a.k < 1) throw UsageError("--k must be at least 1");
  auto ctx = load_analyze_inputs(a);
  const uint32_t event = resolve_event(ctx.corpus.vocabulary, a.event_id);
  auto data = evembed::export_trajectory(ctx.series, event, a.k);

  ordered_json j;
  j["event_id"] = a.event_id;
  j["k"] = a.k;
  j["slices"] = ordered_json::array();
  for (size_t t = 0; t < data.neighbors_per_slice.size(); ++t) {
    ordered_json entry;
    entry["slice"] = t;
    entry["neighbors"] = ordered_json::array();
    for (const auto& n : data.neighbors_per_slice[t])
      entry["neighbors"].push_back(
          {{"event_id", ctx.corpus.vocabulary.event_id(n.event_index)},
           {"similarity", n.similarity}});
    entry["embedding"] = ordered_json::array();
    for (Eigen::Index i = 0; i < data.rows[t].size(); ++i)
      entry["embedding"].push_back(data.rows[t](i));
    j["slices"].push_back(std::move(entry));
  }
  auto out = open_out(a.out_path);
  out << j.dump(2) << "\n";
  write_manifest(a.out_path, analyze_manifest(a, "trajectory",
                                              {{"event", a.event_id}, {"k", a.k}}));
  std::cout << "trajectory " << a.event_id << " slices=" << data.neighbors_per_slice.size()
            << " k=" << a.k << "\n";
  return evembed::kExitOk;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string scenario_path;
  std::string out_path;
  std::string truth_path;
};

int run_synth(const SynthArgs& a) {
  std::ifstream in(a.scenario_path, std::ios::binary);
  if (!in) throw DataError("cannot open scenario: " + a.scenario_path);
  auto scenario = evembed::parse_scenario(in);
  auto records = evembed::generate_records(scenario);
  {
    auto out = open_out(a.out_path);
    evembed::write_event_log(records, out);
  }

  auto truth = evembed::describe_ground_truth(scenario);
  ordered_json tj;
  tj["vocab"] = scenario.vocab_size;
  tj["slices"] = scenario.slice_count;
  tj["seed"] = scenario.seed;
  tj["events"] = ordered_json::object();
  for (const auto& [id, memberships] : truth.events) {
    ordered_json e;
    e["activation_slice"] = truth.activation.at(id);
    e["memberships"] = ordered_json::array();
    for (const auto& m : memberships)
      e["memberships"].push_back(
          {{"campaign", m.campaign}, {"from", m.from}, {"to", m.to}});
    tj["events"][id] = std::move(e);
  }
  tj["switches"] = ordered_json::array();
  for (const auto& s : truth.switches)
    tj["switches"].push_back({{"from_campaign", s.from_campaign},
                              {"to_campaign", s.to_campaign},
                              {"slice", s.slice}});
  const std::string truth_path =
      a.truth_path.empty() ? a.out_path + ".truth.json" : a.truth_path;
  {
    auto out = open_out(truth_path);
    out << tj.dump(2) << "\n";
  }

  ordered_json manifest;
  manifest["tool"] = evembed::kToolVersion;
  manifest["command"] = "synth";
  manifest["inputs"] = {{"scenario", a.scenario_path}};
  manifest["params"] = {{"seed", scenario.seed}};
  manifest["outputs"] = {a.out_path, truth_path};
  write_manifest(a.out_path, manifest);

  std::cout << "synthesized records=" << records.size() << " vocab=" << scenario.vocab_size
            << " slices=" << scenario.slice_count << " campaigns=" << scenario.campaigns.size()
            << "\n";
  return evembed::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal embeddings for machine security-event streams"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "bucket an event log into a slice corpus");
  cmd_ingest->add_option("--log", ingest.log_path, "event log (machine_id,timestamp,event_id)")
      ->required();
  cmd_ingest->add_option("--period", ingest.period, "slice length in seconds")->required();
  cmd_ingest->add_option("--origin", ingest.origin, "timeline origin (epoch seconds)");
  cmd_ingest->add_option("--out", ingest.out_path, "corpus output path")->required();
  cmd_ingest->add_option("--vocab-out", ingest.vocab_out, "vocabulary sidecar path");

  EmbedArgs embed;
  auto* cmd_embed = app.add_subcommand("embed", "train aligned per-slice embeddings");
  cmd_embed->add_option("--corpus", embed.corpus_path, "corpus file from ingest")->required();
  cmd_embed->add_option("--out", embed.out_path, "embedding store output path")->required();
  cmd_embed->add_option("--dim", embed.dim, "embedding dimension");
  cmd_embed->add_option("--alpha", embed.alpha, "ridge weight");
  cmd_embed->add_option("--beta", embed.beta, "temporal alignment weight");
  cmd_embed->add_option("--window", embed.window, "context window size (total neighbors, even)");
  cmd_embed->add_option("--epochs", embed.epochs, "full sweeps over all slices");
  cmd_embed->add_option("--seed", embed.seed, "initialization seed");
  cmd_embed->add_option("--threads", embed.threads, "worker threads (default $EVEMBED_THREADS)");
  cmd_embed->add_option("--trace", embed.trace_path, "objective trace CSV path");

  AnalyzeArgs an;
  auto* cmd_analyze = app.add_subcommand("analyze", "measurements over a trained store");
  cmd_analyze->require_subcommand(1);
  cmd_analyze->add_option("--store", an.store_path, "embedding store")->required();
  cmd_analyze->add_option("--corpus", an.corpus_path, "matching corpus file")->required();

  auto* an_similar = cmd_analyze->add_subcommand("similar", "nearest events at chosen slices");
  an_similar->add_option("--event", an.event_id, "event id")->required();
  an_similar->add_option("--k", an.k, "neighbors per slice");
  an_similar->add_option("--slice", an.slice_spec, "comma list of indices, first, last");
  an_similar->add_option("--out", an.out_path, "CSV output path")->required();

  auto* an_drift = cmd_analyze->add_subcommand("drift", "per-event share of embedding movement");
  an_drift->add_option("--slice", an.slice, "target slice t (compares t-1 to t)")->required();
  an_drift->add_option("--min-count", an.min_count, "drop events seen fewer times");
  an_drift->add_option("--out", an.out_path, "CSV output path")->required();

  auto* an_trend = cmd_analyze->add_subcommand("trend", "embedding norm per slice");
  an_trend->add_option("--event", an.event_id, "event id")->required();
  an_trend->add_option("--out", an.out_path, "CSV output path")->required();

  auto* an_changes = cmd_analyze->add_subcommand("changes", "corpus-wide usage-change report");
  an_changes->add_option("--top", an.top_m, "entries per slice");
  an_changes->add_option("--min-count", an.min_count, "drop events seen fewer times");
  an_changes->add_option("--quantile", an.quantile, "pooled drift cutoff quantile");
  an_changes->add_option("--out", an.out_path, "JSON output path")->required();

  auto* an_fidelity = cmd_analyze->add_subcommand("fidelity", "similarity-over-time series");
  an_fidelity->add_option("--event", an.event_id, "event id")->required();
  an_fidelity->add_option("--mode", an.mode, "baseline or consecutive");
  an_fidelity->add_option("--drop-threshold", an.drop_threshold, "change-point drop size");
  an_fidelity->add_option("--cp-window", an.cp_window, "change-point rolling window");
  an_fidelity->add_option("--out", an.out_path, "CSV output path")->required();

  auto* an_trajectory = cmd_analyze->add_subcommand("trajectory", "neighborhoods + vectors dump");
  an_trajectory->add_option("--event", an.event_id, "event id")->required();
  an_trajectory->add_option("--k", an.k, "neighbors per slice");
  an_trajectory->add_option("--out", an.out_path, "JSON output path")->required();

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic event log");
  cmd_synth->add_option("--scenario", synth.scenario_path, "scenario description file")
      ->required();
  cmd_synth->add_option("--out", synth.out_path, "event log output path")->required();
  cmd_synth->add_option("--truth", synth.truth_path, "ground truth JSON path");

  try {
    app.parse(argc, argv);
    if (cmd_ingest->parsed()) return run_ingest(ingest);
    if (cmd_embed->parsed()) return run_embed(embed);
    if (cmd_analyze->parsed()) {
      if (an_similar->parsed()) return run_analyze_similar(an);
      if (an_drift->parsed()) return run_analyze_drift(an);
      if (an_trend->parsed()) return run_analyze_trend(an);
      if (an_changes->parsed()) return run_analyze_changes(an);
      if (an_fidelity->parsed()) return run_analyze_fidelity(an);
      if (an_trajectory->parsed()) return run_analyze_trajectory(an);
    }
    if (cmd_synth->parsed()) return run_synth(synth);
    throw UsageError("no subcommand selected");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "evembed: error: usage: " << e.what() << "\n";
    return evembed::kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "evembed: error: usage: " << e.what() << "\n";
    return evembed::kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "evembed: error: data: " << e.what() << "\n";
    return evembed::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "evembed: error: internal: " << e.what() << "\n";
    return evembed::kExitInternal;
  }
}
