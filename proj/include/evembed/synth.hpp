#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evembed/common.hpp"
#include "evembed/corpus.hpp"
#include "evembed/rng.hpp"

namespace evembed {

/// A planted coordinated-activity group.  Members are inserted together as
/// contiguous bursts into machine sequences while the campaign is active.
/// Intensity is the expected number of bursts per machine sequence; it can
/// ramp linearly across the active range or spike over a sub-range.
struct Campaign {
  std::string name;
  std::vector<uint32_t> members;
  uint32_t t_start = 0;
  uint32_t t_end = 0;  // exclusive
  double intensity = 1.0;
  std::optional<double> ramp_to;  // linear intensity..ramp_to over active range
  struct Spike {
    uint32_t from = 0, to = 0;  // [from, to)
    double high = 0.0, low = 0.0;
  };
  std::optional<Spike> spike;
  std::optional<std::string> switch_to;  // successor campaign name

  bool active(uint32_t t) const { return t_start <= t && t < t_end; }

  double intensity_at(uint32_t t) const {
    if (spike) return (spike->from <= t && t < spike->to) ? spike->high : spike->low;
    if (ramp_to && t_end > t_start + 1) {
      const double frac =
          static_cast<double>(t - t_start) / static_cast<double>(t_end - 1 - t_start);
      return intensity + (*ramp_to - intensity) * frac;
    }
    return intensity;
  }
};

/// Complete recipe for one synthetic corpus.  Background events follow a
/// power-law over the events not claimed by any campaign.
struct Scenario {
  uint32_t vocab_size = 100;
  uint32_t slice_count = 12;
  uint32_t machines = 50;
  double len_mean = 40.0;
  double len_spread = 10.0;
  double background_exponent = 1.1;
  double dropout = 0.2;     // per member per burst
  double noise_rate = 0.15; // background interleave inside bursts
  uint64_t seed = 1;
  std::vector<Campaign> campaigns;

  void validate() const {
    if (vocab_size < 1 || vocab_size > 9999)
      throw DataError("vocab must be in [1, 9999] (event ids are ev0000..ev9999)");
    if (slice_count < 1) throw DataError("slices must be at least 1");
    if (machines < 1) throw DataError("machines must be at least 1");
    if (len_mean <= 0.0) throw DataError("len_mean must be positive");
    if (len_spread < 0.0) throw DataError("len_spread must be non-negative");
    if (background_exponent < 0.0) throw DataError("background exponent must be non-negative");
    if (dropout < 0.0 || dropout >= 1.0) throw DataError("dropout must be in [0,1)");
    if (noise_rate < 0.0 || noise_rate >= 1.0) throw DataError("noise must be in [0,1)");

    std::set<std::string> names;
    std::set<uint32_t> claimed;
    for (const auto& c : campaigns) {
      if (c.name.empty()) throw DataError("campaign needs a name");
      if (!names.insert(c.name).second) throw DataError("duplicate campaign name: " + c.name);
      if (c.members.empty()) throw DataError("campaign has no members: " + c.name);
      for (uint32_t m : c.members) {
        if (m >= vocab_size)
          throw DataError("campaign member out of vocab range in " + c.name);
        claimed.insert(m);
      }
      if (!(c.t_start < c.t_end && c.t_end <= slice_count))
        throw DataError("campaign active range invalid in " + c.name);
      if (c.intensity < 0.0 || (c.ramp_to && *c.ramp_to < 0.0))
        throw DataError("campaign intensity must be non-negative in " + c.name);
      if (c.spike && (c.spike->high < 0.0 || c.spike->low < 0.0))
        throw DataError("spike intensities must be non-negative in " + c.name);
    }
    if (claimed.size() >= vocab_size)
      throw DataError("no background events left outside campaigns");
    for (const auto& c : campaigns) {
      if (!c.switch_to) continue;
      auto it = std::find_if(campaigns.begin(), campaigns.end(),
                             [&](const Campaign& o) { return o.name == *c.switch_to; });
      if (it == campaigns.end())
        throw DataError("switch_to names unknown campaign in " + c.name);
      if (it->t_start != c.t_end)
        throw DataError("switch_to successor must start when " + c.name + " ends");
    }
  }
};

namespace detail {

inline std::string event_name(uint32_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "ev%04u", index);
  return buf;
}

inline std::string machine_name(uint32_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "m%04u", index);
  return buf;
}

}  // namespace detail

/// Timestamps are slice origin plus token position, so ingesting the log
/// reproduces generated token order exactly.
constexpr int64_t kSynthPeriod = 1000000;

/// Generates the event-log records for one scenario.  Each (slice, machine)
/// cell consumes an independent derived random stream, so the output does
/// not depend on generation order.
inline std::vector<RawRecord> generate_records(const Scenario& scenario) {
  scenario.validate();

  std::set<uint32_t> claimed;
  for (const auto& c : scenario.campaigns)
    for (uint32_t m : c.members) claimed.insert(m);
  std::vector<uint32_t> pool;
  for (uint32_t e = 0; e < scenario.vocab_size; ++e)
    if (!claimed.count(e)) pool.push_back(e);

  std::vector<double> weights(pool.size());
  for (size_t r = 0; r < pool.size(); ++r)
    weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), scenario.background_exponent);
  WeightedSampler sampler(weights);

  std::vector<RawRecord> records;
  for (uint32_t t = 0; t < scenario.slice_count; ++t) {
    for (uint32_t m = 0; m < scenario.machines; ++m) {
      Rng rng(mix_seed(scenario.seed, t, m));
      const double raw_len = rng.normal(scenario.len_mean, scenario.len_spread);
      const auto len = static_cast<size_t>(std::max(2.0, std::round(raw_len)));
      std::vector<uint32_t> seq;
      seq.reserve(len + 16);
      for (size_t i = 0; i < len; ++i) seq.push_back(pool[sampler.draw(rng)]);

      for (const auto& c : scenario.campaigns) {
        if (!c.active(t)) continue;
        const uint64_t bursts = rng.poisson(c.intensity_at(t));
        for (uint64_t b = 0; b < bursts; ++b) {
          std::vector<uint32_t> order = c.members;
          rng.shuffle(order);
          std::vector<uint32_t> burst;
          for (uint32_t mm : order) {
            if (rng.uniform01() < scenario.dropout) continue;
            burst.push_back(mm);
            if (rng.uniform01() < scenario.noise_rate)
              burst.push_back(pool[sampler.draw(rng)]);
          }
          const size_t pos = rng.uniform_index(seq.size() + 1);
          seq.insert(seq.begin() + pos, burst.begin(), burst.end());
        }
      }

      const std::string machine = detail::machine_name(m);
      const int64_t slice_origin = static_cast<int64_t>(t) * kSynthPeriod;
      for (size_t p = 0; p < seq.size(); ++p)
        records.push_back(
            {machine, slice_origin + static_cast<int64_t>(p), detail::event_name(seq[p])});
    }
  }
  return records;
}

/// Convenience path used by tests: generate then bucket into an EventCorpus.
inline EventCorpus generate_corpus(const Scenario& scenario) {
  ParseStats stats;
  return build_corpus(generate_records(scenario), kSynthPeriod, 0, stats);
}

/// Event-log emission, one `machine_id,timestamp,event_id` line per record.
inline void write_event_log(const std::vector<RawRecord>& records, std::ostream& out) {
  for (const auto& r : records)
    out << r.machine_id << "," << r.timestamp << "," << r.event_id << "\n";
}

// --- Scenario file format ----------------------------------------------------
//
// Line-oriented text.  `#` starts a comment.  Scalar settings are
// `key = value` with keys: vocab, slices, machines, len_mean, len_spread,
// background, dropout, noise, seed.  Each campaign is a single line of
// space-separated key=value pairs:
//
//   campaign name=<id> members=<spec> active=<t0>:<t1> intensity=<x>
//            [ramp_to=<y>] [spike=<from>:<to>:<high>:<low>] [switch_to=<id>]
//
// where <spec> is a comma list of indices and inclusive ranges (e.g.
// `3,10-14,27`) and active ranges are half-open.

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  try {
    size_t used = 0;
    out = std::stod(std::string(s), &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

inline bool parse_u32(std::string_view s, uint32_t& out) {
  int64_t v = 0;
  if (!parse_int64(s, v) || v < 0 || v > 0xffffffffll) return false;
  out = static_cast<uint32_t>(v);
  return true;
}

inline std::vector<uint32_t> parse_member_spec(std::string_view spec, size_t line_no) {
  std::vector<uint32_t> out;
  for (auto part : split(spec, ',')) {
    part = trim(part);
    auto dash = part.find('-');
    if (dash == std::string_view::npos) {
      uint32_t v;
      if (!parse_u32(part, v))
        throw DataError("line " + std::to_string(line_no) + ": bad member index '" +
                        std::string(part) + "'");
      out.push_back(v);
    } else {
      uint32_t lo, hi;
      if (!parse_u32(part.substr(0, dash), lo) || !parse_u32(part.substr(dash + 1), hi) ||
          lo > hi)
        throw DataError("line " + std::to_string(line_no) + ": bad member range '" +
                        std::string(part) + "'");
      for (uint32_t v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError("line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = detail::trim(line);
    if (sv.empty() || sv.front() == '#') continue;

    if (sv.substr(0, 9) == "campaign ") {
      Campaign c;
      std::optional<uint32_t> spike_from, spike_to;
      std::optional<double> spike_high, spike_low;
      for (auto tok : detail::split(sv.substr(9), ' ')) {
        tok = detail::trim(tok);
        if (tok.empty()) continue;
        auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw fail("expected key=value, got '" + std::string(tok) + "'");
        auto key = tok.substr(0, eq);
        auto val = tok.substr(eq + 1);
        if (key == "name") {
          c.name = std::string(val);
        } else if (key == "members") {
          c.members = detail::parse_member_spec(val, line_no);
        } else if (key == "active") {
          auto colon = val.find(':');
          if (colon == std::string_view::npos ||
              !detail::parse_u32(val.substr(0, colon), c.t_start) ||
              !detail::parse_u32(val.substr(colon + 1), c.t_end))
            throw fail("active must be t0:t1");
        } else if (key == "intensity") {
          if (!detail::parse_double(val, c.intensity)) throw fail("bad intensity");
        } else if (key == "ramp_to") {
          double v;
          if (!detail::parse_double(val, v)) throw fail("bad ramp_to");
          c.ramp_to = v;
        } else if (key == "spike") {
          auto parts = detail::split(val, ':');
          uint32_t f, to;
          double hi, lo;
          if (parts.size() != 4 || !detail::parse_u32(parts[0], f) ||
              !detail::parse_u32(parts[1], to) || !detail::parse_double(parts[2], hi) ||
              !detail::parse_double(parts[3], lo))
            throw fail("spike must be from:to:high:low");
          c.spike = Campaign::Spike{f, to, hi, lo};
        } else if (key == "switch_to") {
          c.switch_to = std::string(val);
        } else {
          throw fail("unknown campaign key '" + std::string(key) + "'");
        }
      }
      if (c.name.empty()) throw fail("campaign missing name");
      sc.campaigns.push_back(std::move(c));
      continue;
    }

    auto eq = sv.find('=');
    if (eq == std::string_view::npos) throw fail("expected key = value");
    auto key = detail::trim(sv.substr(0, eq));
    auto val = detail::trim(sv.substr(eq + 1));
    int64_t iv = 0;
    double dv = 0.0;
    if (key == "vocab") {
      if (!detail::parse_u32(val, sc.vocab_size)) throw fail("bad vocab");
    } else if (key == "slices") {
      if (!detail::parse_u32(val, sc.slice_count)) throw fail("bad slices");
    } else if (key == "machines") {
      if (!detail::parse_u32(val, sc.machines)) throw fail("bad machines");
    } else if (key == "len_mean") {
      if (!detail::parse_double(val, sc.len_mean)) throw fail("bad len_mean");
    } else if (key == "len_spread") {
      if (!detail::parse_double(val, sc.len_spread)) throw fail("bad len_spread");
    } else if (key == "background") {
      if (!detail::parse_double(val, sc.background_exponent)) throw fail("bad background");
    } else if (key == "dropout") {
      if (!detail::parse_double(val, dv)) throw fail("bad dropout");
      sc.dropout = dv;
    } else if (key == "noise") {
      if (!detail::parse_double(val, dv)) throw fail("bad noise");
      sc.noise_rate = dv;
    } else if (key == "seed") {
      if (!detail::parse_int64(val, iv) || iv < 0) throw fail("bad seed");
      sc.seed = static_cast<uint64_t>(iv);
    } else {
      throw fail("unknown setting '" + std::string(key) + "'");
    }
  }
  sc.validate();
  return sc;
}

/// Machine-readable planting record: per-member activation slice and
/// campaign memberships, plus campaign hand-over points.
struct GroundTruth {
  struct Membership {
    std::string campaign;
    uint32_t from = 0, to = 0;
  };
  std::map<std::string, std::vector<Membership>> events;  // key: event id
  std::map<std::string, uint32_t> activation;             // key: event id
  struct Switch {
    std::string from_campaign, to_campaign;
    uint32_t slice = 0;
  };
  std::vector<Switch> switches;
};

inline GroundTruth describe_ground_truth(const Scenario& scenario) {
  scenario.validate();
  GroundTruth truth;
  for (const auto& c : scenario.campaigns) {
    for (uint32_t m : c.members) {
      const std::string id = detail::event_name(m);
      truth.events[id].push_back({c.name, c.t_start, c.t_end});
      auto it = truth.activation.find(id);
      if (it == truth.activation.end() || c.t_start < it->second)
        truth.activation[id] = c.t_start;
    }
    if (c.switch_to) truth.switches.push_back({c.name, *c.switch_to, c.t_end});
  }
  return truth;
}

}  // namespace evembed
