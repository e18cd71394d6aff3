#include <cmath>
#include <map>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "evembed/cooccur.hpp"
#include "evembed/synth.hpp"

using namespace evembed;
using Catch::Matchers::ContainsSubstring;

namespace {

Scenario base_scenario() {
  Scenario sc;
  sc.vocab_size = 30;
  sc.slice_count = 6;
  sc.machines = 40;
  sc.len_mean = 30.0;
  sc.len_spread = 6.0;
  sc.background_exponent = 1.2;
  sc.dropout = 0.2;
  sc.noise_rate = 0.1;
  sc.seed = 11;
  return sc;
}

uint32_t index_of(const EventCorpus& corpus, uint32_t event) {
  auto idx = corpus.vocabulary.find(detail::event_name(event));
  REQUIRE(idx.has_value());
  return *idx;
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed scenario") {
  auto sc = base_scenario();
  sc.campaigns.push_back({"c", {25, 26, 27}, 1, 4, 2.0});
  auto a = generate_records(sc);
  auto b = generate_records(sc);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].machine_id == b[i].machine_id);
    REQUIRE(a[i].timestamp == b[i].timestamp);
    REQUIRE(a[i].event_id == b[i].event_id);
  }
}

TEST_CASE("per-machine streams do not depend on the machine count") {
  auto sc = base_scenario();
  sc.machines = 6;
  auto small = generate_records(sc);
  sc.machines = 9;
  auto large = generate_records(sc);

  std::vector<RawRecord> filtered;
  for (const auto& r : large)
    if (r.machine_id < "m0006") filtered.push_back(r);
  REQUIRE(filtered.size() == small.size());
  for (size_t i = 0; i < small.size(); ++i) {
    REQUIRE(small[i].machine_id == filtered[i].machine_id);
    REQUIRE(small[i].timestamp == filtered[i].timestamp);
    REQUIRE(small[i].event_id == filtered[i].event_id);
  }
}

TEST_CASE("campaign members appear only while the campaign is active") {
  auto sc = base_scenario();
  sc.campaigns.push_back({"burst", {25, 26, 27, 28}, 2, 4, 3.0});
  auto corpus = generate_corpus(sc);
  auto counts = event_counts(corpus);
  REQUIRE(counts.size() == sc.slice_count);
  for (uint32_t member : {25u, 26u, 27u, 28u}) {
    const uint32_t idx = index_of(corpus, member);
    for (uint32_t t = 0; t < sc.slice_count; ++t) {
      if (t == 2 || t == 3)
        REQUIRE(counts[t][idx] > 0);
      else
        REQUIRE(counts[t][idx] == 0);
    }
  }
}

TEST_CASE("zero intensity plants nothing") {
  auto sc = base_scenario();
  sc.campaigns.push_back({"ghost", {29}, 0, 6, 0.0});
  auto corpus = generate_corpus(sc);
  REQUIRE_FALSE(corpus.vocabulary.find("ev0029").has_value());
}

TEST_CASE("background frequencies follow the configured power law") {
  Scenario sc;
  sc.vocab_size = 40;
  sc.slice_count = 2;
  sc.machines = 80;
  sc.len_mean = 80.0;
  sc.len_spread = 8.0;
  sc.background_exponent = 1.5;
  sc.seed = 21;
  auto corpus = generate_corpus(sc);
  auto totals = total_event_counts(corpus);

  // log-log least squares over the first dozen ranks
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 12;
  for (int r = 1; r <= n; ++r) {
    const uint32_t idx = index_of(corpus, static_cast<uint32_t>(r - 1));
    REQUIRE(totals[idx] > 0);
    const double x = std::log(static_cast<double>(r));
    const double y = std::log(static_cast<double>(totals[idx]));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  REQUIRE(slope == Catch::Approx(-1.5).margin(0.3));
}

TEST_CASE("a switch moves the pivot's co-occurrence partners") {
  auto sc = base_scenario();
  Campaign first{"first", {0, 1, 2, 3, 4}, 0, 3, 3.0};
  first.switch_to = "second";
  sc.campaigns.push_back(first);
  sc.campaigns.push_back({"second", {4, 5, 6, 7, 8}, 3, 6, 3.0});
  auto corpus = generate_corpus(sc);

  const uint32_t pivot = index_of(corpus, 4);
  auto mass_with = [&](uint32_t t, std::initializer_list<uint32_t> partners) {
    auto counts = count_pairs(corpus.slices[t], 4);
    uint64_t mass = 0;
    for (uint32_t p : partners) {
      const uint32_t idx = index_of(corpus, p);
      mass += counts.pair_count(std::min(pivot, idx), std::max(pivot, idx));
    }
    return mass;
  };

  REQUIRE(mass_with(0, {0, 1, 2, 3}) > mass_with(0, {5, 6, 7, 8}));
  REQUIRE(mass_with(5, {5, 6, 7, 8}) > mass_with(5, {0, 1, 2, 3}));
  // predecessor partners vanish entirely once only the successor is active
  REQUIRE(mass_with(5, {0, 1, 2, 3}) == 0);
}

TEST_CASE("token order survives the corpus round trip") {
  auto sc = base_scenario();
  sc.machines = 5;
  sc.slice_count = 3;
  sc.campaigns.push_back({"c", {25, 26, 27}, 0, 3, 2.0});
  auto records = generate_records(sc);
  ParseStats stats;
  auto corpus = build_corpus(records, kSynthPeriod, 0, stats);
  REQUIRE(stats.rejected_before_origin == 0);

  std::map<std::pair<uint32_t, std::string>, std::vector<RawRecord>> expected;
  for (const auto& r : records) {
    const auto t = static_cast<uint32_t>(r.timestamp / kSynthPeriod);
    expected[{t, r.machine_id}].push_back(r);
  }
  for (const auto& slice : corpus.slices) {
    for (const auto& seq : slice.sequences) {
      const auto& want = expected.at({slice.slice_index, seq.machine_id});
      REQUIRE(seq.events.size() == want.size());
      for (size_t i = 0; i < want.size(); ++i) {
        REQUIRE(seq.events[i].first == want[i].timestamp);
        REQUIRE(corpus.vocabulary.event_id(seq.events[i].second) == want[i].event_id);
      }
    }
  }
}

TEST_CASE("intensity shapes evaluate as documented") {
  Campaign ramp{"r", {0}, 0, 5, 1.0};
  ramp.ramp_to = 3.0;
  REQUIRE(ramp.intensity_at(0) == Catch::Approx(1.0));
  REQUIRE(ramp.intensity_at(2) == Catch::Approx(2.0));
  REQUIRE(ramp.intensity_at(4) == Catch::Approx(3.0));

  Campaign spike{"s", {0}, 0, 10, 1.0};
  spike.spike = Campaign::Spike{3, 5, 4.0, 0.25};
  REQUIRE(spike.intensity_at(2) == Catch::Approx(0.25));
  REQUIRE(spike.intensity_at(3) == Catch::Approx(4.0));
  REQUIRE(spike.intensity_at(4) == Catch::Approx(4.0));
  REQUIRE(spike.intensity_at(5) == Catch::Approx(0.25));

  Campaign flat{"f", {0}, 2, 3, 1.5};
  REQUIRE(flat.intensity_at(2) == Catch::Approx(1.5));
  REQUIRE(flat.active(2));
  REQUIRE_FALSE(flat.active(3));
}

TEST_CASE("scenario files parse into full configurations") {
  std::istringstream in(
      "# demo recipe\n"
      "vocab = 50\n"
      "slices = 8\n"
      "machines = 12\n"
      "len_mean = 25\n"
      "len_spread = 5\n"
      "background = 1.3\n"
      "dropout = 0.1\n"
      "noise = 0.05\n"
      "seed = 77\n"
      "\n"
      "campaign name=alpha members=40-43,45 active=0:4 intensity=2.5 "
      "ramp_to=4.0 switch_to=beta\n"
      "campaign name=beta members=30-34 active=4:8 intensity=1.5 "
      "spike=5:7:3.0:0.5\n");
  auto sc = parse_scenario(in);
  REQUIRE(sc.vocab_size == 50);
  REQUIRE(sc.slice_count == 8);
  REQUIRE(sc.machines == 12);
  REQUIRE(sc.len_mean == 25.0);
  REQUIRE(sc.len_spread == 5.0);
  REQUIRE(sc.background_exponent == 1.3);
  REQUIRE(sc.dropout == 0.1);
  REQUIRE(sc.noise_rate == 0.05);
  REQUIRE(sc.seed == 77);
  REQUIRE(sc.campaigns.size() == 2);

  const auto& alpha = sc.campaigns[0];
  REQUIRE(alpha.name == "alpha");
  REQUIRE(alpha.members == std::vector<uint32_t>{40, 41, 42, 43, 45});
  REQUIRE(alpha.t_start == 0);
  REQUIRE(alpha.t_end == 4);
  REQUIRE(alpha.intensity == 2.5);
  REQUIRE(alpha.ramp_to == 4.0);
  REQUIRE(alpha.switch_to == "beta");

  const auto& beta = sc.campaigns[1];
  REQUIRE(beta.members.size() == 5);
  REQUIRE(beta.spike.has_value());
  REQUIRE(beta.spike->from == 5);
  REQUIRE(beta.spike->to == 7);
  REQUIRE(beta.spike->high == 3.0);
  REQUIRE(beta.spike->low == 0.5);
}

TEST_CASE("scenario parse errors carry line numbers") {
  std::istringstream bad_value("vocab = ten\n");
  REQUIRE_THROWS_WITH(parse_scenario(bad_value), ContainsSubstring("line 1"));

  std::istringstream bad_member(
      "vocab = 20\n"
      "campaign name=c members=5-3 active=0:2 intensity=1\n");
  REQUIRE_THROWS_WITH(parse_scenario(bad_member), ContainsSubstring("line 2"));

  std::istringstream unknown(
      "vocab = 20\n"
      "\n"
      "wibble = 3\n");
  REQUIRE_THROWS_WITH(parse_scenario(unknown), ContainsSubstring("line 3"));

  std::istringstream no_name("campaign members=1 active=0:2 intensity=1\n");
  REQUIRE_THROWS_AS(parse_scenario(no_name), DataError);
}

TEST_CASE("scenario validation rejects inconsistent recipes") {
  auto sc = base_scenario();
  sc.campaigns.push_back({"c", {5}, 4, 9, 1.0});  // beyond slice_count
  REQUIRE_THROWS_AS(sc.validate(), DataError);

  sc = base_scenario();
  Campaign a{"a", {1}, 0, 3, 1.0};
  a.switch_to = "b";
  sc.campaigns.push_back(a);
  sc.campaigns.push_back({"b", {2}, 4, 6, 1.0});  // gap after a ends
  REQUIRE_THROWS_AS(sc.validate(), DataError);

  sc = base_scenario();
  a.switch_to = "nope";
  sc.campaigns = {a};
  REQUIRE_THROWS_AS(sc.validate(), DataError);

  sc = base_scenario();
  sc.vocab_size = 3;
  sc.campaigns.push_back({"all", {0, 1, 2}, 0, 2, 1.0});  // empty background pool
  REQUIRE_THROWS_AS(sc.validate(), DataError);

  sc = base_scenario();
  sc.dropout = 1.0;
  REQUIRE_THROWS_AS(sc.validate(), DataError);

  sc = base_scenario();
  sc.vocab_size = 10000;  // event ids only go to ev9999
  REQUIRE_THROWS_AS(sc.validate(), DataError);

  sc = base_scenario();
  sc.campaigns.push_back({"dup", {1}, 0, 2, 1.0});
  sc.campaigns.push_back({"dup", {2}, 0, 2, 1.0});
  REQUIRE_THROWS_AS(sc.validate(), DataError);
}

TEST_CASE("ground truth records activations, overlaps and switches") {
  auto sc = base_scenario();
  sc.slice_count = 8;
  Campaign a{"a", {1, 2}, 2, 5, 1.0};
  a.switch_to = "c";
  sc.campaigns.push_back(a);
  sc.campaigns.push_back({"b", {2, 3}, 0, 3, 1.0});
  sc.campaigns.push_back({"c", {6}, 5, 8, 1.0});
  auto truth = describe_ground_truth(sc);

  REQUIRE(truth.activation.at("ev0001") == 2);
  REQUIRE(truth.activation.at("ev0002") == 0);  // earliest of the two campaigns
  REQUIRE(truth.activation.at("ev0003") == 0);
  REQUIRE(truth.events.at("ev0002").size() == 2);
  REQUIRE(truth.events.at("ev0001").size() == 1);
  REQUIRE(truth.events.at("ev0001")[0].campaign == "a");
  REQUIRE(truth.events.at("ev0001")[0].from == 2);
  REQUIRE(truth.events.at("ev0001")[0].to == 5);

  REQUIRE(truth.switches.size() == 1);
  REQUIRE(truth.switches[0].from_campaign == "a");
  REQUIRE(truth.switches[0].to_campaign == "c");
  REQUIRE(truth.switches[0].slice == 5);
}

TEST_CASE("a single-slice scenario generates a usable corpus") {
  auto sc = base_scenario();
  sc.slice_count = 1;
  sc.machines = 4;
  sc.campaigns.push_back({"c", {25, 26}, 0, 1, 2.0});
  auto corpus = generate_corpus(sc);
  REQUIRE(corpus.slice_count() == 1);
  REQUIRE(corpus.slices[0].token_count > 0);
  REQUIRE(corpus.slices[0].sequences.size() == 4);
}

TEST_CASE("event and machine names sort numerically") {
  REQUIRE(detail::event_name(7) == "ev0007");
  REQUIRE(detail::event_name(9999) == "ev9999");
  REQUIRE(detail::machine_name(12) == "m0012");
  auto corpus = generate_corpus(base_scenario());
  for (uint32_t i = 1; i < corpus.vocabulary.size(); ++i)
    REQUIRE(corpus.vocabulary.event_id(i - 1) < corpus.vocabulary.event_id(i));
}

TEST_CASE("event log lines are machine,timestamp,event") {
  std::vector<RawRecord> records = {{"m0001", 5, "ev0002"}, {"m0002", 6, "ev0003"}};
  std::ostringstream out;
  write_event_log(records, out);
  REQUIRE(out.str() == "m0001,5,ev0002\nm0002,6,ev0003\n");
}
