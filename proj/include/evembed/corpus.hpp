#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evembed/common.hpp"

namespace evembed {

/// Bidirectional mapping between opaque event identifiers and dense indices.
/// Indices are assigned in lexicographic order of event_id, so the mapping
/// is independent of input record order.
class EventVocabulary {
public:
  struct Entry {
    std::string event_id;
    std::string description;  // optional, empty when unknown
  };

  EventVocabulary() = default;

  /// Builds the vocabulary from a set of distinct ids (sorted internally).
  explicit EventVocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.event_id < b.event_id; });
    for (uint32_t i = 0; i < entries_.size(); ++i) {
      if (i > 0 && entries_[i].event_id == entries_[i - 1].event_id)
        throw std::logic_error("vocabulary has duplicate event_id: " + entries_[i].event_id);
      index_.emplace(entries_[i].event_id, i);
    }
  }

  uint32_t size() const { return static_cast<uint32_t>(entries_.size()); }
  const std::string& event_id(uint32_t index) const { return entries_.at(index).event_id; }
  const std::string& description(uint32_t index) const { return entries_.at(index).description; }

  std::optional<uint32_t> find(std::string_view event_id) const {
    auto it = index_.find(std::string(event_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Closest ids by edit distance, for diagnostics on unknown lookups.
  std::vector<std::string> nearest(std::string_view event_id, size_t k = 3) const {
    std::vector<std::pair<size_t, std::string>> scored;
    scored.reserve(entries_.size());
    for (const auto& e : entries_)
      scored.emplace_back(detail::levenshtein(event_id, e.event_id), e.event_id);
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> out;
    for (size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
    return out;
  }

private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, uint32_t> index_;
};

/// One machine's chronologically ordered events.  The machine identifier
/// lives only in memory during construction and is never serialized.
struct MachineSequence {
  std::string machine_id;
  std::vector<std::pair<int64_t, uint32_t>> events;  // (timestamp, event index)
};

/// All sequences observed in one observation period [period_start, period_end).
struct TimeSlice {
  uint32_t slice_index = 0;
  int64_t period_start = 0;
  int64_t period_end = 0;
  std::vector<MachineSequence> sequences;
  uint64_t token_count = 0;
};

/// The full partitioned corpus: one shared vocabulary, T ordered slices.
/// Events absent from a slice simply have zero count there.
struct EventCorpus {
  EventVocabulary vocabulary;
  std::vector<TimeSlice> slices;
  int64_t origin = 0;
  int64_t period_length = 0;

  uint32_t slice_count() const { return static_cast<uint32_t>(slices.size()); }
  uint64_t total_tokens() const {
    uint64_t n = 0;
    for (const auto& s : slices) n += s.token_count;
    return n;
  }
};

/// One parsed input line, prior to vocabulary compaction.
struct RawRecord {
  std::string machine_id;
  int64_t timestamp = 0;
  std::string event_id;
};

struct ParseStats {
  uint64_t parsed = 0;
  uint64_t skipped_malformed = 0;
  uint64_t rejected_before_origin = 0;  // filled by build_corpus
};

namespace detail {

inline bool parse_int64(std::string_view s, int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Accepts "YYYY-MM-DDTHH:MM:SS" (optionally with trailing "Z") as UTC.
inline bool parse_iso8601(std::string_view s, int64_t& out) {
  s = trim(s);
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  int y, mo, d, h, mi, se;
  if (std::sscanf(std::string(s).c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &se) != 6)
    return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) return false;
  // days since epoch, civil-from-days inverse (Howard Hinnant's algorithm)
  int64_t yy = y - (mo <= 2 ? 1 : 0);
  int64_t era = (yy >= 0 ? yy : yy - 399) / 400;
  int64_t yoe = yy - era * 400;
  int64_t doy = (153 * (mo + (mo > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  int64_t days = era * 146097 + doe - 719468;
  out = days * 86400 + h * 3600 + mi * 60 + se;
  return true;
}

inline bool parse_timestamp(std::string_view s, int64_t& out) {
  if (parse_int64(s, out)) return true;
  return parse_iso8601(s, out);
}

}  // namespace detail

/// Reads `machine_id, timestamp, event_id` records, one per line.  Fields are
/// comma- or tab-delimited; `#` lines are comments.  Malformed lines are
/// skipped and counted, never fatal.  Input order is preserved.
inline std::vector<RawRecord> parse_event_log(std::istream& in, ParseStats& stats) {
  if (!in.good()) throw DataError("unreadable event log stream");
  std::vector<RawRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = detail::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    char delim = sv.find('\t') != std::string_view::npos ? '\t' : ',';
    auto fields = detail::split(sv, delim);
    if (fields.size() != 3) {
      ++stats.skipped_malformed;
      continue;
    }
    RawRecord rec;
    rec.machine_id = std::string(detail::trim(fields[0]));
    rec.event_id = std::string(detail::trim(fields[2]));
    if (rec.machine_id.empty() || rec.event_id.empty() ||
        !detail::parse_timestamp(fields[1], rec.timestamp)) {
      ++stats.skipped_malformed;
      continue;
    }
    records.push_back(std::move(rec));
    ++stats.parsed;
  }
  return records;
}

/// Buckets records into contiguous slices of `period_length` starting at
/// `origin`, groups them into per-machine sequences sorted by
/// (timestamp, event_id, input position), and compacts the vocabulary.
/// Records before `origin` are rejected and counted.
inline EventCorpus build_corpus(const std::vector<RawRecord>& records, int64_t period_length,
                                int64_t origin, ParseStats& stats) {
  if (period_length <= 0) throw DataError("period_length must be positive");
  if (records.empty()) throw DataError("no records to build corpus from");

  struct Item {
    int64_t timestamp;
    std::string_view event_id;
    size_t input_pos;
  };
  // (slice, machine_id) -> items; std::map keeps machine order deterministic.
  std::map<std::pair<uint32_t, std::string_view>, std::vector<Item>> buckets;
  std::vector<EventVocabulary::Entry> vocab_entries;
  std::unordered_map<std::string_view, uint32_t> seen;
  uint32_t max_slice = 0;
  uint64_t accepted = 0;

  for (size_t pos = 0; pos < records.size(); ++pos) {
    const auto& rec = records[pos];
    if (rec.timestamp < origin) {
      ++stats.rejected_before_origin;
      continue;
    }
    auto t = static_cast<uint32_t>((rec.timestamp - origin) / period_length);
    max_slice = std::max(max_slice, t);
    buckets[{t, rec.machine_id}].push_back({rec.timestamp, rec.event_id, pos});
    if (seen.emplace(rec.event_id, 0).second)
      vocab_entries.push_back({rec.event_id, ""});
    ++accepted;
  }
  if (accepted == 0) throw DataError("all records rejected (before origin)");

  EventCorpus corpus;
  corpus.origin = origin;
  corpus.period_length = period_length;
  corpus.vocabulary = EventVocabulary(std::move(vocab_entries));

  corpus.slices.resize(max_slice + 1);
  for (uint32_t t = 0; t <= max_slice; ++t) {
    corpus.slices[t].slice_index = t;
    corpus.slices[t].period_start = origin + static_cast<int64_t>(t) * period_length;
    corpus.slices[t].period_end = corpus.slices[t].period_start + period_length;
  }
  for (auto& [key, items] : buckets) {
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      if (a.event_id != b.event_id) return a.event_id < b.event_id;
      return a.input_pos < b.input_pos;
    });
    MachineSequence seq;
    seq.machine_id = std::string(key.second);
    seq.events.reserve(items.size());
    for (const auto& item : items)
      seq.events.emplace_back(item.timestamp, *corpus.vocabulary.find(item.event_id));
    auto& slice = corpus.slices[key.first];
    slice.token_count += seq.events.size();
    slice.sequences.push_back(std::move(seq));
  }
  return corpus;
}

/// table[t][i] = occurrences of event i in slice t.
inline std::vector<std::vector<uint64_t>> event_counts(const EventCorpus& corpus) {
  std::vector<std::vector<uint64_t>> table(
      corpus.slice_count(), std::vector<uint64_t>(corpus.vocabulary.size(), 0));
  for (const auto& slice : corpus.slices)
    for (const auto& seq : slice.sequences)
      for (const auto& [ts, idx] : seq.events) ++table[slice.slice_index][idx];
  return table;
}

/// Per-event totals across all slices; used by the min-count report filter.
inline std::vector<uint64_t> total_event_counts(const EventCorpus& corpus) {
  std::vector<uint64_t> totals(corpus.vocabulary.size(), 0);
  for (const auto& slice : corpus.slices)
    for (const auto& seq : slice.sequences)
      for (const auto& [ts, idx] : seq.events) ++totals[idx];
  return totals;
}

// --- Serialization -----------------------------------------------------------
//
// Corpus file (text, UTF-8):
//   #evcorpus v1
//   meta events=<|E|> slices=<T> origin=<epoch secs> period=<secs>
//   v <index> <event_id> [description]        one line per vocabulary entry
//   s <t> <start> <end> <n_sequences> <token_count>
//   q <len> <rel_ts>:<idx> ...                one line per sequence
// Timestamps inside sequences are relative to the slice's period_start.
// Machine identifiers are intentionally not persisted.

inline void save_corpus(const EventCorpus& corpus, std::ostream& out) {
  out << "#evcorpus v1\n";
  out << "meta events=" << corpus.vocabulary.size() << " slices=" << corpus.slice_count()
      << " origin=" << corpus.origin << " period=" << corpus.period_length << "\n";
  for (uint32_t i = 0; i < corpus.vocabulary.size(); ++i) {
    out << "v " << i << " " << corpus.vocabulary.event_id(i);
    if (!corpus.vocabulary.description(i).empty()) out << " " << corpus.vocabulary.description(i);
    out << "\n";
  }
  for (const auto& slice : corpus.slices) {
    out << "s " << slice.slice_index << " " << slice.period_start << " " << slice.period_end
        << " " << slice.sequences.size() << " " << slice.token_count << "\n";
    for (const auto& seq : slice.sequences) {
      out << "q " << seq.events.size();
      for (const auto& [ts, idx] : seq.events) out << " " << (ts - slice.period_start) << ":" << idx;
      out << "\n";
    }
  }
}

inline void save_corpus_file(const EventCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open corpus file for writing: " + path);
  save_corpus(corpus, out);
  if (!out) throw DataError("write failure on corpus file: " + path);
}

inline EventCorpus load_corpus(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "#evcorpus v1")
    throw DataError("not a corpus file (missing #evcorpus v1 header)");
  if (!std::getline(in, line)) throw DataError("corpus file truncated at meta line");

  uint64_t n_events = 0, n_slices = 0;
  int64_t origin = 0, period = 0;
  {
    std::istringstream meta(line);
    std::string tag, kv;
    meta >> tag;
    if (tag != "meta") throw DataError("corpus file missing meta line");
    bool have_e = false, have_s = false, have_o = false, have_p = false;
    while (meta >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw DataError("malformed meta entry: " + kv);
      std::string key = kv.substr(0, eq);
      int64_t value = 0;
      if (!detail::parse_int64(kv.substr(eq + 1), value))
        throw DataError("malformed meta value: " + kv);
      if (key == "events") n_events = value, have_e = true;
      else if (key == "slices") n_slices = value, have_s = true;
      else if (key == "origin") origin = value, have_o = true;
      else if (key == "period") period = value, have_p = true;
    }
    if (!(have_e && have_s && have_o && have_p))
      throw DataError("meta line missing required keys");
  }

  std::vector<EventVocabulary::Entry> entries(n_events);
  std::vector<bool> filled(n_events, false);
  EventCorpus corpus;
  corpus.origin = origin;
  corpus.period_length = period;
  corpus.slices.reserve(n_slices);

  TimeSlice* cur = nullptr;
  uint64_t expect_seqs = 0;
  while (std::getline(in, line)) {
    std::string_view sv = detail::trim(line);
    if (sv.empty()) continue;
    if (sv[0] == 'v') {
      std::istringstream ls{std::string(sv)};
      std::string tag, id, desc;
      uint64_t idx;
      ls >> tag >> idx >> id;
      std::getline(ls, desc);
      if (idx >= n_events) throw DataError("vocabulary index out of range in corpus file");
      entries[idx] = {id, std::string(detail::trim(desc))};
      filled[idx] = true;
    } else if (sv[0] == 's') {
      if (cur && cur->sequences.size() != expect_seqs)
        throw DataError("corpus file: sequence count mismatch in slice " +
                        std::to_string(cur->slice_index));
      std::istringstream ls{std::string(sv)};
      std::string tag;
      TimeSlice slice;
      uint64_t nseq = 0;
      ls >> tag >> slice.slice_index >> slice.period_start >> slice.period_end >> nseq >>
          slice.token_count;
      if (!ls) throw DataError("malformed slice header in corpus file");
      slice.token_count = 0;  // recomputed from sequences
      corpus.slices.push_back(std::move(slice));
      cur = &corpus.slices.back();
      expect_seqs = nseq;
    } else if (sv[0] == 'q') {
      if (!cur) throw DataError("corpus file: sequence before first slice header");
      std::istringstream ls{std::string(sv)};
      std::string tag;
      uint64_t len = 0;
      ls >> tag >> len;
      MachineSequence seq;
      seq.events.reserve(len);
      std::string tok;
      while (ls >> tok) {
        auto colon = tok.find(':');
        int64_t rel = 0, idx = 0;
        if (colon == std::string::npos || !detail::parse_int64(tok.substr(0, colon), rel) ||
            !detail::parse_int64(tok.substr(colon + 1), idx) ||
            idx < 0 || static_cast<uint64_t>(idx) >= n_events)
          throw DataError("malformed sequence token in corpus file: " + tok);
        seq.events.emplace_back(cur->period_start + rel, static_cast<uint32_t>(idx));
      }
      if (seq.events.size() != len)
        throw DataError("sequence length mismatch in corpus file");
      cur->token_count += seq.events.size();
      cur->sequences.push_back(std::move(seq));
    } else {
      throw DataError("unrecognized corpus file line: " + std::string(sv.substr(0, 20)));
    }
  }
  if (cur && cur->sequences.size() != expect_seqs)
    throw DataError("corpus file: sequence count mismatch in final slice");
  if (corpus.slices.size() != n_slices) throw DataError("corpus file: slice count mismatch");
  for (uint64_t i = 0; i < n_events; ++i)
    if (!filled[i]) throw DataError("corpus file: missing vocabulary entry " + std::to_string(i));

  // Sequence tokens reference entry order as stored, and the vocabulary
  // assigns indices lexicographically, so the file must already be sorted.
  for (uint64_t i = 1; i < n_events; ++i)
    if (!(entries[i - 1].event_id < entries[i].event_id))
      throw DataError("corpus file vocabulary not sorted by event_id");
  corpus.vocabulary = EventVocabulary(std::move(entries));
  return corpus;
}

inline EventCorpus load_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return load_corpus(in);
}

/// Vocabulary sidecar: `index<TAB>event_id<TAB>description` per line.
inline void save_vocabulary(const EventVocabulary& vocab, std::ostream& out) {
  for (uint32_t i = 0; i < vocab.size(); ++i)
    out << i << "\t" << vocab.event_id(i) << "\t" << vocab.description(i) << "\n";
}

}  // namespace evembed
