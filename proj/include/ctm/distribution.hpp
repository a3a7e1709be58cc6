#pragma once

// D(n): production counts of output strings over a population of machines,
// together with the provenance needed to reproduce them, and the canonical
// text file format.

#include <algorithm>
#include <boost/crc.hpp>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctm/simulator.hpp"
#include "ctm/turing_machine.hpp"

namespace ctm {

inline constexpr int kDistributionFormatVersion = 1;

struct MergeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LoadError : std::runtime_error {
  LoadError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode : std::uint8_t { Exhaustive, Sampled };

// Which blank tapes every machine is started on. With `Both`, each machine is
// also run on a tape of 1s; by the complement bijection those runs contribute
// exactly the complements of the blank-0 outputs.
enum class TapeBlanks : std::uint8_t { Zero, Both };

inline std::uint64_t runs_per_machine(TapeBlanks b) { return b == TapeBlanks::Both ? 2 : 1; }

// Half-open machine-index interval.
struct IndexRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
  friend auto operator<=>(const IndexRange&, const IndexRange&) = default;
};

inline std::string complement(std::string s) {
  for (char& c : s) c = c == '0' ? '1' : '0';
  return s;
}

inline std::string reversed(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

inline bool is_bitstring(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

struct Distribution {
  int n = 1;
  Mode mode = Mode::Exhaustive;
  std::uint64_t cutoff = 1;
  OutputConvention convention = OutputConvention::BeforeFinalMove;
  TapeBlanks blanks = TapeBlanks::Both;
  // Exhaustive: covered index ranges, sorted and coalesced.
  std::vector<IndexRange> ranges;
  // Sampled: generator seeds of the merged runs (sorted) and total draws.
  std::vector<std::uint64_t> seeds;
  std::uint64_t sample_size = 0;

  std::uint64_t total_machines = 0;
  std::uint64_t halting_count = 0;
  std::map<std::string, std::uint64_t> counts;

  bool complete() const {
    return mode == Mode::Sampled ||
           (ranges.size() == 1 && ranges[0] == IndexRange{0, machine_count(n)});
  }

  double frequency(const std::string& s) const {
    auto it = counts.find(s);
    if (it == counts.end() || halting_count == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(halting_count);
  }

  void add(const std::string& output, std::uint64_t count = 1) {
    counts[output] += count;
    halting_count += count;
    if (blanks == TapeBlanks::Both) {
      counts[complement(output)] += count;
      halting_count += count;
    }
  }

  // Throws ValidationError describing the first broken invariant.
  void check_invariants() const {
    check_state_count(n);
    std::uint64_t sum = 0;
    for (const auto& [s, c] : counts) {
      if (!is_bitstring(s)) throw ValidationError("key '" + s + "' is not a nonempty bitstring");
      if (c == 0) throw ValidationError("zero count stored for '" + s + "'");
      sum += c;
    }
    if (sum != halting_count)
      throw ValidationError("counts sum to " + std::to_string(sum) + " but halting_count is " +
                            std::to_string(halting_count));
    if (halting_count > runs_per_machine(blanks) * total_machines)
      throw ValidationError("halting_count exceeds the number of runs");
    if (mode == Mode::Exhaustive) {
      std::uint64_t covered = 0;
      for (const auto& r : ranges) covered += r.size();
      if (covered != total_machines)
        throw ValidationError("index ranges cover " + std::to_string(covered) +
                              " machines but total_machines is " + std::to_string(total_machines));
    } else if (sample_size != total_machines) {
      throw ValidationError("sample_size differs from total_machines");
    }
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

inline Distribution empty_distribution(int n, Mode mode, std::uint64_t cutoff,
                                       OutputConvention convention = OutputConvention::BeforeFinalMove,
                                       TapeBlanks blanks = TapeBlanks::Both) {
  Distribution d;
  d.n = n;
  d.mode = mode;
  d.cutoff = cutoff;
  d.convention = convention;
  d.blanks = blanks;
  return d;
}

namespace detail {

inline std::vector<IndexRange> coalesce(std::vector<IndexRange> rs) {
  std::sort(rs.begin(), rs.end());
  std::vector<IndexRange> out;
  for (const auto& r : rs) {
    if (r.size() == 0) continue;
    if (!out.empty() && out.back().end == r.begin)
      out.back().end = r.end;
    else
      out.push_back(r);
  }
  return out;
}

}  // namespace detail

// Pointwise sum. Exhaustive partials must cover disjoint index ranges; sampled
// partials must come from disjoint seed sets.
inline Distribution merge(const Distribution& a, const Distribution& b) {
  if (a.n != b.n) throw MergeError("cannot merge distributions with different n");
  if (a.mode != b.mode) throw MergeError("cannot merge exhaustive with sampled distributions");
  if (a.cutoff != b.cutoff) throw MergeError("cannot merge distributions with different cutoffs");
  if (a.convention != b.convention) throw MergeError("output conventions differ");
  if (a.blanks != b.blanks) throw MergeError("tape blank settings differ");

  Distribution out = a;
  if (a.mode == Mode::Exhaustive) {
    std::vector<IndexRange> all = a.ranges;
    all.insert(all.end(), b.ranges.begin(), b.ranges.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i)
      if (all[i].begin < all[i - 1].end) throw MergeError("exhaustive index ranges overlap");
    out.ranges = detail::coalesce(std::move(all));
  } else {
    for (auto s : b.seeds)
      if (std::find(a.seeds.begin(), a.seeds.end(), s) != a.seeds.end())
        throw MergeError("sampled distributions share seed " + std::to_string(s));
    out.seeds.insert(out.seeds.end(), b.seeds.begin(), b.seeds.end());
    std::sort(out.seeds.begin(), out.seeds.end());
    out.sample_size += b.sample_size;
  }
  out.total_machines += b.total_machines;
  out.halting_count += b.halting_count;
  for (const auto& [s, c] : b.counts) out.counts[s] += c;
  return out;
}

// Rows by count descending, ties by bitstring ascending.
inline std::vector<std::pair<std::string, std::uint64_t>> sorted_rows(const Distribution& d) {
  std::vector<std::pair<std::string, std::uint64_t>> rows(d.counts.begin(), d.counts.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  return rows;
}

inline std::string crc_hex(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << crc.checksum();
  return os.str();
}

inline std::string format_ranges(const std::vector<IndexRange>& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(rs[i].begin) + "-" + std::to_string(rs[i].end);
  }
  return out;
}

inline std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

// Provenance lines shared by every file derived from a distribution.
inline std::vector<std::pair<std::string, std::string>> provenance(const Distribution& d) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("n", std::to_string(d.n));
  kv.emplace_back("mode", d.mode == Mode::Exhaustive ? "exhaustive" : "sampled");
  if (d.mode == Mode::Exhaustive) {
    kv.emplace_back("ranges", format_ranges(d.ranges));
  } else {
    kv.emplace_back("seed", format_seeds(d.seeds));
    kv.emplace_back("sample_size", std::to_string(d.sample_size));
  }
  kv.emplace_back("cutoff", std::to_string(d.cutoff));
  kv.emplace_back("output_convention", to_string(d.convention));
  kv.emplace_back("tape_blanks", d.blanks == TapeBlanks::Both ? "both" : "zero");
  kv.emplace_back("total_machines", std::to_string(d.total_machines));
  kv.emplace_back("halting_count", std::to_string(d.halting_count));
  return kv;
}

inline std::string distribution_body(const Distribution& d) {
  std::string body;
  for (const auto& [s, c] : sorted_rows(d)) {
    body += s;
    body += '\t';
    body += std::to_string(c);
    body += '\n';
  }
  return body;
}

inline std::string serialize_distribution(const Distribution& d,
                                          const std::vector<std::string>& extra_header = {}) {
  const std::string body = distribution_body(d);
  std::string out = "# ctm-distribution\n";
  out += "# format_version=" + std::to_string(kDistributionFormatVersion) + "\n";
  for (const auto& [k, v] : provenance(d)) out += "# " + k + "=" + v + "\n";
  for (const auto& line : extra_header) out += "# " + line + "\n";
  out += "# checksum=crc32:" + crc_hex(body) + "\n";
  return out + body;
}

inline void write_file_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp + "' for writing");
    f << contents;
    f.flush();
    if (!f) throw IoError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
}

inline void save_distribution(const Distribution& d, const std::string& path) {
  write_file_atomically(path, serialize_distribution(d));
}

namespace detail {

inline std::uint64_t parse_u64(const std::string& v, const std::string& path, std::size_t line,
                               const std::string& what) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw LoadError(path, line, "bad " + what + " '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw LoadError(path, line, what + " out of range: '" + v + "'");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) out.push_back(cur), cur.clear();
    else cur.push_back(c);
  }
  out.push_back(cur);
  return out;
}

struct ParsedFile {
  std::map<std::string, std::pair<std::string, std::size_t>> header;  // key -> (value, line)
  std::vector<std::pair<std::string, std::size_t>> repeated;  // "key=value" lines allowed to repeat
  std::vector<std::pair<std::string, std::size_t>> body;
  std::string body_text;
  std::size_t checksum_line = 0;
};

inline ParsedFile read_tagged_file(const std::string& path, const std::string& magic,
                                   const std::vector<std::string>& repeatable = {}) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  ParsedFile pf;
  std::string line;
  std::size_t lineno = 0;
  bool in_body = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "# " + magic) throw LoadError(path, lineno, "missing '# " + magic + "' tag");
      continue;
    }
    if (!in_body && !line.empty() && line[0] == '#') {
      std::string kv = line.substr(1);
      if (!kv.empty() && kv[0] == ' ') kv.erase(0, 1);
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw LoadError(path, lineno, "header line without '='");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (std::find(repeatable.begin(), repeatable.end(), key) != repeatable.end()) {
        pf.repeated.emplace_back(kv, lineno);
        continue;
      }
      if (!pf.header.emplace(key, std::make_pair(value, lineno)).second)
        throw LoadError(path, lineno, "duplicate header key '" + key + "'");
      if (key == "checksum") pf.checksum_line = lineno;
      continue;
    }
    in_body = true;
    pf.body.emplace_back(line, lineno);
    pf.body_text += line;
    pf.body_text += '\n';
  }
  if (lineno == 0) throw LoadError(path, 0, "empty file");
  return pf;
}

inline const std::string& require(const ParsedFile& pf, const std::string& path,
                                  const std::string& key) {
  auto it = pf.header.find(key);
  if (it == pf.header.end()) throw LoadError(path, pf.header.size() + 1, "missing header '" + key + "'");
  return it->second.first;
}

inline std::size_t line_of(const ParsedFile& pf, const std::string& key) {
  auto it = pf.header.find(key);
  return it == pf.header.end() ? 0 : it->second.second;
}

inline Distribution parse_distribution(const ParsedFile& pf, const std::string& path) {
  const auto num = [&](const std::string& key) {
    return parse_u64(require(pf, path, key), path, line_of(pf, key), key);
  };
  const std::string& version = require(pf, path, "format_version");
  if (version != std::to_string(kDistributionFormatVersion))
    throw LoadError(path, line_of(pf, "format_version"), "unsupported format_version " + version);

  Distribution d;
  const auto n = num("n");
  if (n < 1 || n > static_cast<std::uint64_t>(kMaxStateCount))
    throw LoadError(path, line_of(pf, "n"), "n out of range");
  d.n = static_cast<int>(n);
  const std::string& mode = require(pf, path, "mode");
  if (mode == "exhaustive") {
    d.mode = Mode::Exhaustive;
    const std::string& rs = require(pf, path, "ranges");
    if (!rs.empty()) {
      for (const auto& part : split(rs, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) throw LoadError(path, line_of(pf, "ranges"), "bad range '" + part + "'");
        IndexRange r{parse_u64(part.substr(0, dash), path, line_of(pf, "ranges"), "range"),
                     parse_u64(part.substr(dash + 1), path, line_of(pf, "ranges"), "range")};
        if (r.end < r.begin || r.end > machine_count(d.n))
          throw LoadError(path, line_of(pf, "ranges"), "range '" + part + "' out of bounds");
        d.ranges.push_back(r);
      }
    }
  } else if (mode == "sampled") {
    d.mode = Mode::Sampled;
    for (const auto& s : split(require(pf, path, "seed"), ','))
      d.seeds.push_back(parse_u64(s, path, line_of(pf, "seed"), "seed"));
    d.sample_size = num("sample_size");
  } else {
    throw LoadError(path, line_of(pf, "mode"), "unknown mode '" + mode + "'");
  }
  d.cutoff = num("cutoff");
  try {
    d.convention = parse_output_convention(require(pf, path, "output_convention"));
  } catch (const ValidationError& e) {
    throw LoadError(path, line_of(pf, "output_convention"), e.what());
  }
  const std::string& blanks = require(pf, path, "tape_blanks");
  if (blanks == "both") d.blanks = TapeBlanks::Both;
  else if (blanks == "zero") d.blanks = TapeBlanks::Zero;
  else throw LoadError(path, line_of(pf, "tape_blanks"), "unknown tape_blanks '" + blanks + "'");
  d.total_machines = num("total_machines");
  d.halting_count = num("halting_count");

  const std::string& checksum = require(pf, path, "checksum");
  if (checksum != "crc32:" + crc_hex(pf.body_text))
    throw LoadError(path, pf.checksum_line, "checksum mismatch (file is corrupt or was edited)");

  std::uint64_t sum = 0;
  for (const auto& [row, lineno] : pf.body) {
    const auto tab = row.find('\t');
    if (tab == std::string::npos) throw LoadError(path, lineno, "row without a tab separator");
    const std::string key = row.substr(0, tab);
    if (!is_bitstring(key)) throw LoadError(path, lineno, "'" + key + "' is not a bitstring");
    const auto c = parse_u64(row.substr(tab + 1), path, lineno, "count");
    if (c == 0) throw LoadError(path, lineno, "zero count");
    if (!d.counts.emplace(key, c).second) throw LoadError(path, lineno, "duplicate row '" + key + "'");
    sum += c;
  }
  if (sum != d.halting_count)
    throw LoadError(path, line_of(pf, "halting_count"),
                    "rows sum to " + std::to_string(sum) + ", header says halting_count=" +
                        std::to_string(d.halting_count));
  try {
    d.check_invariants();
  } catch (const ValidationError& e) {
    throw LoadError(path, line_of(pf, "total_machines"), e.what());
  }
  return d;
}

}  // namespace detail

inline Distribution load_distribution(const std::string& path) {
  return detail::parse_distribution(detail::read_tagged_file(path, "ctm-distribution"), path);
}

}  // namespace ctm
