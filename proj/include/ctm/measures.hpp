#pragma once

// The conventional randomness coefficients used on human-generated sequences:
// entropy and symbol redundancy, lagged block frequencies with a chi-square
// test, context redundancy / coefficient of constraint, and repetition gaps.
// Also the classic normal-but-trivial sequences (Champernowne, Copeland-Erdos)
// that fool all of them.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctm::measures {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct SymbolSequence {
  std::vector<std::string> alphabet;  // symbol id -> label
  std::vector<std::size_t> items;     // symbol ids

  std::size_t size() const { return items.size(); }
  std::size_t alphabet_size() const { return alphabet.size(); }

  std::string label(std::size_t i) const { return alphabet.at(items.at(i)); }

  // Concatenated labels; meaningful when every label is one character.
  std::string str() const {
    std::string out;
    for (auto id : items) out += alphabet[id];
    return out;
  }
};

// Builds a sequence from labels. With no declared alphabet, labels drawn only
// from {"0","1"} get the binary alphabet; anything else gets its distinct
// labels in sorted order.
inline SymbolSequence make_sequence(const std::vector<std::string>& labels,
                                    std::vector<std::string> alphabet = {}) {
  if (alphabet.empty()) {
    std::set<std::string> seen(labels.begin(), labels.end());
    if (std::all_of(seen.begin(), seen.end(), [](const std::string& s) { return s == "0" || s == "1"; }))
      alphabet = {"0", "1"};
    else
      alphabet.assign(seen.begin(), seen.end());
  }
  if (alphabet.size() < 2) throw DomainError("alphabet needs at least two symbols");
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (!id.emplace(alphabet[i], i).second) throw DomainError("duplicate alphabet symbol '" + alphabet[i] + "'");
  SymbolSequence seq;
  seq.alphabet = std::move(alphabet);
  for (const auto& l : labels) {
    auto it = id.find(l);
    if (it == id.end()) throw DomainError("symbol '" + l + "' is not in the alphabet");
    seq.items.push_back(it->second);
  }
  return seq;
}

// One symbol per character, or comma-separated tokens if the text has commas.
inline SymbolSequence parse_sequence(const std::string& text, std::vector<std::string> alphabet = {}) {
  std::vector<std::string> labels;
  if (text.find(',') != std::string::npos) {
    std::string cur;
    for (char c : text + ",") {
      if (c == ',') {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        if (b == std::string::npos) throw DomainError("empty token in '" + text + "'");
        labels.push_back(cur.substr(b, e - b + 1));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
  } else {
    for (char c : text)
      if (c != ' ' && c != '\t' && c != '\r') labels.emplace_back(1, c);
  }
  return make_sequence(labels, std::move(alphabet));
}

namespace detail {

inline double entropy_of_counts(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;  // 0 log 0 = 0
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

inline std::vector<std::uint64_t> symbol_counts(const SymbolSequence& seq) {
  std::vector<std::uint64_t> counts(seq.alphabet_size(), 0);
  for (auto id : seq.items) ++counts[id];
  return counts;
}

}  // namespace detail

inline double entropy(const SymbolSequence& seq) {
  if (seq.size() == 0) throw DomainError("entropy of an empty sequence");
  return detail::entropy_of_counts(detail::symbol_counts(seq));
}

inline double symbol_redundancy(const SymbolSequence& seq) {
  if (seq.alphabet_size() < 2) throw DomainError("symbol redundancy needs an alphabet of size >= 2");
  return 1.0 - entropy(seq) / std::log2(static_cast<double>(seq.alphabet_size()));
}

struct BlockFrequency {
  std::size_t block_length = 0;
  std::size_t gap = 0;
  // Index = tuple read as a base-|alphabet| numeral, first element most significant.
  std::vector<std::uint64_t> counts;
  std::uint64_t tuples = 0;
  double chi_square = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

// Tuples (x[i], x[i+g+1], ..., x[i+(k-1)(g+1)]) over every valid start i,
// with Pearson's chi-square against the uniform distribution over all k-tuples.
inline BlockFrequency block_frequency(const SymbolSequence& seq, std::size_t block_length, std::size_t gap) {
  if (block_length < 1) throw DomainError("block length must be at least 1");
  const std::size_t stride = gap + 1;
  const std::size_t span = (block_length - 1) * stride + 1;
  if (seq.size() < span)
    throw DomainError("sequence of length " + std::to_string(seq.size()) + " has no (" +
                      std::to_string(block_length) + ", " + std::to_string(gap) + ") tuples");
  const std::size_t n = seq.alphabet_size();
  std::size_t cells = 1;
  for (std::size_t j = 0; j < block_length; ++j) cells *= n;

  BlockFrequency bf;
  bf.block_length = block_length;
  bf.gap = gap;
  bf.counts.assign(cells, 0);
  for (std::size_t i = 0; i + span <= seq.size(); ++i) {
    std::size_t code = 0;
    for (std::size_t j = 0; j < block_length; ++j) code = code * n + seq.items[i + j * stride];
    ++bf.counts[code];
    ++bf.tuples;
  }
  const double expected = static_cast<double>(bf.tuples) / static_cast<double>(cells);
  for (auto c : bf.counts) {
    const double diff = static_cast<double>(c) - expected;
    bf.chi_square += diff * diff / expected;
  }
  bf.degrees_of_freedom = cells - 1;
  boost::math::chi_squared dist(static_cast<double>(bf.degrees_of_freedom));
  bf.p_value = boost::math::cdf(boost::math::complement(dist, bf.chi_square));
  return bf;
}

// Entropies of lag-k dyads (x[i], x[i+k]). The single-symbol entropy is taken
// over the leading elements of the dyads, so H_cond = H(next | current) and
// CR stays inside [0, 1].
struct LagEntropies {
  double pair = 0.0;
  double leading = 0.0;
  double conditional() const { return pair - leading; }
};

inline LagEntropies lag_entropies(const SymbolSequence& seq, std::size_t lag) {
  if (lag < 1) throw DomainError("lag must be at least 1");
  const BlockFrequency bf = block_frequency(seq, 2, lag - 1);
  const std::size_t n = seq.alphabet_size();
  std::vector<std::uint64_t> leading(n, 0);
  for (std::size_t code = 0; code < bf.counts.size(); ++code) leading[code / n] += bf.counts[code];
  return {detail::entropy_of_counts(bf.counts), detail::entropy_of_counts(leading)};
}

inline double context_redundancy(const SymbolSequence& seq, std::size_t lag) {
  const auto h = lag_entropies(seq, lag);
  const double cr = 1.0 - h.conditional() / std::log2(static_cast<double>(seq.alphabet_size()));
  return std::clamp(cr, 0.0, 1.0);  // rounding only
}

inline double coefficient_of_constraint(const SymbolSequence& seq, std::size_t lag) {
  const auto h = lag_entropies(seq, lag);
  if (h.leading == 0.0) throw DomainError("coefficient of constraint undefined: zero symbol entropy");
  return 1.0 - h.conditional() / h.leading;
}

// Per symbol (by label), the distances between consecutive occurrences.
inline std::map<std::string, std::vector<std::size_t>> gap_distribution(const SymbolSequence& seq) {
  std::map<std::string, std::vector<std::size_t>> gaps;
  std::vector<std::optional<std::size_t>> last(seq.alphabet_size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto& prev = last[seq.items[i]];
    auto& g = gaps[seq.alphabet[seq.items[i]]];
    if (prev) g.push_back(i - *prev);
    prev = i;
  }
  return gaps;
}

// Median of all gaps pooled across symbols (MdG).
inline double median_gap(const SymbolSequence& seq) {
  std::vector<std::size_t> pooled;
  for (const auto& [sym, g] : gap_distribution(seq)) pooled.insert(pooled.end(), g.begin(), g.end());
  if (pooled.empty()) throw DomainError("median gap undefined: no symbol repeats");
  std::sort(pooled.begin(), pooled.end());
  const std::size_t m = pooled.size() / 2;
  if (pooled.size() % 2 == 1) return static_cast<double>(pooled[m]);
  return (static_cast<double>(pooled[m - 1]) + static_cast<double>(pooled[m])) / 2.0;
}

// --- normal sequences generated by trivial rules ----------------------------

namespace detail {

inline SymbolSequence digit_sequence(const std::string& digits, unsigned base) {
  static const char* kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::vector<std::string> alphabet;
  for (unsigned b = 0; b < base; ++b) alphabet.emplace_back(1, kDigits[b]);
  std::vector<std::string> labels;
  labels.reserve(digits.size());
  for (char c : digits) labels.emplace_back(1, c);
  return make_sequence(labels, alphabet);
}

inline std::string to_base(std::uint64_t v, unsigned base) {
  static const char* kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string s;
  do {
    s.push_back(kDigits[v % base]);
    v /= base;
  } while (v);
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace detail

// First `length` digits of 1 2 3 4 ... written in `base` and concatenated.
inline SymbolSequence champernowne(std::size_t length, unsigned base = 10) {
  if (length < 1) throw DomainError("length must be at least 1");
  if (base < 2 || base > 36) throw DomainError("base must lie in [2, 36]");
  std::string digits;
  for (std::uint64_t k = 1; digits.size() < length; ++k) digits += detail::to_base(k, base);
  digits.resize(length);
  return detail::digit_sequence(digits, base);
}

// First `length` digits of the primes 2 3 5 7 11 ... concatenated in base 10.
inline SymbolSequence copeland_erdos(std::size_t length) {
  if (length < 1) throw DomainError("length must be at least 1");
  std::string digits;
  std::vector<std::uint64_t> primes;
  for (std::uint64_t k = 2; digits.size() < length; ++k) {
    bool prime = true;
    for (auto p : primes) {
      if (p * p > k) break;
      if (k % p == 0) {
        prime = false;
        break;
      }
    }
    if (!prime) continue;
    primes.push_back(k);
    digits += std::to_string(k);
  }
  digits.resize(length);
  return detail::digit_sequence(digits, 10);
}

// --- scorecard --------------------------------------------------------------

struct SequenceStats {
  std::size_t length = 0;
  std::size_t alphabet_size = 0;
  double entropy_bits = 0.0;
  double symbol_redundancy = 0.0;
  std::map<std::size_t, std::optional<double>> context_redundancy;
  std::map<std::size_t, std::optional<double>> coefficient_of_constraint;
  std::map<std::size_t, std::optional<double>> block_chi_square;  // by block length, gap 0
  std::map<std::string, std::vector<std::size_t>> gap_distributions;
  std::optional<double> median_gap;
};

struct ScorecardOptions {
  std::size_t max_lag = 2;
  std::size_t max_block = 2;
};

// Coefficients that are undefined for this input are left empty.
inline SequenceStats assess(const SymbolSequence& seq, const ScorecardOptions& opts = {}) {
  SequenceStats st;
  st.length = seq.size();
  st.alphabet_size = seq.alphabet_size();
  st.entropy_bits = entropy(seq);
  st.symbol_redundancy = symbol_redundancy(seq);
  for (std::size_t k = 1; k <= opts.max_lag; ++k) {
    try {
      st.context_redundancy[k] = context_redundancy(seq, k);
    } catch (const DomainError&) {
      st.context_redundancy[k] = std::nullopt;
    }
    try {
      st.coefficient_of_constraint[k] = coefficient_of_constraint(seq, k);
    } catch (const DomainError&) {
      st.coefficient_of_constraint[k] = std::nullopt;
    }
  }
  for (std::size_t b = 1; b <= opts.max_block; ++b) {
    try {
      st.block_chi_square[b] = block_frequency(seq, b, 0).chi_square;
    } catch (const DomainError&) {
      st.block_chi_square[b] = std::nullopt;
    }
  }
  st.gap_distributions = gap_distribution(seq);
  try {
    st.median_gap = median_gap(seq);
  } catch (const DomainError&) {
    st.median_gap = std::nullopt;
  }
  return st;
}

}  // namespace ctm::measures
