#pragma once

// Complexity estimates from a production distribution (coding theorem:
// K(s) ~ -log2 m(s)), and the Bayesian "was this string random?" model over
// 5-bit answers.

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctm/distribution.hpp"

namespace ctm {

// The string never appeared in the distribution. This is a resolution limit
// of the table, not a probability of zero.
struct NotObserved : std::runtime_error {
  explicit NotObserved(const std::string& s)
      : std::runtime_error("'" + s + "' was not produced by any machine in the distribution"),
        bitstring(s) {}
  std::string bitstring;
};

inline double algorithmic_probability(const std::string& s, const Distribution& d) {
  auto it = d.counts.find(s);
  if (it == d.counts.end()) throw NotObserved(s);
  return static_cast<double>(it->second) / static_cast<double>(d.halting_count);
}

// Bits; comparative only, the additive constant is unknown.
inline double estimated_complexity(const std::string& s, const Distribution& d) {
  auto it = d.counts.find(s);
  if (it == d.counts.end()) throw NotObserved(s);
  // log2(h) - log2(c) keeps full precision for tiny frequencies.
  return std::log2(static_cast<double>(d.halting_count)) - std::log2(static_cast<double>(it->second));
}

struct ComplexityTable {
  Distribution source;  // counts are kept so the table can be re-derived
  std::vector<std::pair<std::string, double>> entries;  // ascending K, ties lexicographic
};

inline ComplexityTable make_complexity_table(const Distribution& d) {
  ComplexityTable t;
  t.source = d;
  for (const auto& [s, c] : sorted_rows(d)) t.entries.emplace_back(s, estimated_complexity(s, d));
  return t;
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string serialize_complexity_table(const ComplexityTable& t) {
  std::string body;
  for (const auto& [s, k] : t.entries) body += s + "\t" + format_fixed(k, 6) + "\n";
  std::string out = "# ctm-complexity\n";
  out += "# format_version=" + std::to_string(kDistributionFormatVersion) + "\n";
  for (const auto& [k, v] : provenance(t.source)) out += "# " + k + "=" + v + "\n";
  out += "# checksum=crc32:" + crc_hex(body) + "\n";
  return out + body;
}

// --- 5-bit answer classes ---------------------------------------------------

struct AggregateClass {
  std::string representative;        // starts with '0'
  std::array<std::string, 2> members;  // {representative, complement}

  friend bool operator==(const AggregateClass&, const AggregateClass&) = default;
};

inline constexpr int kAnswerLength = 5;

// The 16 complement classes of 5-bit strings, representatives 00000 .. 01111.
inline std::vector<AggregateClass> make_classes() {
  std::vector<AggregateClass> out;
  for (int v = 0; v < 16; ++v) {
    std::string rep(kAnswerLength, '0');
    for (int b = 0; b < kAnswerLength; ++b)
      rep[static_cast<std::size_t>(kAnswerLength - 1 - b)] = static_cast<char>('0' + ((v >> b) & 1));
    out.push_back({rep, {rep, complement(rep)}});
  }
  return out;
}

inline AggregateClass class_of(const std::string& s) {
  if (s.size() != kAnswerLength || !is_bitstring(s))
    throw ValidationError("'" + s + "' is not a 5-bit string");
  const std::string rep = s[0] == '0' ? s : complement(s);
  return {rep, {rep, complement(rep)}};
}

// How P(s|M) is read off the distribution.
enum class MachineLikelihood : std::uint8_t {
  // Restrict to outputs of length 5 and renormalize over them.
  LengthRenormalized,
  // Use the raw production frequency m(s) over all lengths.
  AllLengths,
};

struct RandomnessModel {
  double prior_random = 0.5;
  double prior_machine = 0.5;
  std::map<std::string, double> likelihood_random;
  std::map<std::string, double> likelihood_machine;
};

inline std::vector<std::string> all_bitstrings(int length) {
  std::vector<std::string> out;
  for (unsigned v = 0; v < (1u << length); ++v) {
    std::string s(static_cast<std::size_t>(length), '0');
    for (int b = 0; b < length; ++b)
      s[static_cast<std::size_t>(length - 1 - b)] = static_cast<char>('0' + ((v >> b) & 1u));
    out.push_back(s);
  }
  return out;
}

// Strings of length 5 that the distribution never produced are left out of
// likelihood_machine; p_random then reports them as NotObserved.
inline RandomnessModel make_randomness_model(const Distribution& d, double prior_random = 0.5,
                                             MachineLikelihood mode = MachineLikelihood::LengthRenormalized) {
  if (!(prior_random > 0.0 && prior_random < 1.0))
    throw ValidationError("prior P(R) must lie strictly between 0 and 1");
  RandomnessModel m;
  m.prior_random = prior_random;
  m.prior_machine = 1.0 - prior_random;
  const auto strings = all_bitstrings(kAnswerLength);
  std::uint64_t length_total = 0;
  for (const auto& s : strings) {
    m.likelihood_random[s] = 1.0 / static_cast<double>(strings.size());
    auto it = d.counts.find(s);
    if (it != d.counts.end()) length_total += it->second;
  }
  for (const auto& s : strings) {
    auto it = d.counts.find(s);
    if (it == d.counts.end()) continue;
    const double denom = mode == MachineLikelihood::LengthRenormalized
                             ? static_cast<double>(length_total)
                             : static_cast<double>(d.halting_count);
    m.likelihood_machine[s] = static_cast<double>(it->second) / denom;
  }
  return m;
}

// Model whose machine likelihoods are given directly (tests, fixtures).
inline RandomnessModel make_randomness_model(const std::map<std::string, double>& machine_likelihood,
                                             double prior_random = 0.5) {
  RandomnessModel m;
  m.prior_random = prior_random;
  m.prior_machine = 1.0 - prior_random;
  for (const auto& s : all_bitstrings(kAnswerLength)) m.likelihood_random[s] = 1.0 / 32.0;
  m.likelihood_machine = machine_likelihood;
  return m;
}

inline double class_likelihood(const AggregateClass& c, const std::map<std::string, double>& lik) {
  double sum = 0.0;
  for (const auto& s : c.members) {
    auto it = lik.find(s);
    if (it == lik.end()) throw NotObserved(s);
    sum += it->second;
  }
  return sum;
}

// Posterior P(R | c) by Bayes' rule at class level.
inline double p_random(const AggregateClass& c, const RandomnessModel& model) {
  const double r = class_likelihood(c, model.likelihood_random) * model.prior_random;
  const double m = class_likelihood(c, model.likelihood_machine) * model.prior_machine;
  return r / (r + m);
}

}  // namespace ctm
