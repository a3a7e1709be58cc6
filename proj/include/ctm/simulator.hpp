#pragma once

// Simulation of a TuringMachine from a blank tape.
//
// `run` is the reference path: a sparse tape and one `step` at a time, close to
// the textbook semantics. `FastRunner` is the enumeration path: a flat tape
// buffer reused across machines, plus two proofs of non-halting that let it
// stop early on machines that would otherwise burn the whole step budget. Both
// must agree on every machine; the unit tests check this exhaustively for n=2
// and on random samples for n=3,4.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctm/turing_machine.hpp"

namespace ctm {

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Which cells make up the output of a halting run.
enum class OutputConvention : std::uint8_t {
  // Cells the head occupied before the halting transition moved it.
  BeforeFinalMove,
  // Every cell the head occupied, including the one reached by the halting move.
  ThroughFinalMove,
};

inline const char* to_string(OutputConvention c) {
  return c == OutputConvention::BeforeFinalMove ? "before-final-move" : "through-final-move";
}

inline OutputConvention parse_output_convention(const std::string& s) {
  if (s == "before-final-move") return OutputConvention::BeforeFinalMove;
  if (s == "through-final-move") return OutputConvention::ThroughFinalMove;
  throw ValidationError("unknown output convention '" + s + "'");
}

struct Configuration {
  std::map<std::int64_t, std::uint8_t> tape;  // absent cells hold `blank`
  std::uint8_t blank = 0;
  std::int64_t head = 0;
  int state = 1;
  std::uint64_t steps = 0;
  std::int64_t visited_min = 0;
  std::int64_t visited_max = 0;

  std::uint8_t read(std::int64_t pos) const {
    auto it = tape.find(pos);
    return it == tape.end() ? blank : it->second;
  }
};

inline Configuration initial_configuration(std::uint8_t blank = 0) {
  Configuration cfg;
  cfg.blank = blank;
  return cfg;
}

inline Configuration step(Configuration cfg, const TuringMachine& tm) {
  if (cfg.state < 1 || cfg.state > tm.state_count)
    throw ContractViolation("step called on a halted configuration (state " +
                            std::to_string(cfg.state) + ")");
  const Transition& t = tm.entry(cfg.state, cfg.read(cfg.head));
  cfg.tape[cfg.head] = t.write;
  cfg.head += t.move == Move::Right ? 1 : -1;
  cfg.state = t.next_state;
  ++cfg.steps;
  cfg.visited_min = std::min(cfg.visited_min, cfg.head);
  cfg.visited_max = std::max(cfg.visited_max, cfg.head);
  return cfg;
}

enum class Outcome : std::uint8_t { Halted, Cutoff };

struct RunResult {
  Outcome outcome = Outcome::Cutoff;
  std::string output;  // '0'/'1' characters, empty unless Halted
  std::uint64_t steps = 0;
  std::uint64_t ones_count = 0;

  bool halted() const { return outcome == Outcome::Halted; }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct RunOptions {
  std::uint64_t max_steps = 1;
  OutputConvention convention = OutputConvention::BeforeFinalMove;
  std::uint8_t blank = 0;
};

inline RunResult run(const TuringMachine& tm, const RunOptions& opts) {
  if (opts.max_steps < 1) throw ContractViolation("max_steps must be at least 1");
  Configuration cfg = initial_configuration(opts.blank);
  while (cfg.steps < opts.max_steps) {
    const std::int64_t lo = cfg.visited_min;
    const std::int64_t hi = cfg.visited_max;
    cfg = step(std::move(cfg), tm);
    if (cfg.state == tm.halt_state()) {
      const bool through = opts.convention == OutputConvention::ThroughFinalMove;
      RunResult r{Outcome::Halted, {}, cfg.steps, 0};
      for (std::int64_t p = through ? cfg.visited_min : lo; p <= (through ? cfg.visited_max : hi); ++p)
        r.output.push_back(static_cast<char>('0' + cfg.read(p)));
      r.ones_count = static_cast<std::uint64_t>(std::count(r.output.begin(), r.output.end(), '1'));
      return r;
    }
  }
  return {Outcome::Cutoff, {}, cfg.steps, 0};
}

inline RunResult run(const TuringMachine& tm, std::uint64_t max_steps,
                     OutputConvention convention = OutputConvention::BeforeFinalMove) {
  return run(tm, RunOptions{max_steps, convention, 0});
}

// Reusable simulator for bulk enumeration. Not thread-safe; give each worker
// its own instance.
class FastRunner {
 public:
  FastRunner(int n, std::uint64_t max_steps, OutputConvention convention, std::uint8_t blank = 0)
      : n_(n), max_steps_(max_steps), convention_(convention), blank_(blank),
        tape_(static_cast<std::size_t>(2 * max_steps + 3), blank),
        origin_(static_cast<std::int64_t>(max_steps + 1)) {
    check_state_count(n);
    if (max_steps < 1) throw ContractViolation("max_steps must be at least 1");
  }

  int state_count() const { return n_; }
  std::uint64_t max_steps() const { return max_steps_; }
  OutputConvention convention() const { return convention_; }

  // Table digits in decode_machine order; digit j = entry (j/2 + 1, j%2).
  // Returns true and fills `output` when the machine halts.
  bool run_digits(const std::uint8_t* digits, std::string& output) {
    const int n = n_;
    // Packed entry: bit0 = write, bit1 = move right, bits 2.. = next state (0-based, n = halt).
    std::array<std::uint8_t, 2 * kMaxStateCount> table{};
    bool any_halt = false;
    for (int j = 0; j < 2 * n; ++j) {
      table[j] = digits[j];
      any_halt |= (digits[j] >> 2) == n;
    }
    if (!any_halt || !halt_reachable(table)) return false;

    // escapes[q][d]: a run sitting on fresh tape that extends forever in
    // direction d, in state q, never halts.
    std::array<std::array<bool, 2>, kMaxStateCount> escapes{};
    for (int q = 0; q < n; ++q)
      for (int d = 0; d < 2; ++d) escapes[q][d] = escapes_forever(table, q, d);

    std::uint8_t* tape = tape_.data();
    std::int64_t head = origin_;
    std::int64_t lo = head;
    std::int64_t hi = head;
    int state = 0;
    bool halted = false;
    std::uint64_t steps = 0;
    std::int64_t out_lo = 0;
    std::int64_t out_hi = 0;
    while (steps < max_steps_) {
      const std::uint8_t e = table[2 * state + tape[head]];
      tape[head] = e & 1u;
      head += (e & 2u) ? 1 : -1;
      state = e >> 2;
      ++steps;
      if (state == n) {
        halted = true;
        if (convention_ == OutputConvention::BeforeFinalMove) {
          out_lo = lo;
          out_hi = hi;
        } else {
          out_lo = std::min(lo, head);
          out_hi = std::max(hi, head);
        }
        break;
      }
      if (head < lo) {
        lo = head;
        if (escapes[state][0]) break;
      } else if (head > hi) {
        hi = head;
        if (escapes[state][1]) break;
      }
    }
    if (halted) {
      output.resize(static_cast<std::size_t>(out_hi - out_lo + 1));
      for (std::int64_t p = out_lo; p <= out_hi; ++p)
        output[static_cast<std::size_t>(p - out_lo)] = static_cast<char>('0' + tape[p]);
    }
    // Restore the blank tape for the next machine.
    std::fill(tape + std::min(lo, head), tape + std::max(hi, head) + 1, blank_);
    return halted;
  }

  static void machine_digits(const TuringMachine& tm, std::uint8_t* digits) {
    for (std::size_t j = 0; j < tm.transitions.size(); ++j) {
      const auto& t = tm.transitions[j];
      digits[j] = static_cast<std::uint8_t>(t.write + 2 * static_cast<int>(t.move) +
                                            4 * (t.next_state - 1));
    }
  }

  bool run_machine(const TuringMachine& tm, std::string& output) {
    std::array<std::uint8_t, 2 * kMaxStateCount> digits{};
    machine_digits(tm, digits.data());
    return run_digits(digits.data(), output);
  }

 private:
  bool halt_reachable(const std::array<std::uint8_t, 2 * kMaxStateCount>& table) const {
    unsigned seen = 1u;  // state 0
    unsigned frontier = 1u;
    while (frontier) {
      unsigned next = 0;
      for (int q = 0; q < n_; ++q) {
        if (!(frontier & (1u << q))) continue;
        for (int b = 0; b < 2; ++b) {
          const int to = table[2 * q + b] >> 2;
          if (to == n_) return true;
          if (!(seen & (1u << to))) next |= 1u << to;
        }
      }
      seen |= next;
      frontier = next;
    }
    return false;
  }

  bool escapes_forever(const std::array<std::uint8_t, 2 * kMaxStateCount>& table, int q,
                       int dir) const {
    unsigned seen = 0;
    for (;;) {
      if (seen & (1u << q)) return true;
      seen |= 1u << q;
      const std::uint8_t e = table[2 * q + blank_];
      if (((e >> 1) & 1u) != static_cast<unsigned>(dir)) return false;
      q = e >> 2;
      if (q == n_) return false;
    }
  }

  int n_;
  std::uint64_t max_steps_;
  OutputConvention convention_;
  std::uint8_t blank_;
  std::vector<std::uint8_t> tape_;
  std::int64_t origin_;
};

}  // namespace ctm
