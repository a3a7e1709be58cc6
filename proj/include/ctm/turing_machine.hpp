#pragma once

// 2-symbol, n-state Turing machines in the 5-tuple convention, and a
// canonical mixed-radix numbering of every machine with a given state count.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctm {

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Move : std::uint8_t { Left = 0, Right = 1 };

// Largest state count whose machine space still fits a 64-bit index.
inline constexpr int kMaxStateCount = 6;

struct Transition {
  std::uint8_t write = 0;
  Move move = Move::Left;
  int next_state = 1;  // 1..n, or n+1 for halt

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TuringMachine {
  int state_count = 1;
  // Entry for (state q, scanned symbol b) lives at 2*(q-1) + b.
  std::vector<Transition> transitions;

  int halt_state() const { return state_count + 1; }

  const Transition& entry(int state, int symbol) const {
    return transitions[static_cast<std::size_t>(2 * (state - 1) + symbol)];
  }
  Transition& entry(int state, int symbol) {
    return transitions[static_cast<std::size_t>(2 * (state - 1) + symbol)];
  }

  friend bool operator==(const TuringMachine&, const TuringMachine&) = default;
};

struct MachineIndex {
  int n = 1;
  std::uint64_t index = 0;

  friend bool operator==(const MachineIndex&, const MachineIndex&) = default;
};

// Choices per table entry: write x direction x next state (halt included).
constexpr std::uint64_t radix(int n) { return 4u * static_cast<std::uint64_t>(n + 1); }

constexpr std::uint64_t machine_count(int n) {
  std::uint64_t total = 1;
  for (int j = 0; j < 2 * n; ++j) total *= radix(n);
  return total;
}

inline void check_state_count(int n) {
  if (n < 1 || n > kMaxStateCount)
    throw RangeError("state count " + std::to_string(n) + " outside [1, " +
                     std::to_string(kMaxStateCount) + "]");
}

// Step cutoffs beyond which no n-state machine halts (maximum shift values).
inline std::uint64_t default_cutoff(int n) {
  switch (n) {
    case 1: return 1;
    case 2: return 6;
    case 3: return 21;
    case 4: return 107;
    default:
      throw RangeError("no proven step cutoff for n = " + std::to_string(n));
  }
}

// Maximum number of 1s printed by a halting n-state machine.
inline int busy_beaver_sigma(int n) {
  switch (n) {
    case 1: return 1;
    case 2: return 4;
    case 3: return 6;
    case 4: return 13;
    default:
      throw RangeError("Sigma(" + std::to_string(n) + ") is not tabulated");
  }
}

inline void validate(const TuringMachine& tm) {
  check_state_count(tm.state_count);
  if (tm.transitions.size() != static_cast<std::size_t>(2 * tm.state_count))
    throw ValidationError("machine has " + std::to_string(tm.transitions.size()) +
                          " entries, expected " + std::to_string(2 * tm.state_count));
  for (const auto& t : tm.transitions) {
    if (t.write > 1) throw ValidationError("write symbol must be 0 or 1");
    if (t.move != Move::Left && t.move != Move::Right)
      throw ValidationError("direction must be Left or Right");
    if (t.next_state < 1 || t.next_state > tm.state_count + 1)
      throw ValidationError("next state " + std::to_string(t.next_state) + " outside [1, " +
                            std::to_string(tm.state_count + 1) + "]");
  }
}

// Digit j (least significant first) is the entry for (state j/2 + 1, symbol j%2);
// inside a digit d: write = d%2, direction = (d/2)%2, next state = d/4 + 1.
inline TuringMachine decode_machine(MachineIndex idx) {
  check_state_count(idx.n);
  if (idx.index >= machine_count(idx.n))
    throw RangeError("machine index " + std::to_string(idx.index) + " out of range for n = " +
                     std::to_string(idx.n));
  TuringMachine tm;
  tm.state_count = idx.n;
  tm.transitions.resize(static_cast<std::size_t>(2 * idx.n));
  const std::uint64_t base = radix(idx.n);
  std::uint64_t rest = idx.index;
  for (auto& t : tm.transitions) {
    const std::uint64_t d = rest % base;
    rest /= base;
    t.write = static_cast<std::uint8_t>(d % 2);
    t.move = static_cast<Move>((d / 2) % 2);
    t.next_state = static_cast<int>(d / 4) + 1;
  }
  return tm;
}

inline MachineIndex encode_machine(const TuringMachine& tm) {
  validate(tm);
  const std::uint64_t base = radix(tm.state_count);
  std::uint64_t index = 0;
  for (auto it = tm.transitions.rbegin(); it != tm.transitions.rend(); ++it) {
    const std::uint64_t d = static_cast<std::uint64_t>(it->write) +
                            2u * static_cast<std::uint64_t>(it->move) +
                            4u * static_cast<std::uint64_t>(it->next_state - 1);
    index = index * base + d;
  }
  return {tm.state_count, index};
}

// Flip every written symbol and swap the scanned-symbol columns. The result,
// started on a tape of 1s, prints the complement of what `tm` prints on 0s.
inline TuringMachine complement_machine(const TuringMachine& tm) {
  TuringMachine out = tm;
  for (int q = 1; q <= tm.state_count; ++q) {
    for (int b = 0; b <= 1; ++b) {
      Transition t = tm.entry(q, 1 - b);
      t.write = static_cast<std::uint8_t>(1 - t.write);
      out.entry(q, b) = t;
    }
  }
  return out;
}

// Swap Left and Right everywhere; the output is reversed.
inline TuringMachine mirror_machine(const TuringMachine& tm) {
  TuringMachine out = tm;
  for (auto& t : out.transitions)
    t.move = t.move == Move::Left ? Move::Right : Move::Left;
  return out;
}

// Standard "A0 A1 B0 ..." notation, e.g. "1RB 1LB 1LA 0LC 1RH 1LD 1RD 0RA".
inline TuringMachine parse_machine(const std::string& text) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '_' || c == ',' || c == '\t') {
      if (!cur.empty()) cells.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) cells.push_back(cur);
  if (cells.empty() || cells.size() % 2 != 0)
    throw ValidationError("machine text needs an even, nonzero number of entries");
  TuringMachine tm;
  tm.state_count = static_cast<int>(cells.size() / 2);
  check_state_count(tm.state_count);
  for (const auto& cell : cells) {
    if (cell.size() != 3) throw ValidationError("bad machine entry '" + cell + "'");
    Transition t;
    if (cell[0] != '0' && cell[0] != '1') throw ValidationError("bad write symbol in '" + cell + "'");
    t.write = static_cast<std::uint8_t>(cell[0] - '0');
    if (cell[1] == 'L') t.move = Move::Left;
    else if (cell[1] == 'R') t.move = Move::Right;
    else throw ValidationError("bad direction in '" + cell + "'");
    if (cell[2] == 'H' || cell[2] == 'Z')
      t.next_state = tm.state_count + 1;
    else if (cell[2] >= 'A' && cell[2] < 'A' + tm.state_count)
      t.next_state = cell[2] - 'A' + 1;
    else
      throw ValidationError("bad next state in '" + cell + "'");
    tm.transitions.push_back(t);
  }
  return tm;
}

inline std::string format_machine(const TuringMachine& tm) {
  std::string out;
  for (std::size_t i = 0; i < tm.transitions.size(); ++i) {
    const auto& t = tm.transitions[i];
    if (i) out.push_back(' ');
    out.push_back(static_cast<char>('0' + t.write));
    out.push_back(t.move == Move::Left ? 'L' : 'R');
    out.push_back(t.next_state == tm.state_count + 1 ? 'H'
                                                     : static_cast<char>('A' + t.next_state - 1));
  }
  return out;
}

}  // namespace ctm
