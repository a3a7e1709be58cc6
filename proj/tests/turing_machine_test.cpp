#include <gtest/gtest.h>

#include <random>

#include "ctm/turing_machine.hpp"

namespace ctm {
namespace {

TEST(MachineCount, MatchesClosedForm) {
  EXPECT_EQ(machine_count(1), 64u);                 // 8^2
  EXPECT_EQ(machine_count(2), 20736u);              // 12^4
  EXPECT_EQ(machine_count(3), 16777216u);           // 16^6
  EXPECT_EQ(machine_count(4), 25600000000u);        // 20^8
}

TEST(DecodeMachine, IndexZeroNeverHalts) {
  const TuringMachine tm = decode_machine({2, 0});
  ASSERT_EQ(tm.transitions.size(), 4u);
  for (const auto& t : tm.transitions) EXPECT_EQ(t, (Transition{0, Move::Left, 1}));
}

TEST(DecodeMachine, MaximalIndexAlwaysHalts) {
  const TuringMachine tm = decode_machine({2, 20735});
  for (const auto& t : tm.transitions) EXPECT_EQ(t, (Transition{1, Move::Right, 3}));
}

TEST(DecodeMachine, DigitOrderIsStateThenSymbol) {
  // Digit 1 (state 1, symbol 1) = 6 -> write 0, Right, state 2.
  const TuringMachine tm = decode_machine({2, 6 * 12});
  EXPECT_EQ(tm.entry(1, 0), (Transition{0, Move::Left, 1}));
  EXPECT_EQ(tm.entry(1, 1), (Transition{0, Move::Right, 2}));
  // Digit 2 (state 2, symbol 0) = 9 -> write 1, Left, state 3 (halt).
  const TuringMachine tm2 = decode_machine({2, 9 * 144});
  EXPECT_EQ(tm2.entry(2, 0), (Transition{1, Move::Left, 3}));
}

TEST(DecodeMachine, RejectsOutOfRange) {
  EXPECT_THROW(decode_machine({2, 20736}), RangeError);
  EXPECT_THROW(decode_machine({0, 0}), RangeError);
  EXPECT_THROW(decode_machine({kMaxStateCount + 1, 0}), RangeError);
}

TEST(EncodeMachine, InvertsDecodeExamples) {
  EXPECT_EQ(encode_machine(decode_machine({2, 0})), (MachineIndex{2, 0}));
  EXPECT_EQ(encode_machine(decode_machine({2, 20735})), (MachineIndex{2, 20735}));
}

TEST(EncodeMachine, RoundTripsRandomIndices) {
  std::mt19937_64 rng(7);
  for (int n : {2, 3, 4}) {
    std::uniform_int_distribution<std::uint64_t> pick(0, machine_count(n) - 1);
    for (int i = 0; i < 1000; ++i) {
      const MachineIndex idx{n, pick(rng)};
      ASSERT_EQ(encode_machine(decode_machine(idx)), idx);
    }
  }
}

TEST(EncodeMachine, BijectiveOnSmallSpaces) {
  for (int n : {1, 2}) {
    for (std::uint64_t i = 0; i < machine_count(n); ++i) ASSERT_EQ(encode_machine(decode_machine({n, i})).index, i);
  }
}

TEST(EncodeMachine, MonotoneInDigitOrder) {
  // Raising only the most significant digit raises the index past every
  // machine that shares the lower digits.
  TuringMachine a = decode_machine({3, 12345});
  TuringMachine b = a;
  ASSERT_EQ(a.entry(3, 1), (Transition{0, Move::Left, 1}));
  b.entry(3, 1) = Transition{1, Move::Left, 1};
  EXPECT_LT(encode_machine(a).index, encode_machine(b).index);

  std::uint64_t prev = 0;
  for (std::uint64_t i = 1; i < 5000; ++i) {
    const auto idx = encode_machine(decode_machine({3, i})).index;
    ASSERT_GT(idx, prev);
    prev = idx;
  }
}

TEST(EncodeMachine, ThreeStateIndicesFitSixteenToTheSixth) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    TuringMachine tm;
    tm.state_count = 3;
    for (int j = 0; j < 6; ++j)
      tm.transitions.push_back({static_cast<std::uint8_t>(rng() % 2), static_cast<Move>(rng() % 2),
                                static_cast<int>(rng() % 4) + 1});
    ASSERT_LT(encode_machine(tm).index, 16777216u);
  }
}

TEST(EncodeMachine, RejectsMalformedTables) {
  TuringMachine tm = decode_machine({2, 100});
  tm.transitions.pop_back();
  EXPECT_THROW(encode_machine(tm), ValidationError);

  tm = decode_machine({2, 100});
  tm.entry(1, 0).next_state = 4;
  EXPECT_THROW(encode_machine(tm), ValidationError);

  tm = decode_machine({2, 100});
  tm.entry(2, 1).write = 2;
  EXPECT_THROW(encode_machine(tm), ValidationError);
}

TEST(MachineText, ParsesAndFormatsChampion) {
  const std::string text = "1RB 1LB 1LA 0LC 1RH 1LD 1RD 0RA";
  const TuringMachine tm = parse_machine(text);
  EXPECT_EQ(tm.state_count, 4);
  EXPECT_EQ(tm.entry(3, 0), (Transition{1, Move::Right, 5}));
  EXPECT_EQ(format_machine(tm), text);
  EXPECT_THROW(parse_machine("1RB 1LX"), ValidationError);
  EXPECT_THROW(parse_machine("1RB"), ValidationError);
}

TEST(SymmetryMaps, AreInvolutions) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> pick(0, machine_count(3) - 1);
  for (int i = 0; i < 200; ++i) {
    const TuringMachine tm = decode_machine({3, pick(rng)});
    EXPECT_EQ(complement_machine(complement_machine(tm)), tm);
    EXPECT_EQ(mirror_machine(mirror_machine(tm)), tm);
  }
}

}  // namespace
}  // namespace ctm
