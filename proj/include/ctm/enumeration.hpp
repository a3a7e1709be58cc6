#pragma once

// Building D(n) by running machines in bulk: every machine of a given size
// (exhaustive) or a seeded uniform sample of them (sampled).
//
// Work is cut into blocks of kBlockSize machines (or draws). A shard owns a
// contiguous run of blocks and is the unit of resume; each block is simulated
// into a private table and folded into the shared result under a mutex, so
// the final counts never depend on thread count, shard count, or
// interruption points.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ctm/distribution.hpp"
#include "ctm/simulator.hpp"
#include "ctm/turing_machine.hpp"

namespace ctm {

inline constexpr std::uint64_t kBlockSize = std::uint64_t{1} << 20;
inline constexpr int kMaxProvenStateCount = 4;

struct EnumerationRefused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Progress {
  std::uint64_t done = 0;   // machines simulated, including resumed work
  std::uint64_t total = 0;
  double elapsed_seconds = 0;  // this session only
  std::uint64_t done_this_session = 0;
};

struct EnumerationJob {
  int n = 2;
  std::uint64_t cutoff = 0;  // 0 selects default_cutoff(n)
  Mode mode = Mode::Exhaustive;
  std::uint64_t sample_size = 0;
  std::uint64_t seed = 0;
  unsigned shards = 1;
  unsigned threads = 0;  // 0 = one per hardware thread, capped by shards
  OutputConvention convention = OutputConvention::BeforeFinalMove;
  TapeBlanks blanks = TapeBlanks::Both;
  bool allow_unsafe = false;  // permit n > 4, where no proven cutoff exists

  std::string checkpoint_path;  // empty = no checkpointing
  double checkpoint_interval_seconds = 30.0;
  std::uint64_t stop_after_blocks = 0;  // 0 = run to completion
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const Progress&)> on_progress;
};

struct ShardCursor {
  std::uint64_t next = 0;
  std::uint64_t end = 0;
  friend bool operator==(const ShardCursor&, const ShardCursor&) = default;
};

struct Checkpoint {
  Distribution partial;
  std::uint64_t target = 0;  // machines (exhaustive) or draws (sampled)
  std::uint64_t block_size = kBlockSize;
  std::vector<ShardCursor> shards;
};

inline std::uint64_t resolve_cutoff(const EnumerationJob& job) {
  check_state_count(job.n);
  if (job.n > kMaxProvenStateCount && !job.allow_unsafe)
    throw EnumerationRefused("n = " + std::to_string(job.n) +
                             " has no proven halting cutoff; pass the unsafe override to run anyway");
  if (job.n > kMaxProvenStateCount) {
    if (job.cutoff == 0) throw EnumerationRefused("n > 4 requires an explicit cutoff");
    return job.cutoff;
  }
  const std::uint64_t def = default_cutoff(job.n);
  if (job.cutoff != 0 && job.cutoff < def)
    throw ValidationError("cutoff " + std::to_string(job.cutoff) + " is below the proven bound " +
                          std::to_string(def) + " for n = " + std::to_string(job.n));
  return job.cutoff == 0 ? def : job.cutoff;
}

// --- checkpoint files -------------------------------------------------------

inline std::string serialize_checkpoint(const Checkpoint& cp) {
  std::vector<std::string> extra;
  extra.push_back("target=" + std::to_string(cp.target));
  extra.push_back("block_size=" + std::to_string(cp.block_size));
  for (std::size_t i = 0; i < cp.shards.size(); ++i)
    extra.push_back("shard=" + std::to_string(i) + ":" + std::to_string(cp.shards[i].next) + "-" +
                    std::to_string(cp.shards[i].end));
  std::string text = serialize_distribution(cp.partial, extra);
  text.replace(0, std::string("# ctm-distribution").size(), "# ctm-checkpoint");
  return text;
}

inline void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  write_file_atomically(path, serialize_checkpoint(cp));
}

inline Checkpoint load_checkpoint(const std::string& path) {
  const auto pf = detail::read_tagged_file(path, "ctm-checkpoint", {"shard"});
  Checkpoint cp;
  cp.partial = detail::parse_distribution(pf, path);
  cp.target = detail::parse_u64(detail::require(pf, path, "target"), path,
                                detail::line_of(pf, "target"), "target");
  cp.block_size = detail::parse_u64(detail::require(pf, path, "block_size"), path,
                                    detail::line_of(pf, "block_size"), "block_size");
  for (const auto& [kv, line] : pf.repeated) {
    const std::string v = kv.substr(kv.find('=') + 1);
    const auto colon = v.find(':');
    const auto dash = v.find('-');
    if (colon == std::string::npos || dash == std::string::npos || dash < colon)
      throw LoadError(path, line, "bad shard line '" + kv + "'");
    const auto idx = detail::parse_u64(v.substr(0, colon), path, line, "shard index");
    if (idx != cp.shards.size()) throw LoadError(path, line, "shard lines out of order");
    ShardCursor c{detail::parse_u64(v.substr(colon + 1, dash - colon - 1), path, line, "shard next"),
                  detail::parse_u64(v.substr(dash + 1), path, line, "shard end")};
    if (c.next > c.end || c.end > cp.target) throw LoadError(path, line, "shard cursor out of range");
    cp.shards.push_back(c);
  }
  if (cp.shards.empty()) throw LoadError(path, 0, "checkpoint has no shard lines");
  return cp;
}

// --- workers ----------------------------------------------------------------

namespace detail {

using CountTable = std::unordered_map<std::string, std::uint64_t>;

// Mixed-radix odometer over machine indices, least significant digit first.
inline void index_digits(int n, std::uint64_t index, std::uint8_t* digits) {
  const std::uint64_t base = radix(n);
  for (int j = 0; j < 2 * n; ++j) {
    digits[j] = static_cast<std::uint8_t>(index % base);
    index /= base;
  }
}

inline void increment_digits(int n, std::uint8_t* digits) {
  const auto base = static_cast<std::uint8_t>(radix(n));
  for (int j = 0; j < 2 * n; ++j) {
    if (++digits[j] < base) return;
    digits[j] = 0;
  }
}

inline std::mt19937_64 block_generator(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

// Simulates units [begin, end) into `table`.
inline void simulate_block(FastRunner& runner, Mode mode, std::uint64_t seed, std::uint64_t begin,
                           std::uint64_t end, CountTable& table) {
  const int n = runner.state_count();
  std::array<std::uint8_t, 2 * kMaxStateCount> digits{};
  std::string output;
  if (mode == Mode::Exhaustive) {
    index_digits(n, begin, digits.data());
    for (std::uint64_t i = begin; i < end; ++i) {
      if (runner.run_digits(digits.data(), output)) ++table[output];
      increment_digits(n, digits.data());
    }
    return;
  }
  const std::uint64_t block = begin / kBlockSize;
  auto gen = block_generator(seed, block);
  std::uniform_int_distribution<std::uint64_t> pick(0, machine_count(n) - 1);
  // Draws before `begin` inside this block are replayed so that a block is
  // always a fixed function of (seed, block).
  for (std::uint64_t i = block * kBlockSize; i < begin; ++i) pick(gen);
  for (std::uint64_t i = begin; i < end; ++i) {
    index_digits(n, pick(gen), digits.data());
    if (runner.run_digits(digits.data(), output)) ++table[output];
  }
}

inline std::vector<ShardCursor> initial_shards(std::uint64_t target, unsigned shard_count) {
  const std::uint64_t blocks = (target + kBlockSize - 1) / kBlockSize;
  const std::uint64_t s = std::max<std::uint64_t>(1, shard_count);
  std::vector<ShardCursor> out;
  for (std::uint64_t i = 0; i < s; ++i) {
    const std::uint64_t b0 = blocks * i / s;
    const std::uint64_t b1 = blocks * (i + 1) / s;
    out.push_back({std::min(target, b0 * kBlockSize), std::min(target, b1 * kBlockSize)});
  }
  return out;
}

inline void check_resumable(const Checkpoint& cp, const Distribution& fresh, std::uint64_t target,
                            const std::string& path) {
  const Distribution& p = cp.partial;
  const bool same = p.n == fresh.n && p.mode == fresh.mode && p.cutoff == fresh.cutoff &&
                    p.convention == fresh.convention && p.blanks == fresh.blanks &&
                    cp.target == target && cp.block_size == kBlockSize &&
                    (p.mode == Mode::Exhaustive || p.seeds == fresh.seeds);
  if (!same)
    throw LoadError(path, 0, "checkpoint was written for a different job; remove it or change --checkpoint");
}

}  // namespace detail

// Runs `job`. Returns the finished distribution, or nullopt when the run was
// stopped early (cancel flag or stop_after_blocks) after writing a checkpoint.
inline std::optional<Distribution> run_enumeration(const EnumerationJob& job) {
  const std::uint64_t cutoff = resolve_cutoff(job);
  if (job.mode == Mode::Sampled && job.sample_size < 1)
    throw ValidationError("sample_size must be at least 1");

  const std::uint64_t target = job.mode == Mode::Exhaustive ? machine_count(job.n) : job.sample_size;
  Distribution fresh = empty_distribution(job.n, job.mode, cutoff, job.convention, job.blanks);
  if (job.mode == Mode::Sampled) fresh.seeds = {job.seed};

  Checkpoint state;
  const bool checkpointing = !job.checkpoint_path.empty();
  if (checkpointing && std::filesystem::exists(job.checkpoint_path)) {
    state = load_checkpoint(job.checkpoint_path);
    detail::check_resumable(state, fresh, target, job.checkpoint_path);
  } else {
    state.partial = fresh;
    state.target = target;
    state.shards = detail::initial_shards(target, job.shards);
  }

  std::uint64_t already_done = 0;
  for (const auto& s : state.shards) already_done += s.end - s.next;
  already_done = target - already_done;

  std::mutex mu;
  std::atomic<std::uint64_t> blocks_this_session{0};
  std::atomic<bool> stopped{false};
  std::atomic<std::size_t> next_shard{0};
  std::uint64_t done_this_session = 0;
  const auto start = std::chrono::steady_clock::now();
  auto last_checkpoint = start;

  const auto should_stop = [&] {
    if (job.cancel && job.cancel->load()) return true;
    return job.stop_after_blocks != 0 && blocks_this_session.load() >= job.stop_after_blocks;
  };

  const auto worker = [&] {
    FastRunner runner(job.n, cutoff, job.convention);
    detail::CountTable table;
    for (;;) {
      const std::size_t si = next_shard.fetch_add(1);
      if (si >= state.shards.size()) return;
      for (;;) {
        std::uint64_t begin;
        std::uint64_t end;
        {
          std::lock_guard lock(mu);
          const ShardCursor& cur = state.shards[si];
          if (cur.next >= cur.end) break;
          if (should_stop()) {
            stopped = true;
            return;
          }
          blocks_this_session.fetch_add(1);
          begin = cur.next;
          end = std::min(cur.end, (begin / kBlockSize + 1) * kBlockSize);
        }
        table.clear();
        detail::simulate_block(runner, job.mode, job.seed, begin, end, table);

        std::lock_guard lock(mu);
        Distribution& acc = state.partial;
        for (const auto& [s, c] : table) acc.add(s, c);
        acc.total_machines += end - begin;
        if (job.mode == Mode::Exhaustive) {
          acc.ranges.push_back({begin, end});
          acc.ranges = detail::coalesce(std::move(acc.ranges));
        } else {
          acc.sample_size += end - begin;
        }
        state.shards[si].next = end;
        done_this_session += end - begin;
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - start).count();
        if (job.on_progress)
          job.on_progress({already_done + done_this_session, target, elapsed, done_this_session});
        if (checkpointing &&
            std::chrono::duration<double>(now - last_checkpoint).count() >= job.checkpoint_interval_seconds) {
          save_checkpoint(state, job.checkpoint_path);
          last_checkpoint = now;
        }
      }
    }
  };

  unsigned threads = job.threads != 0 ? job.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(state.shards.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  bool finished = true;
  for (const auto& s : state.shards) finished &= s.next == s.end;
  if (!finished) {
    if (checkpointing) save_checkpoint(state, job.checkpoint_path);
    return std::nullopt;
  }
  if (checkpointing && std::filesystem::exists(job.checkpoint_path))
    std::filesystem::remove(job.checkpoint_path);
  state.partial.check_invariants();
  return state.partial;
}

inline Distribution enumerate_exhaustive(int n, std::uint64_t cutoff = 0, unsigned shard_count = 1,
                                         OutputConvention convention = OutputConvention::BeforeFinalMove,
                                         TapeBlanks blanks = TapeBlanks::Both) {
  EnumerationJob job;
  job.n = n;
  job.cutoff = cutoff;
  job.shards = shard_count;
  job.convention = convention;
  job.blanks = blanks;
  return *run_enumeration(job);
}

// Exhaustive counts over one index range; partial results combine with merge().
inline Distribution enumerate_range(int n, std::uint64_t cutoff, IndexRange range,
                                    OutputConvention convention = OutputConvention::BeforeFinalMove,
                                    TapeBlanks blanks = TapeBlanks::Both) {
  EnumerationJob job;
  job.n = n;
  job.cutoff = cutoff;
  cutoff = resolve_cutoff(job);
  if (range.end > machine_count(n) || range.begin > range.end)
    throw RangeError("index range outside the machine space");
  Distribution d = empty_distribution(n, Mode::Exhaustive, cutoff, convention, blanks);
  FastRunner runner(n, cutoff, convention);
  detail::CountTable table;
  for (std::uint64_t b = range.begin; b < range.end;) {
    const std::uint64_t e = std::min(range.end, b + kBlockSize);
    detail::simulate_block(runner, Mode::Exhaustive, 0, b, e, table);
    b = e;
  }
  for (const auto& [s, c] : table) d.add(s, c);
  d.total_machines = range.size();
  if (range.size() > 0) d.ranges = {range};
  return d;
}

inline Distribution enumerate_sampled(int n, std::uint64_t cutoff, std::uint64_t sample_size,
                                      std::uint64_t seed, unsigned shard_count = 1,
                                      OutputConvention convention = OutputConvention::BeforeFinalMove,
                                      TapeBlanks blanks = TapeBlanks::Both) {
  EnumerationJob job;
  job.n = n;
  job.cutoff = cutoff;
  job.mode = Mode::Sampled;
  job.sample_size = sample_size;
  job.seed = seed;
  job.shards = shard_count;
  job.convention = convention;
  job.blanks = blanks;
  return *run_enumeration(job);
}

}  // namespace ctm
