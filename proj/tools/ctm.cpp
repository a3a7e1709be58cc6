// ctm: command-line front end.
//
// Exit codes: 0 success, 1 data errors, 2 usage, 3 I/O, 4 refused
// enumeration, 5 analysis failure, 130 interrupted (checkpoint saved).

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ctm/ctm.hpp"

#ifndef CTM_DATA_DIR
#define CTM_DATA_DIR "data"
#endif

namespace {

enum Exit : int {
  kOk = 0,
  kDataError = 1,
  kUsage = 2,
  kIo = 3,
  kRefused = 4,
  kAnalysis = 5,
  kInterrupted = 130,
};

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel = true; }

std::string fixed(double v, int digits) { return ctm::format_fixed(v, digits); }

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_manifest(const std::string& out_path, const nlohmann::json& manifest) {
  std::ofstream f(out_path + ".manifest.json");
  if (!f) throw ctm::IoError("cannot write manifest next to '" + out_path + "'");
  f << manifest.dump(2) << "\n";
}

// --- enumerate ----------------------------------------------------------------

struct EnumerateArgs {
  int n = 0;
  std::uint64_t cutoff = 0;
  std::string mode = "exhaustive";
  std::uint64_t sample_size = 0;
  std::uint64_t seed = 0;
  unsigned shards = 0;
  unsigned threads = 0;
  std::string out;
  std::string checkpoint;
  double checkpoint_interval = 30.0;
  std::uint64_t stop_after_blocks = 0;
  std::string convention = "before-final-move";
  std::string blanks = "both";
  bool allow_unsafe = false;
  bool quiet = false;
};

int cmd_enumerate(const EnumerateArgs& a) {
  ctm::EnumerationJob job;
  job.n = a.n;
  job.cutoff = a.cutoff;
  job.mode = a.mode == "sampled" ? ctm::Mode::Sampled : ctm::Mode::Exhaustive;
  job.sample_size = a.sample_size;
  job.seed = a.seed;
  job.threads = a.threads;
  job.shards = a.shards != 0 ? a.shards : std::max(1u, std::thread::hardware_concurrency());
  job.convention = ctm::parse_output_convention(a.convention);
  job.blanks = a.blanks == "zero" ? ctm::TapeBlanks::Zero : ctm::TapeBlanks::Both;
  job.allow_unsafe = a.allow_unsafe;
  job.checkpoint_path = a.checkpoint;
  job.checkpoint_interval_seconds = a.checkpoint_interval;
  job.stop_after_blocks = a.stop_after_blocks;
  job.cancel = &g_cancel;
  if (job.mode == ctm::Mode::Sampled && a.sample_size == 0) {
    std::cerr << "error: --mode sampled requires --sample-size\n";
    return kUsage;
  }

  auto last_report = std::chrono::steady_clock::now();
  if (!a.quiet) {
    job.on_progress = [&](const ctm::Progress& p) {
      const auto now = std::chrono::steady_clock::now();
      if (p.done != p.total && now - last_report < std::chrono::seconds(1)) return;
      last_report = now;
      const double rate = p.elapsed_seconds > 0 ? static_cast<double>(p.done_this_session) / p.elapsed_seconds : 0.0;
      const double eta = rate > 0 ? static_cast<double>(p.total - p.done) / rate : 0.0;
      std::cerr << "\r" << p.done << "/" << p.total << " machines  " << fixed(rate / 1e6, 2) << " M/s  ETA "
                << fixed(eta, 0) << " s   " << std::flush;
    };
  }

  std::signal(SIGINT, on_sigint);
  std::optional<ctm::Distribution> d;
  try {
    d = ctm::run_enumeration(job);
  } catch (const ctm::EnumerationRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  }
  if (!a.quiet) std::cerr << "\n";
  if (!d) {
    std::cerr << "stopped early; checkpoint saved to " << a.checkpoint << " (rerun to resume)\n";
    return kInterrupted;
  }
  ctm::save_distribution(*d, a.out);

  nlohmann::json manifest;
  manifest["tool"] = "ctm";
  manifest["version"] = ctm::kVersion;
  manifest["subcommand"] = "enumerate";
  manifest["parameters"] = {{"n", a.n},
                            {"cutoff", d->cutoff},
                            {"mode", a.mode},
                            {"output_convention", a.convention},
                            {"tape_blanks", a.blanks}};
  if (job.mode == ctm::Mode::Sampled) {
    manifest["parameters"]["sample_size"] = a.sample_size;
    manifest["parameters"]["seed"] = a.seed;
  }
  manifest["outputs"] = {a.out};
  manifest["distribution"] = {{"total_machines", d->total_machines}, {"halting_count", d->halting_count}};
  write_manifest(a.out, manifest);

  {
    std::size_t max_ones = 0;
    for (const auto& [s, c] : d->counts)
      max_ones = std::max<std::size_t>(max_ones, static_cast<std::size_t>(std::count(s.begin(), s.end(), '1')));
    std::cout << "wrote " << a.out << ": " << d->total_machines << " machines, " << d->halting_count
              << " halting runs, " << d->counts.size() << " distinct outputs, max ones " << max_ones << "\n";
  }
  return kOk;
}

// --- complexity -------------------------------------------------------------------

int cmd_complexity(const std::string& dist_path, std::vector<std::string> strings, const std::string& export_path) {
  const ctm::Distribution d = ctm::load_distribution(dist_path);
  if (!export_path.empty()) {
    ctm::write_file_atomically(export_path, ctm::serialize_complexity_table(ctm::make_complexity_table(d)));
  }
  if (strings.empty() && export_path.empty()) strings = read_lines(std::cin);

  std::cout << "string\tfrequency\tK_bits\tstatus\n";
  std::size_t failed = 0;
  std::size_t rows = 0;
  for (const auto& s : strings) {
    if (s.empty()) continue;
    ++rows;
    if (!ctm::is_bitstring(s)) {
      std::cout << s << "\t\t\tinvalid-bitstring\n";
      ++failed;
      continue;
    }
    try {
      const double p = ctm::algorithmic_probability(s, d);
      const double k = ctm::estimated_complexity(s, d);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.9e", p);
      std::cout << s << "\t" << buf << "\t" << fixed(k, 6) << "\tok\n";
    } catch (const ctm::NotObserved&) {
      std::cout << s << "\t\t\tnot-observed\n";
    }
  }
  return rows > 0 && failed == rows ? kDataError : kOk;
}

// --- assess -----------------------------------------------------------------------

struct AssessArgs {
  std::string input;  // empty = stdin
  std::string alphabet;
  std::size_t max_lag = 2;
  std::size_t max_block = 2;
  std::string gap_symbol;
  std::vector<std::string> columns;
};

std::string format_gaps(const std::vector<std::size_t>& g) {
  std::string out = "[";
  for (std::size_t i = 0; i < g.size(); ++i) out += (i ? "," : "") + std::to_string(g[i]);
  return out + "]";
}

std::string opt(const std::optional<double>& v) { return v ? fixed(*v, 6) : "NA"; }

int cmd_assess(const AssessArgs& a) {
  std::vector<std::string> header = {"line", "length", "alphabet_size", "entropy_bits", "symbol_redundancy"};
  for (std::size_t k = 1; k <= a.max_lag; ++k) header.push_back("CR_" + std::to_string(k));
  for (std::size_t k = 1; k <= a.max_lag; ++k) header.push_back("CC_" + std::to_string(k));
  for (std::size_t b = 1; b <= a.max_block; ++b) header.push_back("chi2_block" + std::to_string(b));
  header.push_back("median_gap");
  header.push_back("gaps");
  if (!a.gap_symbol.empty()) header.push_back("gaps_" + a.gap_symbol);
  header.push_back("status");

  std::vector<std::size_t> keep;
  if (a.columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) keep.push_back(i);
  } else {
    for (const auto& c : a.columns) {
      auto it = std::find(header.begin(), header.end(), c);
      if (it == header.end()) {
        std::cerr << "error: unknown column '" << c << "'\n";
        return kUsage;
      }
      keep.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }

  std::vector<std::string> alphabet;
  if (!a.alphabet.empty()) {
    std::stringstream ss(a.alphabet);
    std::string tok;
    while (std::getline(ss, tok, ',')) alphabet.push_back(tok);
  }

  std::vector<std::string> lines;
  if (a.input.empty() || a.input == "-") {
    lines = read_lines(std::cin);
  } else {
    std::ifstream f(a.input);
    if (!f) throw ctm::IoError("cannot open '" + a.input + "'");
    lines = read_lines(f);
  }

  const auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < keep.size(); ++i) std::cout << (i ? "\t" : "") << row[keep[i]];
    std::cout << "\n";
  };
  emit(header);
  namespace m = ctm::measures;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (lines[li].find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> row(header.size(), "NA");
    row[0] = std::to_string(li + 1);
    try {
      const m::SymbolSequence seq = m::parse_sequence(lines[li], alphabet);
      const m::SequenceStats st = m::assess(seq, {a.max_lag, a.max_block});
      std::size_t c = 1;
      row[c++] = std::to_string(st.length);
      row[c++] = std::to_string(st.alphabet_size);
      row[c++] = fixed(st.entropy_bits, 6);
      row[c++] = fixed(st.symbol_redundancy, 6);
      for (std::size_t k = 1; k <= a.max_lag; ++k) row[c++] = opt(st.context_redundancy.at(k));
      for (std::size_t k = 1; k <= a.max_lag; ++k) row[c++] = opt(st.coefficient_of_constraint.at(k));
      for (std::size_t b = 1; b <= a.max_block; ++b) row[c++] = opt(st.block_chi_square.at(b));
      row[c++] = opt(st.median_gap);
      std::string gaps;
      for (const auto& [sym, g] : st.gap_distributions) gaps += (gaps.empty() ? "" : ";") + sym + "=" + format_gaps(g);
      row[c++] = gaps;
      if (!a.gap_symbol.empty()) {
        auto it = st.gap_distributions.find(a.gap_symbol);
        row[c++] = it == st.gap_distributions.end() ? "[]" : format_gaps(it->second);
      }
      row[c] = "ok";
    } catch (const std::exception& e) {
      row.back() = std::string("error: ") + e.what();
    }
    emit(row);
  }
  return kOk;
}

// --- zenith -----------------------------------------------------------------------

struct ZenithArgs {
  std::string dist;
  std::string p_column;
  std::string data = std::string(CTM_DATA_DIR) + "/zenith_answers.csv";
  double prior_random = 0.5;
  std::string likelihood = "length5";
};

int cmd_zenith(const ZenithArgs& a) {
  namespace z = ctm::zenith;
  const z::ZenithDataset data = z::load_zenith(a.data);
  std::map<std::string, double> pr;
  std::vector<std::string> provenance;
  if (!a.dist.empty()) {
    const ctm::Distribution d = ctm::load_distribution(a.dist);
    const auto mode = a.likelihood == "all-lengths" ? ctm::MachineLikelihood::AllLengths
                                                    : ctm::MachineLikelihood::LengthRenormalized;
    pr = z::p_random_by_class(ctm::make_randomness_model(d, a.prior_random, mode));
    provenance.push_back("model_source=" + a.dist);
    for (const auto& line : z::distribution_provenance(d)) provenance.push_back(line);
    provenance.push_back("prior_random=" + fixed(a.prior_random, 4));
    provenance.push_back("machine_likelihood=" + a.likelihood);
  } else {
    pr = z::load_p_random_column(a.p_column);
    provenance.push_back("model_source=" + a.p_column);
  }
  provenance.push_back("data=" + a.data);
  const z::PowerLawFit fit = z::fit_power_law(data, pr);
  std::cout << z::render_report(z::zenith_report(data, pr, fit, provenance));
  return kOk;
}

// --- measures-selftest -----------------------------------------------------------

int cmd_measures_selftest() {
  namespace m = ctm::measures;
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok, const std::string& got) {
    std::cout << (ok ? "PASS  " : "FAIL  ") << name << "  (" << got << ")\n";
    failures += ok ? 0 : 1;
  };
  const double sr = m::symbol_redundancy(m::parse_sequence("010101"));
  check("SR(010101) = 0", sr == 0.0, fixed(sr, 6));
  const double sr2 = m::symbol_redundancy(m::parse_sequence("000111"));
  const double sr3 = m::symbol_redundancy(m::parse_sequence("100101"));
  check("SR(000111) = SR(100101) = 0", sr2 == 0.0 && sr3 == 0.0, fixed(sr2, 6) + ", " + fixed(sr3, 6));
  const auto gaps = m::gap_distribution(m::parse_sequence("12311")).at("1");
  check("gaps of '1' in 12311 = [3,1]", gaps == std::vector<std::size_t>{3, 1}, format_gaps(gaps));
  const auto cycling = m::gap_distribution(m::parse_sequence("1,3,4,2,1")).at("1");
  check("gaps of '1' in 1,3,4,2,1 = [4]", cycling == std::vector<std::size_t>{4}, format_gaps(cycling));
  const std::string ch = m::champernowne(15, 10).str();
  check("champernowne(15, 10) = 123456789101112", ch == "123456789101112", ch);
  const std::string ce = m::copeland_erdos(12).str();
  check("copeland_erdos(12) = 235711131719", ce == "235711131719", ce);
  const std::string ch2 = m::champernowne(10, 2).str();
  check("champernowne(10, 2) = 1101110010", ch2 == "1101110010", ch2);
  const auto bin = m::champernowne(10000, 2);
  const double sr_bin = m::symbol_redundancy(bin);
  check("binary Champernowne, length 1e4: SR < 0.05", sr_bin < 0.05, fixed(sr_bin, 6));
  return failures == 0 ? kOk : kDataError;
}

// --- benchmark --------------------------------------------------------------------

int cmd_benchmark(int n, std::uint64_t machines) {
  const std::uint64_t cutoff = ctm::default_cutoff(n);
  const std::uint64_t count = std::min(machines, ctm::machine_count(n));
  ctm::FastRunner runner(n, cutoff, ctm::OutputConvention::BeforeFinalMove);
  ctm::detail::CountTable table;
  const auto t0 = std::chrono::steady_clock::now();
  ctm::detail::simulate_block(runner, ctm::Mode::Exhaustive, 0, 0, count, table);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "n=" << n << " machines=" << count << " seconds=" << fixed(secs, 3)
            << " machines_per_sec=" << fixed(static_cast<double>(count) / secs, 0) << " threads=1\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algorithmic complexity of short strings from small Turing machines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ctm::kVersion);

  EnumerateArgs ea;
  auto* enumerate = app.add_subcommand("enumerate", "Build D(n) by running every (or a sample of) n-state machine");
  enumerate->add_option("--n", ea.n, "State count (1-4; more needs --allow-unsafe)")->required()->check(CLI::Range(1, ctm::kMaxStateCount));
  enumerate->add_option("--cutoff", ea.cutoff, "Step cutoff (default: proven bound for n; may only raise it)");
  enumerate->add_option("--mode", ea.mode, "exhaustive or sampled")->check(CLI::IsMember({"exhaustive", "sampled"}));
  enumerate->add_option("--sample-size", ea.sample_size, "Machines to draw in sampled mode");
  enumerate->add_option("--seed", ea.seed, "Generator seed in sampled mode");
  enumerate->add_option("--shards", ea.shards, "Number of index-range shards (default: hardware threads)");
  enumerate->add_option("--threads", ea.threads, "Worker threads (default: hardware threads)");
  enumerate->add_option("--out", ea.out, "Distribution file to write")->required();
  enumerate->add_option("--checkpoint", ea.checkpoint, "Checkpoint file; resumed from when present");
  enumerate->add_option("--checkpoint-interval", ea.checkpoint_interval, "Seconds between checkpoint writes");
  enumerate->add_option("--stop-after-blocks", ea.stop_after_blocks, "Stop after this many blocks (testing resume)");
  enumerate->add_option("--output-convention", ea.convention)->check(CLI::IsMember({"before-final-move", "through-final-move"}));
  enumerate->add_option("--tape-blanks", ea.blanks, "both: count blank-0 and blank-1 runs; zero: blank-0 only")->check(CLI::IsMember({"both", "zero"}));
  enumerate->add_flag("--allow-unsafe", ea.allow_unsafe, "Permit n > 4 with a heuristic cutoff");
  enumerate->add_flag("--quiet", ea.quiet, "No progress output");

  std::string dist_path;
  std::string export_path;
  std::vector<std::string> strings;
  auto* complexity = app.add_subcommand("complexity", "Frequency and K(s) of bitstrings from a distribution");
  complexity->add_option("--dist", dist_path, "Distribution file")->required();
  complexity->add_option("--export", export_path, "Also write the complexity table for every string");
  complexity->add_option("strings", strings, "Bitstrings (default: read from stdin)");

  AssessArgs aa;
  auto* assess = app.add_subcommand("assess", "Classical randomness coefficients, one row per input line");
  assess->add_option("input", aa.input, "Input file (default: stdin)");
  assess->add_option("--alphabet", aa.alphabet, "Comma-separated alphabet (default: inferred)");
  assess->add_option("--max-lag", aa.max_lag, "Largest lag for CR_k / CC_k")->check(CLI::PositiveNumber);
  assess->add_option("--max-block", aa.max_block, "Largest block length for chi-square")->check(CLI::PositiveNumber);
  assess->add_option("--gap-symbol", aa.gap_symbol, "Add a gaps_<symbol> column");
  assess->add_option("--columns", aa.columns, "Only print these columns")->delimiter(',');

  ZenithArgs za;
  auto* zenith = app.add_subcommand("zenith", "Radio Zenith re-analysis and power-law fit");
  auto* zd = zenith->add_option("--dist", za.dist, "Distribution to compute P(R|s) from");
  auto* zp = zenith->add_option("--p-column", za.p_column, "Ready-made P(R|s) column (percent)");
  zd->excludes(zp);
  zenith->add_option("--data", za.data, "Zenith dataset (default: bundled answer table)");
  zenith->add_option("--prior", za.prior_random, "Prior P(R)")->check(CLI::Range(0.0, 1.0));
  zenith->add_option("--likelihood", za.likelihood, "length5 or all-lengths")->check(CLI::IsMember({"length5", "all-lengths"}));

  auto* selftest = app.add_subcommand("measures-selftest", "Check the classical measures against known values");

  int bench_n = 3;
  std::uint64_t bench_machines = 10'000'000;
  auto* bench = app.add_subcommand("benchmark", "Single-core simulation throughput");
  bench->add_option("--n", bench_n, "State count")->check(CLI::Range(1, 4));
  bench->add_option("--machines", bench_machines, "Machines to simulate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (zenith->parsed() && za.dist.empty() && za.p_column.empty()) {
    std::cerr << "error: zenith needs --dist or --p-column\n";
    return kUsage;
  }

  try {
    if (enumerate->parsed()) return cmd_enumerate(ea);
    if (complexity->parsed()) return cmd_complexity(dist_path, strings, export_path);
    if (assess->parsed()) return cmd_assess(aa);
    if (zenith->parsed()) {
      try {
        return cmd_zenith(za);
      } catch (const ctm::IoError&) {
        throw;
      } catch (const ctm::LoadError&) {
        throw;
      } catch (const ctm::zenith::LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return kDataError;
      } catch (const std::exception& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return kAnalysis;
      }
    }
    if (selftest->parsed()) return cmd_measures_selftest();
    if (bench->parsed()) return cmd_benchmark(bench_n, bench_machines);
  } catch (const ctm::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ctm::LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kDataError;
  } catch (const ctm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
