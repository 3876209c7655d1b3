#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rpm/sim/scenario.hpp"
#include "rpm/sim/trace.hpp"

namespace rpm::experiments {

/// (sum x)^2 / (n * sum x^2). Throws ConfigError on empty or all-zero input
/// and on negative entries.
double jain_index(std::span<const double> xs);

struct Stats {
  double mean = 0;
  double sd = 0;  // sample standard deviation; 0 for n < 2
  std::size_t n = 0;
};

Stats summarize(std::span<const double> xs);

enum class ExperimentKind { Fairness, Fct, Reaction };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Fairness;
  int fairness_variant = 2;  // receiver delay row 1, 2 or 3
  sim::AqmMode mode = sim::AqmMode::RpmPerFlow;
  double scale = 0.001;
  std::uint32_t reps = 10;
  std::vector<std::uint64_t> seeds;  // empty: 1..reps
  std::optional<SimTime> duration;   // empty: per-experiment default
  /// Switch buffer. Empty: kExperimentBufferPackets full-size packets.
  std::optional<std::uint64_t> buffer_bytes;
  double warmup_fraction = 0.25;
  /// Parallel repetitions; 0 picks the hardware concurrency.
  unsigned threads = 0;

  std::vector<std::uint64_t> seed_list() const;
  void validate() const;
};

inline constexpr std::uint64_t kExperimentBufferPackets = 100;

std::string experiment_name(const ExperimentConfig& cfg);

/// Throughput of every flow between the warm-up cut and the horizon, in bps.
std::vector<double> steady_throughput(const sim::SimTrace& trace, double warmup_fraction);

// ---- fairness ---------------------------------------------------------------

struct FairnessRun {
  std::uint64_t seed = 0;
  std::vector<double> thr_bps;
  double jain = 0;
};

struct FairnessResult {
  std::string exp;
  sim::AqmMode mode = sim::AqmMode::Fwd;
  std::vector<FairnessRun> runs;  // sorted by seed
  Stats jain;
};

sim::ScenarioConfig fairness_scenario(const ExperimentConfig& cfg, std::uint64_t seed);
FairnessResult run_fairness(const ExperimentConfig& cfg);

/// exp,mode,flow,thr_bps,sd: one row per flow (mean over repetitions) and a
/// trailing row with flow = J.
void write_fairness_csv(std::ostream& os, const FairnessResult& r);

// ---- flow completion time ---------------------------------------------------

struct FctOptions {
  std::vector<std::uint64_t> sizes{2, 8, 32, 128, 512};
  std::uint32_t flows_per_size = 8;  // per repetition
  std::uint32_t background_flows = 2;
  transport::Transport transport = transport::Transport::Dctcp;
  SimTime warmup = SimTime::from_ms(2'000);
  SimTime gap = SimTime::from_ms(150);  // between consecutive short-flow starts
  SimTime drain = SimTime::from_ms(15'000);
  int receiver_delays = 2;  // fairness delay row used for the receiver links
};

struct FctRow {
  std::uint64_t size_mss = 0;
  Stats fct_s;  // over per-repetition mean FCTs
  std::size_t completed = 0;
  std::size_t censored = 0;
};

struct FctResult {
  sim::AqmMode mode = sim::AqmMode::Fwd;
  std::vector<FctRow> rows;  // in ladder order
};

sim::ScenarioConfig fct_scenario(const ExperimentConfig& cfg, const FctOptions& opt, std::uint64_t seed);
FctResult run_fct(const ExperimentConfig& cfg, const FctOptions& opt = {});

/// size_mss,mode,mean_fct_s,sd,n,censored
void write_fct_csv(std::ostream& os, const FctResult& r);

// ---- reaction time ----------------------------------------------------------

struct Reaction {
  std::uint32_t flow = 0;
  SimTime signal_t;
  std::optional<SimTime> reaction;  // empty: censored
};

/// One entry per Signal. The reaction is the delay until the AQM switch sees
/// the CWR-flagged packet whose window reduction was caused by that signal
/// (feedback is attributed along CE -> receiver latch -> ECE -> CWR, or
/// register -> ECE -> CWR). Signals that never caused a reduction within the
/// trace are censored.
std::vector<Reaction> measure_reaction_time(const sim::SimTrace& trace);

struct ReactionResult {
  sim::AqmMode mode = sim::AqmMode::Fwd;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<Reaction>> per_seed;
  /// Per flow: mean over repetitions of the per-run median reaction (s).
  std::vector<Stats> per_flow;
  std::size_t censored = 0;
};

ReactionResult run_reaction(const ExperimentConfig& cfg);

/// mode,flow,signal_t,reaction_s; rows ordered by seed, then time. An empty
/// reaction_s marks a censored episode.
void write_reaction_csv(std::ostream& os, const ReactionResult& r);

}  // namespace rpm::experiments
