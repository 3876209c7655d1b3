#include "rpm/experiments/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <thread>

#include "rpm/core/errors.hpp"
#include "rpm/sim/simulator.hpp"
#include "rpm/sim/testbed.hpp"

namespace rpm::experiments {
namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each call writes
// only its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::uint64_t buffer_for(const ExperimentConfig& cfg) {
  return cfg.buffer_bytes.value_or(kExperimentBufferPackets * (kDefaultMss + kHeaderBytes));
}

}  // namespace

double jain_index(std::span<const double> xs) {
  if (xs.empty()) throw ConfigError("jain_index of an empty sample");
  double sum = 0;
  double sq = 0;
  for (double x : xs) {
    if (!(x >= 0)) throw ConfigError("jain_index needs non-negative values");
    sum += x;
    sq += x * x;
  }
  if (sq == 0) throw ConfigError("jain_index of an all-zero sample");
  return sum * sum / (static_cast<double>(xs.size()) * sq);
}

Stats summarize(std::span<const double> xs) {
  Stats s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double acc = 0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(s.n - 1));
  }
  return s;
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out(reps);
  for (std::uint32_t i = 0; i < reps; ++i) out[i] = i + 1;
  return out;
}

void ExperimentConfig::validate() const {
  if (reps < 1 && seeds.empty()) throw ConfigError("repetitions must be >= 1");
  if (!(scale > 0)) throw ConfigError("scale factor must be positive");
  if (mode == sim::AqmMode::None) throw ConfigError("experiments need an AQM mode");
  if (kind == ExperimentKind::Fairness && (fairness_variant < 1 || fairness_variant > 3)) {
    throw ConfigError("fairness experiment must be 1, 2 or 3");
  }
  if (duration && *duration <= SimTime{}) throw ConfigError("duration must be positive");
  if (!(warmup_fraction >= 0 && warmup_fraction < 1)) throw ConfigError("warm-up fraction must be in [0, 1)");
}

std::string experiment_name(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Fairness: return "fairness-" + std::to_string(cfg.fairness_variant);
    case ExperimentKind::Fct: return "fct";
    case ExperimentKind::Reaction: return "reaction";
  }
  return "?";
}

std::vector<double> steady_throughput(const sim::SimTrace& trace, double warmup_fraction) {
  const auto cut = SimTime::from_ns(static_cast<std::int64_t>(static_cast<double>(trace.horizon.ns()) * warmup_fraction));
  const double window = (trace.horizon - cut).seconds();
  std::vector<double> out;
  for (const auto& f : trace.flows) {
    const auto bytes = trace.delivered_at(f.id, trace.horizon) - trace.delivered_at(f.id, cut);
    out.push_back(static_cast<double>(bytes) * 8.0 / window);
  }
  return out;
}

// ---- fairness ---------------------------------------------------------------

sim::ScenarioConfig fairness_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  sim::DumbbellOptions o;
  o.scale = cfg.scale;
  o.mode = cfg.mode;
  o.receiver_delays = sim::fairness_receiver_delays(cfg.fairness_variant);
  o.duration = cfg.duration.value_or(SimTime::from_ms(60'000));
  o.buffer_bytes = buffer_for(cfg);
  o.seed = seed;
  return sim::make_dumbbell(o);
}

FairnessResult run_fairness(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto seeds = cfg.seed_list();
  FairnessResult r;
  r.exp = experiment_name(cfg);
  r.mode = cfg.mode;
  r.runs.resize(seeds.size());
  parallel_for(seeds.size(), cfg.threads, [&](std::size_t i) {
    const auto trace = sim::simulate(fairness_scenario(cfg, seeds[i]));
    auto& run = r.runs[i];
    run.seed = seeds[i];
    run.thr_bps = steady_throughput(trace, cfg.warmup_fraction);
    run.jain = jain_index(run.thr_bps);
  });
  std::sort(r.runs.begin(), r.runs.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
  std::vector<double> js;
  for (const auto& run : r.runs) js.push_back(run.jain);
  r.jain = summarize(js);
  return r;
}

void write_fairness_csv(std::ostream& os, const FairnessResult& r) {
  os << "exp,mode,flow,thr_bps,sd\n";
  const auto flows = r.runs.empty() ? 0 : r.runs.front().thr_bps.size();
  for (std::size_t f = 0; f < flows; ++f) {
    std::vector<double> xs;
    for (const auto& run : r.runs) xs.push_back(run.thr_bps[f]);
    const auto s = summarize(xs);
    os << r.exp << ',' << sim::to_string(r.mode) << ',' << f << ',' << s.mean << ',' << s.sd << '\n';
  }
  os << r.exp << ',' << sim::to_string(r.mode) << ",J," << r.jain.mean << ',' << r.jain.sd << '\n';
}

// ---- flow completion time ---------------------------------------------------

sim::ScenarioConfig fct_scenario(const ExperimentConfig& cfg, const FctOptions& opt, std::uint64_t seed) {
  if (opt.sizes.empty()) throw ConfigError("fct needs at least one flow size");
  if (opt.background_flows > 8) throw ConfigError("at most 8 background flows");
  sim::DumbbellOptions o;
  o.scale = cfg.scale;
  o.mode = cfg.mode;
  o.transport = opt.transport;
  o.receiver_delays = sim::fairness_receiver_delays(opt.receiver_delays);
  o.long_flows = opt.background_flows;
  o.buffer_bytes = buffer_for(cfg);
  o.seed = seed;
  auto sc = sim::make_dumbbell(o);

  // Short flows cycle over the hosts not used by background traffic, with
  // the size ladder shuffled per round so no size always follows another.
  std::mt19937_64 rng(seed ^ 0x9E37'79B9'7F4A'7C15ULL);
  const std::uint32_t first_host = opt.background_flows + 1;
  const std::uint32_t hosts = 10 - opt.background_flows;
  std::vector<std::uint64_t> ladder = opt.sizes;
  SimTime t = opt.warmup;
  std::uint32_t k = 0;
  for (std::uint32_t round = 0; round < opt.flows_per_size; ++round) {
    std::shuffle(ladder.begin(), ladder.end(), rng);
    for (auto size : ladder) {
      const auto h = first_host + k++ % hosts;
      sim::FlowSpec f;
      f.src = "H" + std::to_string(h);
      f.dst = "H" + std::to_string(h + 10);
      f.size_mss = size;
      f.start = t;
      f.transport = opt.transport;
      f.src_port = static_cast<PortNumber>(20000 + k);
      sc.flows.push_back(f);
      t += opt.gap;
    }
  }
  sc.duration = cfg.duration.value_or(t + opt.drain);
  return sc;
}

FctResult run_fct(const ExperimentConfig& cfg, const FctOptions& opt) {
  cfg.validate();
  const auto seeds = cfg.seed_list();
  // per seed -> per size -> completed FCTs (s) and censored count
  std::vector<std::map<std::uint64_t, std::pair<std::vector<double>, std::size_t>>> per_seed(seeds.size());
  parallel_for(seeds.size(), cfg.threads, [&](std::size_t i) {
    const auto trace = sim::simulate(fct_scenario(cfg, opt, seeds[i]));
    auto& m = per_seed[i];
    for (const auto& f : trace.flows) {
      if (!f.size_mss) continue;
      auto& slot = m[*f.size_mss];
      if (f.fct()) {
        slot.first.push_back(f.fct()->seconds());
      } else {
        ++slot.second;
      }
    }
  });

  FctResult r;
  r.mode = cfg.mode;
  for (auto size : opt.sizes) {
    FctRow row;
    row.size_mss = size;
    std::vector<double> means;
    for (auto& m : per_seed) {
      auto& [fcts, censored] = m[size];
      row.completed += fcts.size();
      row.censored += censored;
      if (!fcts.empty()) means.push_back(summarize(fcts).mean);
    }
    row.fct_s = summarize(means);
    r.rows.push_back(row);
  }
  return r;
}

void write_fct_csv(std::ostream& os, const FctResult& r) {
  os << "size_mss,mode,mean_fct_s,sd,n,censored\n";
  for (const auto& row : r.rows) {
    os << row.size_mss << ',' << sim::to_string(r.mode) << ',' << row.fct_s.mean << ',' << row.fct_s.sd << ','
       << row.completed << ',' << row.censored << '\n';
  }
}

// ---- reaction time ----------------------------------------------------------

std::vector<Reaction> measure_reaction_time(const sim::SimTrace& trace) {
  std::vector<Reaction> out;
  std::map<std::pair<std::uint32_t, std::int64_t>, std::size_t> by_signal;
  for (const auto& e : trace.events) {
    if (e.kind == sim::TraceEventKind::Signal) {
      by_signal.emplace(std::pair{e.flow, e.t.ns()}, out.size());
      out.push_back({e.flow, e.t, std::nullopt});
    } else if (e.kind == sim::TraceEventKind::CwrSeen && e.cause) {
      auto it = by_signal.find({e.flow, e.cause->ns()});
      if (it != by_signal.end() && !out[it->second].reaction) out[it->second].reaction = e.t - *e.cause;
    }
  }
  return out;
}

ReactionResult run_reaction(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::Fairness;
  c.validate();
  const auto seeds = c.seed_list();
  ReactionResult r;
  r.mode = cfg.mode;
  r.seeds = seeds;
  r.per_seed.resize(seeds.size());
  std::vector<std::size_t> flows(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t i) {
    const auto trace = sim::simulate(fairness_scenario(c, seeds[i]));
    r.per_seed[i] = measure_reaction_time(trace);
    flows[i] = trace.flows.size();
  });

  const auto n = flows.empty() ? 0 : *std::max_element(flows.begin(), flows.end());
  std::vector<std::vector<double>> medians(n);
  for (const auto& run : r.per_seed) {
    std::vector<std::vector<double>> by_flow(n);
    for (const auto& x : run) {
      if (x.reaction) {
        by_flow[x.flow].push_back(x.reaction->seconds());
      } else {
        ++r.censored;
      }
    }
    for (std::size_t f = 0; f < n; ++f) {
      if (!by_flow[f].empty()) medians[f].push_back(median(by_flow[f]));
    }
  }
  for (const auto& m : medians) r.per_flow.push_back(summarize(m));
  return r;
}

void write_reaction_csv(std::ostream& os, const ReactionResult& r) {
  os << "mode,flow,signal_t,reaction_s\n";
  for (const auto& run : r.per_seed) {
    for (const auto& x : run) {
      os << sim::to_string(r.mode) << ',' << x.flow << ',' << x.signal_t.seconds() << ',';
      if (x.reaction) os << x.reaction->seconds();
      os << '\n';
    }
  }
}

}  // namespace rpm::experiments
