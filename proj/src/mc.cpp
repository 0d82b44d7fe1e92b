#include "cdx/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "cdx/rng.hpp"

namespace cdx::mc {

using detect::Detector;
using detect::DetectorSpec;
using detect::RunOutcome;

namespace {

constexpr std::uint64_t kChunk = 1 << 14;
constexpr std::uint64_t kBlock = 256;

RunOutcome simulate_with(Detector& det, const model::GaussianChangeSpec& model,
                         const Scenario& sc, std::uint64_t rep) {
  det.reset();
  auto rng = Xoshiro256pp::for_replication(sc.seed, rep);
  boost::random::normal_distribution<double> noise(0.0, 1.0);
  for (std::uint64_t i = 1; i <= sc.max_steps; ++i) {
    const double mean = (sc.tau == 0 || i < sc.tau) ? model.v0 : sc.v;
    const double x = mean + model.sigma * noise(rng);
    if (auto hit = det.step(model::llr_transform(model, x))) return {*hit, false};
  }
  return {sc.max_steps, true};
}

unsigned resolve_threads(EngineOptions opts) {
  unsigned t = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
  return std::max(1u, t);
}

// Fills out[0..count) with the outcomes of replications first..first+count.
void simulate_range(const DetectorSpec& spec, const model::GaussianChangeSpec& model,
                    const Scenario& sc, std::uint64_t first, std::span<RunOutcome> out,
                    unsigned threads) {
  const std::uint64_t count = out.size();
  const std::uint64_t blocks = (count + kBlock - 1) / kBlock;
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    Detector det(spec);
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      const std::uint64_t lo = b * kBlock;
      const std::uint64_t hi = std::min(count, lo + kBlock);
      for (std::uint64_t i = lo; i < hi; ++i) out[i] = simulate_with(det, model, sc, first + i);
    }
  };
  const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
  if (n <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
}

// Exact integer moments; the order of accumulation cannot change the result.
struct Moments {
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
  std::uint64_t count = 0;
  std::uint64_t censored = 0;

  void add(std::uint64_t value, bool was_censored) {
    sum += value;
    sum_sq += static_cast<unsigned __int128>(value) * value;
    ++count;
    if (was_censored) ++censored;
  }

  RunLengthSummary summary() const {
    RunLengthSummary s;
    s.reps_used = count;
    s.conditional_kept = count;
    s.censored = censored;
    if (count == 0) return s;
    const long double n = static_cast<long double>(count);
    s.mean = static_cast<double>(static_cast<long double>(sum) / n);
    if (count > 1) {
      // n * sum_sq - sum^2 is exact and nonnegative.
      const unsigned __int128 num = static_cast<unsigned __int128>(count) * sum_sq - sum * sum;
      const long double var = static_cast<long double>(num) / (n * (n - 1.0L));
      s.sd = static_cast<double>(std::sqrt(var));
    }
    s.std_error = s.sd / std::sqrt(static_cast<double>(count));
    return s;
  }
};

struct Accumulated {
  Moments moments;
  bool exceeded = false;
};

// tau_offset: 0 records T itself; otherwise records T - tau + 1 for T >= tau.
Accumulated accumulate(const DetectorSpec& spec, const model::GaussianChangeSpec& model,
                       const Scenario& sc, std::uint64_t tau_offset,
                       std::optional<long double> stop_sum, EngineOptions opts) {
  spec.validate();
  model.validate();
  sc.validate();
  const unsigned threads = resolve_threads(opts);
  Accumulated acc;
  std::vector<RunOutcome> buffer(std::min(sc.reps, kChunk));
  for (std::uint64_t first = 0; first < sc.reps; first += kChunk) {
    const std::uint64_t count = std::min(kChunk, sc.reps - first);
    std::span<RunOutcome> out(buffer.data(), count);
    simulate_range(spec, model, sc, first, out, threads);
    for (const auto& o : out) {
      if (tau_offset == 0) {
        acc.moments.add(o.time, o.censored);
      } else if (o.time >= tau_offset) {
        acc.moments.add(o.time - tau_offset + 1, o.censored);
      }
      if (stop_sum && static_cast<long double>(acc.moments.sum) > *stop_sum) {
        acc.exceeded = true;
        return acc;
      }
    }
  }
  return acc;
}

}  // namespace

void Scenario::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

RunOutcome simulate_run_length(const DetectorSpec& spec, const model::GaussianChangeSpec& model,
                               const Scenario& scenario, std::uint64_t rep) {
  Detector det(spec);
  return simulate_with(det, model, scenario, rep);
}

RunLengthSummary estimate_arl(const DetectorSpec& spec, const model::GaussianChangeSpec& model,
                              const Scenario& scenario, EngineOptions opts) {
  auto acc = accumulate(spec, model, scenario, 0, std::nullopt, opts);
  if (acc.moments.censored == acc.moments.count) {
    throw std::runtime_error("horizon too small: every replication was censored");
  }
  return acc.moments.summary();
}

CappedEstimate estimate_arl_capped(const DetectorSpec& spec,
                                   const model::GaussianChangeSpec& model,
                                   const Scenario& scenario, double cap_mean,
                                   EngineOptions opts) {
  const long double stop = static_cast<long double>(cap_mean) * scenario.reps;
  auto acc = accumulate(spec, model, scenario, 0, stop, opts);
  if (!acc.exceeded && acc.moments.censored == acc.moments.count) {
    throw std::runtime_error("horizon too small: every replication was censored");
  }
  return {acc.moments.summary(), acc.exceeded};
}

RunLengthSummary conditional_delay(const DetectorSpec& spec,
                                   const model::GaussianChangeSpec& model,
                                   const Scenario& scenario, EngineOptions opts) {
  if (scenario.tau < 1) throw std::invalid_argument("conditional delay needs tau >= 1");
  if (scenario.max_steps < scenario.tau) {
    throw std::invalid_argument("horizon ends before the change-point");
  }
  auto acc = accumulate(spec, model, scenario, scenario.tau, std::nullopt, opts);
  if (acc.moments.count == 0) {
    throw std::runtime_error("no replication survived to the change-point");
  }
  return acc.moments.summary();
}

JAceResult j_ace(const DetectorSpec& spec, const model::GaussianChangeSpec& model,
                 std::span<const std::uint64_t> taus, const Scenario& base, EngineOptions opts) {
  if (taus.empty()) throw std::invalid_argument("j_ace needs at least one change-point");
  JAceResult result;
  double total = 0.0;
  for (auto tau : taus) {
    if (tau < 1) throw std::invalid_argument("j_ace change-points must be >= 1");
    Scenario sc = base;
    sc.tau = tau;
    result.delays.push_back(conditional_delay(spec, model, sc, opts));
    total += result.delays.back().mean;
  }
  result.value = total / static_cast<double>(taus.size());
  return result;
}

std::vector<GridCell> compare_grid(std::span<const DetectorSpec> specs,
                                   const model::GaussianChangeSpec& model,
                                   std::span<const double> shifts,
                                   std::span<const std::uint64_t> taus, const GridConfig& config,
                                   EngineOptions opts) {
  if (specs.empty() || shifts.empty() || taus.empty()) {
    throw std::invalid_argument("compare_grid needs nonempty specs, shifts and change-points");
  }
  std::vector<GridCell> cells;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (double shift : shifts) {
      for (auto tau : taus) {
        Scenario sc{tau, shift, config.reps, config.seed, config.max_steps};
        GridCell cell{i, shift, tau, {}};
        if (tau == 0) {
          auto acc = accumulate(specs[i], model, sc, 0, std::nullopt, opts);
          cell.summary = acc.moments.summary();
        } else {
          cell.summary = conditional_delay(specs[i], model, sc, opts);
        }
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

}  // namespace cdx::mc
