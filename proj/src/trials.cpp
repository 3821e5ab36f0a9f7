#include "boxlb/trials.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace boxlb {

double Moments::variance() const {
  if (count < 2) return 0.0;
  const Rational n(count);
  const Rational m = mean();
  const Rational var = (Rational(sum_squares) - n * m * m) / (n - 1);
  return to_double(var);
}

double Moments::std_error() const {
  return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

double Moments::z_score(const Rational& expected) const {
  const Rational diff = mean() - expected;
  const double se = std_error();
  if (se == 0.0) {
    if (diff == 0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  }
  return to_double(diff) / se;
}

double TrialStats::bad_fraction() const {
  if (edges.sum == 0) return 0.0;
  return to_double(Rational(bad.sum, edges.sum));
}

std::uint64_t tensor_space_size(const Params& params) {
  std::uint64_t exp = static_cast<std::uint64_t>(params.r());
  for (int j = 0; j < params.d(); ++j) exp *= params.s();
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (r > UINT64_MAX / params.q()) return UINT64_MAX;
    r *= params.q();
  }
  return r;
}

TrialStats run_trials(const Params& params, const TrialOptions& options) {
  std::uint64_t trials = options.trials;
  if (options.mode == Mode::exact) {
    trials = tensor_space_size(params);
    if (trials > options.budget.tensor_space) {
      throw BudgetExceeded("tensor space of " +
                           (trials == UINT64_MAX ? std::string("more than 2^64")
                                                 : std::to_string(trials)) +
                           " form tuples exceeds the budget of " +
                           std::to_string(options.budget.tensor_space));
    }
  } else if (trials == 0) {
    throw std::invalid_argument("at least one trial is required");
  }

  // Fail fast on budgets before spawning workers.
  {
    const auto probe = options.mode == Mode::exact ? forms_from_index(params, 0) : [&] {
      Rng rng(0);
      return sample_forms(params, rng);
    }();
    (void)build_edge_set(params, probe, options.budget);
  }

  TrialStats stats;
  stats.mode = options.mode;
  stats.seed = options.seed;
  stats.delta = options.delta;
  stats.records.resize(trials);
  std::vector<char> checked(trials, 0);

  const Rational target = params.target_edges();
  if (!(options.delta >= 0.0 && options.delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1]");
  }
  // delta is taken at micro resolution so the threshold stays exact.
  const Rational threshold =
      target * Rational(BigInt(std::llround((1.0 - options.delta) * 1e6)), BigInt(1000000));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        std::vector<MultilinearForm> forms;
        if (options.mode == Mode::exact) {
          forms = forms_from_index(params, i);
        } else {
          Rng rng = Rng::stream(options.seed, i);
          forms = sample_forms(params, rng);
        }
        const Instance inst = run_instance(params, std::move(forms), options.budget);
        TrialRecord& rec = stats.records[i];
        rec.index = i;
        rec.edges = inst.edges.size();
        rec.boxes = inst.boxes.size();
        rec.lines = inst.lines.size();
        rec.bad = inst.bad.size();
        rec.kept = inst.kept.size();
        rec.box_free = true;  // run_instance throws otherwise
        rec.meets_target = Rational(rec.kept) >= threshold;
        checked[i] = inst.direct_checked;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, trials)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::uint64_t i = 0; i < trials; ++i) {
    const auto& rec = stats.records[i];
    stats.edges.add(rec.edges);
    stats.boxes.add(rec.boxes);
    stats.lines.add(rec.lines);
    stats.bad.add(rec.bad);
    stats.kept.add(rec.kept);
    stats.box_free += rec.box_free;
    stats.meets_target += rec.meets_target;
    stats.direct_checked += checked[i];
  }
  stats.expected_edges = params.expected_edges();
  stats.expected_boxes = params.expected_boxes();
  BigInt denom = 1;
  for (int j = 0; j < params.d(); ++j) denom *= (params.q() - 1);
  stats.bad_bound = stats.expected_boxes / Rational(denom);
  stats.target_edges = target;
  return stats;
}

}  // namespace boxlb
