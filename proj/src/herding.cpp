#include "trendlab/herding.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "trendlab/error.hpp"

namespace trendlab {

void AgentSimParams::validate() const {
  if (A < 1 || N < 1 || T < 1 || M < 1) throw Error(ErrorKind::InvalidInput, "agent counts must be >= 1");
  if (!(j >= 0.0) || !std::isfinite(j)) throw Error(ErrorKind::InvalidInput, "interaction j must be >= 0");
}

double AgentSimParams::J() const { return j * std::sqrt(static_cast<double>(N)) / static_cast<double>(A); }

std::vector<long> AgentState::counts() const {
  std::vector<long> c(static_cast<std::size_t>(strategies()), 0);
  for (int k : choice) ++c[static_cast<std::size_t>(k)];
  return c;
}

Eigen::MatrixXd AgentState::adoption_matrix() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(agents(), strategies());
  for (long a = 0; a < agents(); ++a) s(a, choice[static_cast<std::size_t>(a)]) = 1.0;
  return s;
}

namespace {

// Writes the next choices of `state` into `out` (which may alias state.choice).
void next_choices(const AgentState& state, double J, std::vector<int>& out) {
  const std::vector<long> c = state.counts();
  const long N = state.strategies();
  std::vector<double> pull(static_cast<std::size_t>(N));
  for (long k = 0; k < N; ++k) pull[static_cast<std::size_t>(k)] = J * static_cast<double>(c[static_cast<std::size_t>(k)]);

  for (long a = 0; a < state.agents(); ++a) {
    int best = 0;
    double best_value = state.preferences(a, 0) + pull[0];
    for (long k = 1; k < N; ++k) {
      const double x = state.preferences(a, k) + pull[static_cast<std::size_t>(k)];
      if (x > best_value) {
        best_value = x;
        best = static_cast<int>(k);
      }
    }
    out[static_cast<std::size_t>(a)] = best;
  }
}

}  // namespace

AgentState step(const AgentState& state, double J) {
  AgentState next = state;
  next_choices(state, J, next.choice);
  return next;
}

AgentState random_state(long A, long N, std::uint64_t seed) {
  if (A < 1 || N < 1) throw Error(ErrorKind::InvalidInput, "agent counts must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(N - 1));
  AgentState s;
  s.preferences.resize(A, N);
  for (long a = 0; a < A; ++a)
    for (long k = 0; k < N; ++k) s.preferences(a, k) = normal(rng);
  s.choice.resize(static_cast<std::size_t>(A));
  for (auto& c : s.choice) c = pick(rng);
  return s;
}

AgentRun run_from(AgentState state, double J, long T) {
  const long N = state.strategies();
  const double inv_a = 1.0 / static_cast<double>(state.agents());
  AgentRun out;
  out.fractions.resize(T + 1, N);
  auto record = [&](long t) {
    const std::vector<long> c = state.counts();
    for (long k = 0; k < N; ++k) out.fractions(t, k) = static_cast<double>(c[static_cast<std::size_t>(k)]) * inv_a;
  };
  record(0);
  for (long t = 1; t <= T; ++t) {
    next_choices(state, J, state.choice);
    record(t);
  }
  return out;
}

Eigen::VectorXd AgentTrajectory::final_max() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(runs.size()));
  for (std::size_t m = 0; m < runs.size(); ++m) {
    const auto& f = runs[m].fractions;
    out(static_cast<Eigen::Index>(m)) = f.row(f.rows() - 1).maxCoeff();
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 of the pair.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TRENDLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

AgentTrajectory run(const AgentSimParams& params) {
  params.validate();
  AgentTrajectory out;
  out.runs.resize(static_cast<std::size_t>(params.M));
  const double J = params.J();
  parallel_for(out.runs.size(), [&](std::size_t m) {
    out.runs[m] = run_from(random_state(params.A, params.N, derive_seed(params.seed, m)), J, params.T);
  });
  out.I = Eigen::MatrixXd::Zero(params.T + 1, params.N);
  for (const auto& r : out.runs) out.I += r.fractions;
  out.I /= static_cast<double>(params.M);
  return out;
}

std::vector<TransitionPoint> transition_curve(const AgentSimParams& params, const std::vector<double>& j_grid) {
  if (j_grid.empty()) throw Error(ErrorKind::InvalidInput, "transition_curve: empty j grid");
  std::vector<TransitionPoint> out;
  out.reserve(j_grid.size());
  for (double j : j_grid) {
    AgentSimParams p = params;
    p.j = j;
    const Eigen::VectorXd maxes = run(p).final_max();
    const double mean = maxes.mean();
    double se = 0.0;
    if (maxes.size() > 1) {
      const double var = (maxes.array() - mean).square().sum() / static_cast<double>(maxes.size() - 1);
      se = std::sqrt(var / static_cast<double>(maxes.size()));
    }
    out.push_back({j, mean, se});
  }
  return out;
}

}  // namespace trendlab
