#pragma once

// Interacting agents choosing among N strategies. Each agent has a fixed
// Gaussian preference for every strategy and is pulled towards strategies
// that many agents already use:
//
//   X_{a,k} = eps_{a,k} + J * #{a' : agent a' uses k},   J = j sqrt(N) / A,
//
// and every agent synchronously switches to argmax_k X_{a,k}.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace trendlab {

struct AgentSimParams {
  long A = 1000;
  long N = 50;
  double j = 1.5;
  long T = 50;
  long M = 100;
  std::uint64_t seed = 1;

  void validate() const;
  double J() const;
};

struct AgentState {
  std::vector<int> choice;      // strategy index of each agent
  Eigen::MatrixXd preferences;  // A x N

  long agents() const { return static_cast<long>(choice.size()); }
  long strategies() const { return static_cast<long>(preferences.cols()); }

  /// Number of agents using each strategy.
  std::vector<long> counts() const;
  /// A x N 0/1 matrix with one 1 per row.
  Eigen::MatrixXd adoption_matrix() const;
};

/// One synchronous update; ties go to the lowest strategy index.
AgentState step(const AgentState& state, double J);

/// Uniform random initial choices and standard normal preferences.
AgentState random_state(long A, long N, std::uint64_t seed);

struct AgentRun {
  Eigen::MatrixXd fractions;  // (T + 1) x N, row t holds the adoption fractions after t steps
};

/// Steps `state` T times and records the fractions, starting with t = 0.
AgentRun run_from(AgentState state, double J, long T);

struct AgentTrajectory {
  std::vector<AgentRun> runs;  // M runs
  Eigen::MatrixXd I;           // (T + 1) x N average over runs

  /// Per-run max_k of the final fractions.
  Eigen::VectorXd final_max() const;
};

/// M independent runs with per-run seeds derived from params.seed. Runs are
/// distributed over a worker pool capped by TRENDLAB_THREADS.
AgentTrajectory run(const AgentSimParams& params);

struct TransitionPoint {
  double j = 0.0;
  double max_I = 0.0;   // mean over runs of max_k of the final fractions
  double std_error = 0.0;  // standard error of that mean
};

/// One point per j, all other settings taken from `params`.
std::vector<TransitionPoint> transition_curve(const AgentSimParams& params, const std::vector<double>& j_grid);

/// Sub-seed for run `index` of a simulation seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Worker count: TRENDLAB_THREADS if set and positive, else hardware
/// concurrency.
unsigned worker_count();

}  // namespace trendlab
