#include "trendlab/signals.hpp"

#include <cmath>

#include "trendlab/error.hpp"

namespace trendlab {

SignalState SignalState::initial(Eigen::Index n, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidInput, "signal rate must lie in (0, 1)");
  return SignalState{eta, Eigen::VectorXd::Zero(n), 1};
}

SignalState update(const SignalState& state, const Eigen::Ref<const Eigen::VectorXd>& r) {
  if (r.size() != state.values.size())
    throw Error(ErrorKind::InvalidInput, "signal update: return vector has wrong dimension");
  if (!r.allFinite()) throw Error(ErrorKind::InvalidInput, "signal update: non-finite return");
  return SignalState{state.eta, (1.0 - state.eta) * state.values + r, state.t + 1};
}

double s_hat(double eta, long t) {
  if (t <= 1) return 0.0;
  return (1.0 - std::pow(1.0 - eta, static_cast<double>(t - 1))) / eta;
}

std::size_t signal_warmup(double eta) { return static_cast<std::size_t>(std::ceil(2.0 / eta - 1e-9)); }

}  // namespace trendlab
