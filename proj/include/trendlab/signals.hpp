#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace trendlab {

/// EMA trend signal, s_t = sum_{t'=1}^{t-1} (1 - eta)^{t-t'-1} r_{t'}.
/// `t` is the day the current values are available for: a fresh state has
/// t = 1 and all-zero values (empty sum).
struct SignalState {
  double eta = 0.01;
  Eigen::VectorXd values;
  long t = 1;

  static SignalState initial(Eigen::Index n, double eta = 0.01);
};

/// Folds r_t into the signal, producing the state for day t + 1.
SignalState update(const SignalState& state, const Eigen::Ref<const Eigen::VectorXd>& r);

/// Signal mass sum_{t'<t} S_{t,t'} = (1 - (1 - eta)^{t-1}) / eta.
double s_hat(double eta, long t);

/// Days of signal history required before positions are traded: ceil(2/eta).
std::size_t signal_warmup(double eta);

}  // namespace trendlab
