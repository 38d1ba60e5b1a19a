#include "trendlab/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "trendlab/error.hpp"
#include "trendlab/signals.hpp"
#include "trendlab/symmat.hpp"

namespace trendlab {

namespace {

PortfolioKind parse_kind(std::string_view text) {
  if (text == "rp") return PortfolioKind::RP;
  if (text == "nm") return PortfolioKind::NM;
  if (text == "arp") return PortfolioKind::ARP;
  if (text == "torp") return PortfolioKind::ToRP;
  if (text == "ew") return PortfolioKind::EW;
  throw Error(ErrorKind::InvalidInput, "unknown strategy '" + std::string(text) + "'");
}

}  // namespace

StrategySpec StrategySpec::basic(PortfolioKind kind) {
  StrategySpec s;
  s.kind = kind;
  s.name = std::string(to_string(kind));
  s.vol_targeted = kind != PortfolioKind::Constant;
  return s;
}

StrategySpec StrategySpec::constant(Eigen::VectorXd positions, std::string name) {
  StrategySpec s = basic(PortfolioKind::Constant);
  s.name = std::move(name);
  s.constant_positions = std::move(positions);
  return s;
}

StrategySpec StrategySpec::parse(std::string_view text) {
  if (text.rfind("mix:", 0) != 0) return basic(parse_kind(text));

  StrategySpec s;
  s.kind = PortfolioKind::Mix;
  s.name = std::string(text);
  std::string_view rest = text.substr(4);
  double total = 0.0;
  while (!rest.empty()) {
    const auto plus = rest.find('+');
    const std::string_view item = rest.substr(0, plus);
    rest = plus == std::string_view::npos ? std::string_view{} : rest.substr(plus + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::InvalidInput, "mix component needs name=weight");
    const PortfolioKind kind = parse_kind(item.substr(0, eq));
    double weight = 0.0;
    try {
      weight = std::stod(std::string(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, "bad mix weight in '" + std::string(item) + "'");
    }
    if (!(weight >= 0.0)) throw Error(ErrorKind::InvalidInput, "mix weights must be nonnegative");
    total += weight;
    s.components.emplace_back(kind, weight);
  }
  if (s.components.empty() || !(total > 0.0)) throw Error(ErrorKind::InvalidInput, "mix needs a positive weight");
  for (auto& c : s.components) c.second /= total;
  return s;
}

std::size_t BacktestConfig::effective_warmup() const {
  if (warmup) return *warmup;
  const auto cov_days = 5 * static_cast<std::size_t>(std::ceil(2.0 / eta_cov - 1e-9));
  return std::max(signal_warmup(eta), cov_days);
}

double annualized_sharpe(const Eigen::Ref<const Eigen::VectorXd>& pnl) {
  const Eigen::Index n = pnl.size();
  if (n < 2) throw Error(ErrorKind::DegenerateResult, "Sharpe needs at least two observations");
  const double mean = pnl.mean();
  const double var = (pnl.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw Error(ErrorKind::DegenerateResult, "P&L has zero variance");
  return mean / std::sqrt(var) * std::sqrt(kTradingDays);
}

namespace {

struct DailyInputs {
  const Eigen::MatrixXd& corr;
  const Eigen::VectorXd& vols;
  const Eigen::MatrixXd& cov;
  const Eigen::VectorXd& signal;
  const std::vector<AssetClass>& classes;
};

Eigen::VectorXd basic_positions(PortfolioKind kind, const DailyInputs& in) {
  switch (kind) {
    case PortfolioKind::RP: return risk_parity(in.cov, in.vols, in.classes).positions;
    case PortfolioKind::NM: return naive_markowitz(in.cov, in.signal).positions;
    case PortfolioKind::ARP: return agnostic_risk_parity(in.corr, in.vols, in.signal).positions;
    case PortfolioKind::ToRP: return trend_on_risk_parity(in.cov, in.vols, in.signal, in.classes).positions;
    case PortfolioKind::EW: return equally_weighted_trend(in.vols, in.signal).positions;
    default: break;
  }
  throw Error(ErrorKind::InvalidInput, "strategy kind cannot be built from daily inputs");
}

Eigen::VectorXd targeted(Eigen::VectorXd positions, PortfolioKind kind, const Eigen::MatrixXd& cov, double target) {
  if (positions.isZero(0.0)) return positions;
  return vol_target({std::move(positions), kind}, cov, target).positions;
}

Eigen::VectorXd strategy_positions(const StrategySpec& spec, const DailyInputs& in, double target) {
  switch (spec.kind) {
    case PortfolioKind::Constant: return spec.constant_positions;
    case PortfolioKind::Mix: {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(in.signal.size());
      for (const auto& [kind, weight] : spec.components)
        if (weight != 0.0) out += weight * targeted(basic_positions(kind, in), kind, in.cov, 1.0);
      return out;
    }
    default: {
      Eigen::VectorXd p = basic_positions(spec.kind, in);
      return spec.vol_targeted ? targeted(std::move(p), spec.kind, in.cov, target) : p;
    }
  }
}

bool week_ends_after(const ReturnsPanel& panel, Eigen::Index t) {
  if (!panel.dates.empty()) {
    if (t + 1 >= panel.T()) return true;
    const auto i = static_cast<std::size_t>(t);
    return panel.dates[i + 1].iso_week_key() != panel.dates[i].iso_week_key();
  }
  return (t + 1) % 5 == 0;
}

bool needs_estimators(const StrategySpec& s) { return s.kind != PortfolioKind::Constant; }

}  // namespace

std::vector<BacktestResult> run_many(const ReturnsPanel& panel, const std::vector<StrategySpec>& strategies,
                                     const BacktestConfig& config) {
  const Eigen::Index T = panel.T();
  const Eigen::Index n = panel.n();
  if (n < 1 || static_cast<Eigen::Index>(panel.asset_classes.size()) != n)
    throw Error(ErrorKind::InvalidInput, "panel asset classes do not match its width");
  if (!(config.target_vol > 0.0)) throw Error(ErrorKind::InvalidInput, "target_vol must be > 0");
  const std::size_t warmup = config.effective_warmup();
  if (static_cast<std::size_t>(T) <= warmup + 1)
    throw Error(ErrorKind::InsufficientData, "panel has " + std::to_string(T) + " rows, warm-up needs " +
                                                  std::to_string(warmup + 2));
  for (const auto& s : strategies)
    if (s.kind == PortfolioKind::Constant && s.constant_positions.size() != n)
      throw Error(ErrorKind::InvalidInput, "constant strategy width does not match the panel");

  std::vector<BacktestResult> results(strategies.size());
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    results[i].name = strategies[i].name;
    results[i].pnl = Eigen::VectorXd::Zero(T);
    results[i].positions_history = Eigen::MatrixXd::Zero(T, n);
    results[i].warmup = warmup;
  }
  const bool estimators = std::any_of(strategies.begin(), strategies.end(), needs_estimators);
  const double q = effective_q(n, config.eta_cov);

  SignalState signal = SignalState::initial(n, config.eta);
  CovarianceState cov_state = CovarianceState::initial(n, config.eta_cov, config.eta_var);
  Eigen::MatrixXd corr, cov;
  Eigen::VectorXd vols;
  bool corr_stale = true;

  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::VectorXd r = panel.returns.row(t).transpose();
    if (static_cast<std::size_t>(t) >= warmup) {
      if (estimators) {
        // Correlation only moves when a week is rolled.
        if (corr_stale) {
          corr = clean(correlation(cov_state), q, config.cleaner);
          corr_stale = false;
        }
        vols = volatilities(cov_state);
        cov = symmat::symmetrize(vols.asDiagonal() * corr * vols.asDiagonal());
      }
      const DailyInputs in{corr, vols, cov, signal.values, panel.asset_classes};
      for (std::size_t i = 0; i < strategies.size(); ++i) {
        const Eigen::VectorXd p = strategy_positions(strategies[i], in, config.target_vol);
        results[i].positions_history.row(t) = p.transpose();
        results[i].pnl(t) = r.dot(p);
      }
    }
    signal = update(signal, r);
    cov_state = update_daily(cov_state, r);
    if (week_ends_after(panel, t)) {
      cov_state = roll_week(cov_state);
      corr_stale = true;
    }
  }

  for (auto& res : results) res.sharpe = annualized_sharpe(res.live_pnl());
  return results;
}

BacktestResult run(const ReturnsPanel& panel, const StrategySpec& strategy, const BacktestConfig& config) {
  return run_many(panel, {strategy}, config).front();
}

EigenRiskProfile realized_risk(const BacktestResult& result, const Eigen::MatrixXd& corr,
                               const Eigen::VectorXd& vols, const ReturnsPanel& panel) {
  const Eigen::Index n = panel.n();
  if (corr.rows() != n || vols.size() != n || result.positions_history.cols() != n ||
      result.positions_history.rows() != panel.T())
    throw Error(ErrorKind::InvalidInput, "realized_risk: dimension mismatch");
  if (!(vols.minCoeff() > 0.0)) throw Error(ErrorKind::DegenerateVolatility, "realized_risk: zero volatility");

  const auto pairs = symmat::eigendecompose(corr);
  const auto start = static_cast<Eigen::Index>(result.warmup);
  const Eigen::Index live = panel.T() - start;
  if (live < 2) throw Error(ErrorKind::InsufficientData, "realized_risk: fewer than two live days");

  // live x n matrices of mode exposures and unit-volatility mode returns.
  const Eigen::MatrixXd exposure =
      result.positions_history.bottomRows(live) * vols.asDiagonal() * pairs.vectors;
  Eigen::MatrixXd mode_returns = panel.returns.bottomRows(live) * vols.cwiseInverse().asDiagonal() * pairs.vectors;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = std::max(pairs.values(k), 1e-12);
    mode_returns.col(k) /= std::sqrt(lambda);
  }
  const Eigen::MatrixXd mode_pnl = exposure.cwiseProduct(mode_returns);

  EigenRiskProfile out;
  out.eigenvalues = pairs.values;
  out.realized_risk.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto col = mode_pnl.col(k);
    const double mean = col.mean();
    out.realized_risk(k) = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(live - 1));
  }
  return out;
}

std::vector<Eigen::VectorXd> aligned_live_pnl(const std::vector<BacktestResult>& results) {
  if (results.empty()) return {};
  const Eigen::Index T = results.front().pnl.size();
  std::size_t warmup = 0;
  for (const auto& r : results) {
    if (r.pnl.size() != T) throw Error(ErrorKind::InvalidInput, "P&L series have different lengths");
    warmup = std::max(warmup, r.warmup);
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.pnl.tail(T - static_cast<Eigen::Index>(warmup)));
  return out;
}

Eigen::MatrixXd strategy_correlations(const std::vector<Eigen::VectorXd>& series) {
  const auto k = static_cast<Eigen::Index>(series.size());
  if (k == 0) return {};
  const Eigen::Index T = series.front().size();
  if (T < 2) throw Error(ErrorKind::InvalidInput, "correlations need at least two observations");
  Eigen::MatrixXd centered(T, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& s = series[static_cast<std::size_t>(i)];
    if (s.size() != T) throw Error(ErrorKind::InvalidInput, "P&L series have different lengths");
    centered.col(i) = s.array() - s.mean();
  }
  const Eigen::MatrixXd gram = centered.transpose() * centered;
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double denom = std::sqrt(gram(i, i) * gram(j, j));
      if (!(denom > 0.0)) throw Error(ErrorKind::DegenerateResult, "correlation of a constant P&L series");
      out(i, j) = i == j ? 1.0 : gram(i, j) / denom;
    }
  return out;
}

Eigen::MatrixXd strategy_correlations(const std::vector<BacktestResult>& results) {
  return strategy_correlations(aligned_live_pnl(results));
}

namespace {

// Moments of the unit-volatility versions of a set of series.
struct MixMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

MixMoments unit_vol_moments(const std::vector<Eigen::VectorXd>& series) {
  const auto k = static_cast<Eigen::Index>(series.size());
  if (k == 0) throw Error(ErrorKind::InvalidInput, "mix needs at least one series");
  const Eigen::Index T = series.front().size();
  if (T < 2) throw Error(ErrorKind::DegenerateResult, "mix needs at least two observations");
  Eigen::MatrixXd x(T, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& s = series[static_cast<std::size_t>(i)];
    if (s.size() != T) throw Error(ErrorKind::InvalidInput, "P&L series have different lengths");
    const double mean = s.mean();
    const double sd = std::sqrt((s.array() - mean).square().sum() / static_cast<double>(T - 1));
    if (!(sd > 0.0)) throw Error(ErrorKind::DegenerateResult, "P&L series has zero variance");
    x.col(i) = s / sd;
  }
  MixMoments m;
  m.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  m.cov = (centered.transpose() * centered) / static_cast<double>(T - 1);
  return m;
}

double sharpe_of(const MixMoments& m, const Eigen::VectorXd& w) {
  const double var = w.dot(m.cov * w);
  if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
  return w.dot(m.mean) / std::sqrt(var) * std::sqrt(kTradingDays);
}

// Euclidean projection onto {w >= 0, sum w = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Eigen::VectorXd ascend(const MixMoments& m, Eigen::VectorXd w) {
  double value = sharpe_of(m, w);
  double step = 1.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double var = w.dot(m.cov * w);
    if (!(var > 0.0)) break;
    const double sd = std::sqrt(var);
    const Eigen::VectorXd grad = m.mean / sd - (w.dot(m.mean) / (var * sd)) * (m.cov * w);
    bool moved = false;
    for (int tries = 0; tries < 60; ++tries) {
      const Eigen::VectorXd candidate = project_simplex(w + step * grad);
      const double cv = sharpe_of(m, candidate);
      if (cv > value + 1e-15) {
        const bool tiny = (candidate - w).lpNorm<Eigen::Infinity>() < 1e-13;
        w = candidate;
        value = cv;
        moved = !tiny;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return w;
}

}  // namespace

double mixed_sharpe(const std::vector<Eigen::VectorXd>& series, const std::vector<double>& weights) {
  if (weights.size() != series.size()) throw Error(ErrorKind::InvalidInput, "one weight per series required");
  const MixMoments m = unit_vol_moments(series);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const double s = sharpe_of(m, w);
  if (!std::isfinite(s)) throw Error(ErrorKind::DegenerateResult, "mix has zero variance");
  return s;
}

MixResult optimal_mix(const std::vector<Eigen::VectorXd>& series) {
  if (series.size() < 2) throw Error(ErrorKind::InvalidInput, "optimal_mix needs at least two strategies");
  const MixMoments m = unit_vol_moments(series);
  const Eigen::Index k = m.mean.size();

  // Equal split first so that exact ties resolve to it.
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
  for (Eigen::Index i = 0; i < k; ++i) starts.push_back(Eigen::VectorXd::Unit(k, i));
  std::mt19937_64 rng(0x5eedULL);
  std::exponential_distribution<double> expo(1.0);
  for (int s = 0; s < 8; ++s) {
    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i) w(i) = expo(rng);
    starts.push_back(w / w.sum());
  }

  Eigen::VectorXd best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    const double start_value = sharpe_of(m, start);
    const Eigen::VectorXd w = ascend(m, start);
    const double value = std::max(start_value, sharpe_of(m, w));
    const Eigen::VectorXd& pick = sharpe_of(m, w) >= start_value ? w : start;
    if (value > best_value + 1e-12) {
      best_value = value;
      best = pick;
    }
  }
  if (!std::isfinite(best_value)) throw Error(ErrorKind::DegenerateResult, "no mix with positive variance");
  return {std::vector<double>(best.data(), best.data() + k), best_value};
}

MixResult optimal_mix(const std::vector<BacktestResult>& results) { return optimal_mix(aligned_live_pnl(results)); }

std::vector<MixPoint> sweep_mix_curve(const Eigen::VectorXd& first, const Eigen::VectorXd& second, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorKind::InvalidInput, "mix curve step must lie in (0, 1]");
  const MixMoments m = unit_vol_moments({first, second});
  const auto points = static_cast<long>(std::floor(1.0 / step + 1e-9));
  std::vector<MixPoint> out;
  out.reserve(static_cast<std::size_t>(points + 2));
  for (long i = 0; i <= points; ++i) {
    const double w = std::min(1.0, static_cast<double>(i) * step);
    out.push_back({w, sharpe_of(m, Eigen::Vector2d(1.0 - w, w))});
  }
  if (out.back().weight < 1.0) out.push_back({1.0, sharpe_of(m, Eigen::Vector2d(0.0, 1.0))});
  return out;
}

}  // namespace trendlab
