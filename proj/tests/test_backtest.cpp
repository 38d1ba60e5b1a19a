#include <doctest.h>

#include <cmath>
#include <functional>

#include "support.hpp"
#include "trendlab/backtest.hpp"
#include "trendlab/date.hpp"
#include "trendlab/error.hpp"

using namespace trendlab;

namespace {

ReturnsPanel small_panel(long T, std::uint64_t seed, Eigen::Index n = 3) {
  auto p = default_model(n);
  p.c_xi = 0.05 * p.c_eps;
  return simulate(p, T, seed);
}

BacktestConfig quick_config() {
  BacktestConfig c;
  c.eta = 0.05;
  c.eta_cov = 0.02;
  c.eta_var = 0.05;
  return c;
}

ErrorKind kind_thrown(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ConfigError;
}

std::vector<StrategySpec> all_basic() {
  std::vector<StrategySpec> out;
  for (auto k : {PortfolioKind::ARP, PortfolioKind::NM, PortfolioKind::EW, PortfolioKind::RP, PortfolioKind::ToRP})
    out.push_back(StrategySpec::basic(k));
  return out;
}

}  // namespace

TEST_CASE("strategy parsing") {
  CHECK(StrategySpec::parse("torp").kind == PortfolioKind::ToRP);
  CHECK(StrategySpec::parse("arp").name == "arp");
  const auto m = StrategySpec::parse("mix:arp=0.195+rp=0.51+torp=0.3");
  CHECK(m.kind == PortfolioKind::Mix);
  REQUIRE(m.components.size() == 3);
  double total = 0.0;
  for (const auto& c : m.components) total += c.second;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.components[1].first == PortfolioKind::RP);
  CHECK(m.components[1].second == doctest::Approx(0.51 / 1.005));
  CHECK_THROWS_AS(StrategySpec::parse("momentum"), Error);
  CHECK_THROWS_AS(StrategySpec::parse("mix:arp=-1+rp=2"), Error);
  CHECK_THROWS_AS(StrategySpec::parse("mix:arp=x"), Error);
  CHECK_THROWS_AS(StrategySpec::parse("mix:"), Error);
  CHECK_THROWS_AS(StrategySpec::parse("constant"), Error);
}

TEST_CASE("default warm-up") {
  BacktestConfig c;
  CHECK(c.effective_warmup() == 7500);
  c.warmup = 12;
  CHECK(c.effective_warmup() == 12);
  CHECK(quick_config().effective_warmup() == 500);
}

TEST_CASE("annualized Sharpe") {
  CHECK(annualized_sharpe(Eigen::Vector3d(1.0, 2.0, 3.0)) == doctest::Approx(2.0 * std::sqrt(252.0)));
  CHECK(kind_thrown([] { annualized_sharpe(Eigen::Vector3d::Constant(0.5)); }) == ErrorKind::DegenerateResult);
  CHECK(kind_thrown([] { annualized_sharpe(Eigen::VectorXd::Ones(1)); }) == ErrorKind::DegenerateResult);
}

TEST_CASE("constant position on drifted white noise") {
  const long T = 100000;
  std::mt19937_64 rng(21);
  ReturnsPanel panel;
  panel.returns = testsupport::gaussian(rng, T, 1).array() + 0.05;
  panel.asset_classes = {AssetClass::Stock};
  BacktestConfig c;
  c.warmup = 0;
  const auto r = run(panel, StrategySpec::constant(Eigen::VectorXd::Ones(1)), c);
  // The daily Sharpe estimate has s.e. sqrt((1 + SR^2/2) / T).
  const double se = std::sqrt((1.0 + 0.05 * 0.05 / 2.0) / T) * std::sqrt(252.0);
  CHECK(std::abs(r.sharpe - 0.05 * std::sqrt(252.0)) < 3.0 * se);
  CHECK(r.pnl == panel.returns.col(0));
}

TEST_CASE("zero signal gives a degenerate result") {
  ReturnsPanel panel;
  panel.returns = Eigen::MatrixXd::Zero(600, 2);
  panel.returns.col(0).setConstant(1e-3);
  panel.returns.col(1).setConstant(-2e-3);
  for (Eigen::Index t = 0; t < 600; t += 2) panel.returns.row(t) *= -1.0;
  panel.asset_classes = {AssetClass::Stock, AssetClass::Bond};
  const auto zero = StrategySpec::constant(Eigen::VectorXd::Zero(2), "zero");
  const auto results = [&] {
    try {
      return run(panel, zero, quick_config()).pnl;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateResult);
    }
    return Eigen::VectorXd();
  }();
  CHECK(results.size() == 0);
}

TEST_CASE("insufficient data") {
  const auto panel = small_panel(400, 1);
  CHECK(kind_thrown([&] { run(panel, StrategySpec::basic(PortfolioKind::NM), quick_config()); }) ==
        ErrorKind::InsufficientData);
  BacktestConfig c = quick_config();
  c.warmup = 398;
  CHECK_NOTHROW(run(panel, StrategySpec::basic(PortfolioKind::NM), c));
  c.warmup = 399;
  CHECK(kind_thrown([&] { run(panel, StrategySpec::basic(PortfolioKind::NM), c); }) == ErrorKind::InsufficientData);
}

TEST_CASE("warm-up days carry no P&L and live days carry the targeted volatility") {
  const auto panel = small_panel(3000, 2);
  const auto results = run_many(panel, all_basic(), quick_config());
  REQUIRE(results.size() == 5);
  for (const auto& r : results) {
    CHECK(r.pnl.head(500).isZero(0.0));
    CHECK(r.positions_history.topRows(500).isZero(0.0));
    CHECK(r.live_pnl().size() == 2500);
    CHECK(std::isfinite(r.sharpe));
  }
  // Each live book is vol-targeted: its positions are never all zero.
  for (const auto& r : results)
    for (Eigen::Index t = 500; t < 3000; ++t) CHECK(r.positions_history.row(t).norm() > 0.0);
}

TEST_CASE("positions are causal") {
  const auto base = small_panel(1500, 3);
  const Eigen::Index t0 = 900;
  ReturnsPanel bumped = base;
  bumped.returns.row(t0) *= 5.0;
  bumped.returns(t0, 1) += 0.3;
  const auto a = run_many(base, all_basic(), quick_config());
  const auto b = run_many(bumped, all_basic(), quick_config());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].positions_history.topRows(t0 + 1) == b[i].positions_history.topRows(t0 + 1));
    CHECK(a[i].pnl.head(t0) == b[i].pnl.head(t0));
    CHECK(a[i].positions_history.row(t0 + 1) != b[i].positions_history.row(t0 + 1));
  }
}

TEST_CASE("scaling all returns") {
  const auto base = small_panel(2000, 4);
  ReturnsPanel doubled = base;
  doubled.returns *= 2.0;
  auto specs = all_basic();
  specs.push_back(StrategySpec::parse("mix:arp=0.2+rp=0.5+torp=0.3"));
  specs.push_back(StrategySpec::constant(Eigen::Vector3d(1.0, -0.5, 0.25)));
  const auto a = run_many(base, specs, quick_config());
  const auto b = run_many(doubled, specs, quick_config());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].sharpe - b[i].sharpe) < 1e-8);
    // A fixed book earns twice as much; vol-targeted books hold half the
    // positions and earn the same P&L.
    const double factor = a[i].name == "constant" ? 2.0 : 1.0;
    CHECK((b[i].pnl - factor * a[i].pnl).cwiseAbs().maxCoeff() < 1e-8 * a[i].pnl.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("dated panels roll covariance on ISO weeks") {
  const auto base = small_panel(1500, 5);
  ReturnsPanel monday = base;
  monday.dates = weekday_calendar(Date{2000, 1, 3}, 1500);
  ReturnsPanel wednesday = base;
  wednesday.dates = weekday_calendar(Date{2000, 1, 5}, 1500);
  const auto spec = StrategySpec::basic(PortfolioKind::ARP);
  const auto plain = run(base, spec, quick_config());
  // Monday-aligned weeks are the same five-day blocks as the synthetic rule.
  CHECK(run(monday, spec, quick_config()).pnl == plain.pnl);
  CHECK(run(wednesday, spec, quick_config()).pnl != plain.pnl);

  // A holiday on the first Friday shortens that week to four days.
  ReturnsPanel gap = monday;
  gap.dates = weekday_calendar(Date{2000, 1, 3}, 1501);
  gap.dates.erase(gap.dates.begin() + 4);
  CHECK(run(gap, spec, quick_config()).pnl != plain.pnl);
}

TEST_CASE("strategy correlations") {
  std::mt19937_64 rng(6);
  const Eigen::VectorXd a = testsupport::gaussian_vector(rng, 10000);
  const Eigen::VectorXd b = testsupport::gaussian_vector(rng, 10000);
  const Eigen::MatrixXd c = strategy_correlations(std::vector<Eigen::VectorXd>{a, b, a});
  CHECK(c(0, 2) == doctest::Approx(1.0));
  CHECK(std::abs(c(0, 1)) < 0.03);
  CHECK(c(1, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(strategy_correlations(std::vector<Eigen::VectorXd>{a, b.head(10)}), Error);
}

TEST_CASE("optimal mix matches a simplex grid") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index T = 3000;
    const Eigen::MatrixXd g = testsupport::gaussian(rng, T, 3);
    std::vector<Eigen::VectorXd> series;
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd x = g.col(k) + 0.3 * g.col((k + 1) % 3);
      x.array() += 0.02 * (k + 1) * (trial % 2 == 0 ? 1.0 : -0.5);
      series.push_back(x);
    }
    if (trial % 2 == 1) series[0].array() += 0.1;
    const MixResult best = optimal_mix(series);
    double total = 0.0;
    for (double w : best.weights) {
      CHECK(w >= 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(best.sharpe == doctest::Approx(mixed_sharpe(series, best.weights)).epsilon(1e-12));
    double grid_best = -1e300;
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; i + j <= 100; ++j)
        grid_best = std::max(grid_best, mixed_sharpe(series, {i / 100.0, j / 100.0, (100 - i - j) / 100.0}));
    CHECK(best.sharpe >= grid_best - 1e-9);
  }
}

TEST_CASE("optimal mix closed forms") {
  std::mt19937_64 rng(8);
  const Eigen::Index T = 200000;
  Eigen::VectorXd a = testsupport::gaussian_vector(rng, T);
  Eigen::VectorXd b = testsupport::gaussian_vector(rng, T);
  // Exactly uncorrelated, unit variance, equal means.
  a.array() -= a.mean();
  b.array() -= b.mean();
  b -= a.dot(b) / a.dot(a) * a;
  a /= std::sqrt(a.squaredNorm() / (T - 1));
  b /= std::sqrt(b.squaredNorm() / (T - 1));
  a.array() += 0.05;
  b.array() += 0.05;
  const MixResult m = optimal_mix(std::vector<Eigen::VectorXd>{a, b});
  CHECK(m.weights[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.sharpe / annualized_sharpe(a) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));

  // Identical series tie to the equal split.
  const MixResult same = optimal_mix(std::vector<Eigen::VectorXd>{a, a, a});
  for (double w : same.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // A Sharpe-one strategy mixed with pure noise never loses Sharpe.
  Eigen::VectorXd noise = testsupport::gaussian_vector(rng, T);
  const Eigen::VectorXd one = a.array() - 0.05 + 1.0 / std::sqrt(252.0);
  const MixResult n = optimal_mix(std::vector<Eigen::VectorXd>{one, noise});
  CHECK(n.sharpe >= annualized_sharpe(one) - 1e-12);

  CHECK_THROWS_AS(optimal_mix(std::vector<Eigen::VectorXd>{a, Eigen::VectorXd::Zero(T)}), Error);
}

TEST_CASE("mix curve sweep") {
  std::mt19937_64 rng(9);
  const Eigen::VectorXd a = testsupport::gaussian_vector(rng, 5000).array() + 0.05;
  const Eigen::VectorXd b = testsupport::gaussian_vector(rng, 5000).array() + 0.03;
  const auto curve = sweep_mix_curve(a, b, 0.05);
  REQUIRE(curve.size() == 21);
  CHECK(curve.front().weight == 0.0);
  CHECK(curve.back().weight == 1.0);
  CHECK(curve.front().sharpe == doctest::Approx(annualized_sharpe(a)).epsilon(1e-12));
  CHECK(curve.back().sharpe == doctest::Approx(annualized_sharpe(b)).epsilon(1e-12));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(std::abs(curve[i].sharpe - curve[i - 1].sharpe) < 0.5);
  CHECK_THROWS_AS(sweep_mix_curve(a, b, 0.0), Error);
}

TEST_CASE("realized risk per eigenmode") {
  const auto panel = small_panel(3000, 10, 4);
  const auto r = run(panel, StrategySpec::basic(PortfolioKind::ARP), quick_config());
  const Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(4, 4);
  const auto profile = realized_risk(r, corr, Eigen::VectorXd::Ones(4), panel);
  CHECK(profile.eigenvalues.size() == 4);
  CHECK(profile.realized_risk.size() == 4);
  CHECK((profile.realized_risk.array() > 0.0).all());
  CHECK_THROWS_AS(realized_risk(r, Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3), panel), Error);
}
