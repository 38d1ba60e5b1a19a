#include "trendlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <system_error>

#include "trendlab/backtest.hpp"
#include "trendlab/estimation.hpp"
#include "trendlab/herding.hpp"
#include "trendlab/io.hpp"
#include "trendlab/market_model.hpp"
#include "trendlab/sharpe_oracle.hpp"

namespace trendlab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    config_fail("bad value '" + std::string(text) + "' for " + std::string(key));
  return v;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    if (end > start) out.emplace_back(text.substr(start, end - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Field {
  std::string name;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> put;
  std::function<void(RunConfig&, std::string_view)> parse;
};

template <typename T>
Field field(std::string name, T RunConfig::*member) {
  Field f;
  f.name = name;
  f.get = [member](const RunConfig& c) { return json(c.*member); };
  f.put = [member, name](RunConfig& c, const json& j) {
    try {
      c.*member = j.get<T>();
    } catch (const json::exception&) {
      config_fail("wrong JSON type for " + name);
    }
  };
  f.parse = [member, name](RunConfig& c, std::string_view text) {
    if constexpr (std::is_same_v<T, std::string>) c.*member = std::string(text);
    else c.*member = parse_number<T>(name, text);
  };
  return f;
}

Field optional_long(std::string name, std::optional<long> RunConfig::*member) {
  Field f;
  f.name = name;
  f.get = [member](const RunConfig& c) { return (c.*member) ? json(*(c.*member)) : json(nullptr); };
  f.put = [member, name](RunConfig& c, const json& j) {
    if (j.is_null()) c.*member = std::nullopt;
    else if (j.is_number_integer()) c.*member = j.get<long>();
    else config_fail("wrong JSON type for " + name);
  };
  f.parse = [member, name](RunConfig& c, std::string_view text) { c.*member = parse_number<long>(name, text); };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(field("command", &RunConfig::command));
    t.push_back(field("seed", &RunConfig::seed));
    t.push_back(field("out", &RunConfig::out));
    t.push_back(field("input", &RunConfig::input));
    t.push_back(field("n", &RunConfig::n));
    t.push_back(optional_long("T", &RunConfig::T));
    t.push_back(field("gamma", &RunConfig::gamma));
    t.push_back(field("xi_ratio", &RunConfig::xi_ratio));
    t.push_back(field("drift", &RunConfig::drift));
    t.push_back(field("eta", &RunConfig::eta));
    t.push_back(field("eta_cov", &RunConfig::eta_cov));
    t.push_back(field("eta_var", &RunConfig::eta_var));
    t.push_back(field("cleaner", &RunConfig::cleaner));
    t.push_back(field("target_vol", &RunConfig::target_vol));
    t.push_back(optional_long("warmup", &RunConfig::warmup));
    {
      Field f;
      f.name = "strategy";
      f.get = [](const RunConfig& c) { return c.strategy ? json(*c.strategy) : json(nullptr); };
      f.put = [](RunConfig& c, const json& j) {
        if (j.is_null()) c.strategy = std::nullopt;
        else if (j.is_string()) c.strategy = split_list(j.get<std::string>());
        else if (j.is_array()) {
          try {
            c.strategy = j.get<std::vector<std::string>>();
          } catch (const json::exception&) {
            config_fail("strategy must be a list of strings");
          }
        } else config_fail("wrong JSON type for strategy");
      };
      f.parse = [](RunConfig& c, std::string_view text) { c.strategy = split_list(text); };
      t.push_back(f);
    }
    t.push_back(field("step", &RunConfig::step));
    t.push_back(field("oracle_n", &RunConfig::oracle_n));
    t.push_back(field("oracle_t", &RunConfig::oracle_t));
    t.push_back(field("models", &RunConfig::models));
    t.push_back(field("strength", &RunConfig::strength));
    t.push_back(field("A", &RunConfig::A));
    t.push_back(field("N", &RunConfig::N));
    t.push_back(field("M", &RunConfig::M));
    t.push_back(field("j", &RunConfig::j));
    t.push_back(field("jgrid", &RunConfig::jgrid));
    return t;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.name == key) return &f;
  return nullptr;
}

const std::vector<std::string> kCommands = {"simulate", "backtest", "oracle", "agents", "mix", "eigenrisk"};

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

long RunConfig::effective_T() const {
  if (T) return *T;
  if (command == "simulate") return 1000;
  if (command == "agents") return 50;
  return 20000;
}

std::vector<std::string> RunConfig::effective_strategies() const {
  if (strategy) return *strategy;
  if (command == "mix") return {"arp", "rp", "torp"};
  return {"arp", "nm", "ew", "rp", "torp"};
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) config_fail("grid must look like start:step:stop");
    const double start = parse_number<double>("jgrid", text.substr(0, c1));
    const double step = parse_number<double>("jgrid", text.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_number<double>("jgrid", text.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) config_fail("grid needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) config_fail("grid has too many points");
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    for (const auto& item : split_list(text)) out.push_back(parse_number<double>("jgrid", item));
  }
  if (out.empty()) config_fail("grid is empty");
  return out;
}

void RunConfig::validate() const {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    config_fail("unknown command '" + command + "'");
  auto rate = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) config_fail(std::string(name) + " must lie in (0, 1)");
  };
  auto count = [](long v, const char* name) {
    if (v < 1) config_fail(std::string(name) + " must be >= 1");
  };
  rate(eta, "eta");
  rate(eta_cov, "eta_cov");
  rate(eta_var, "eta_var");
  if (!(gamma > 0.0 && gamma <= 1.0)) config_fail("gamma must lie in (0, 1]");
  if (!(xi_ratio >= 0.0) || !std::isfinite(xi_ratio)) config_fail("xi_ratio must be >= 0");
  if (!std::isfinite(drift)) config_fail("drift must be finite");
  if (!(target_vol > 0.0) || !std::isfinite(target_vol)) config_fail("target_vol must be > 0");
  if (!(step > 0.0 && step <= 1.0)) config_fail("step must lie in (0, 1]");
  if (!(strength > 0.0) || !std::isfinite(strength)) config_fail("strength must be > 0");
  if (!(j >= 0.0) || !std::isfinite(j)) config_fail("j must be >= 0");
  count(n, "n");
  count(effective_T(), "T");
  count(A, "A");
  count(N, "N");
  count(M, "M");
  count(models, "models");
  if (oracle_n < 1 || oracle_n > 3) config_fail("oracle_n must lie in [1, 3]");
  if (oracle_t < 2) config_fail("oracle_t must be >= 2");
  if (warmup && *warmup < 0) config_fail("warmup must be >= 0");
  if (out.empty()) config_fail("out must not be empty");
  try {
    parse_cleaner(cleaner);
    for (const auto& s : effective_strategies()) StrategySpec::parse(s);
  } catch (const Error& e) {
    config_fail(e.what());
  }
  if (command == "agents") parse_grid(jgrid);
  if (command == "mix" && effective_strategies().size() < 2) config_fail("mix needs at least two strategies");
  if (effective_strategies().empty()) config_fail("strategy list is empty");
  if (!input.empty()) {
    if (!fs::exists(input)) config_fail("input file " + input + " does not exist");
    if (!fs::exists(io::sidecar_path(input))) config_fail("input sidecar " + io::sidecar_path(input).string() + " does not exist");
  }
}

json RunConfig::to_json() const {
  json j = json::object();
  for (const auto& f : fields()) j[f.name] = f.get(*this);
  return j;
}

void RunConfig::merge_json(const json& j) {
  if (!j.is_object()) config_fail("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const Field* f = find_field(key);
    if (!f) config_fail("unknown config key '" + key + "'");
    f->put(*this, value);
  }
}

void RunConfig::set(std::string_view key, std::string_view text) {
  const Field* f = find_field(key);
  if (!f) config_fail("unknown config key '" + std::string(key) + "'");
  f->parse(*this, text);
}

std::string RunConfig::hash() const {
  json j = to_json();
  j.erase("out");
  return io::hex64(io::fnv1a(j.dump()));
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError: return 2;
    case ErrorKind::IngestError: return 3;
    default: return 4;
  }
}

std::string error_line(ErrorKind kind, std::string_view message) {
  std::string clean(message);
  for (auto& ch : clean)
    if (ch == '\n' || ch == '\r') ch = ' ';
  json j = {{"error", std::string(to_string(kind))}, {"exit", exit_code(kind)}, {"message", clean}};
  return j.dump();
}

namespace {

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(io::format_number(v));
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

class Artifacts {
 public:
  explicit Artifacts(const RunConfig& config) : config_(config), dir_(config.out) {}

  void write(const std::string& name, std::string_view contents) {
    io::atomic_write(dir_ / name, contents);
    written_.push_back(dir_ / name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  std::vector<fs::path> finish() {
    json manifest;
    manifest["command"] = config_.command;
    json cfg = config_.to_json();
    cfg.erase("out");
    manifest["config"] = cfg;
    manifest["config_hash"] = config_.hash();
    manifest["seed"] = config_.seed;
    manifest["version"] = std::string(kVersion);
    json outputs = json::array();
    for (const auto& p : written_) outputs.push_back(p.filename().string());
    manifest["outputs"] = outputs;
    write_json("manifest.json", manifest);
    return written_;
  }

 private:
  const RunConfig& config_;
  fs::path dir_;
  std::vector<fs::path> written_;
};

ModelParams build_model(const RunConfig& c) {
  ModelParams m = default_model(c.n);
  const Eigen::VectorXd vol = m.c_eps.diagonal().cwiseSqrt();
  m.c_xi = c.xi_ratio * m.c_eps;
  m.mu = c.drift * vol.cwiseProduct(risk_premium_mask(m.asset_classes));
  m.trend_gamma = c.gamma;
  const double b = 1.0 - c.gamma;
  m.trend_beta = std::sqrt(1.0 - b * b);
  return m;
}

ReturnsPanel load_panel(const RunConfig& c) {
  if (!c.input.empty()) return io::read_panel(c.input);
  return simulate(build_model(c), c.effective_T(), c.seed);
}

BacktestConfig backtest_config(const RunConfig& c) {
  BacktestConfig b;
  b.eta = c.eta;
  b.eta_cov = c.eta_cov;
  b.eta_var = c.eta_var;
  b.cleaner = parse_cleaner(c.cleaner);
  b.target_vol = c.target_vol;
  if (c.warmup) b.warmup = static_cast<std::size_t>(*c.warmup);
  return b;
}

std::vector<StrategySpec> strategy_specs(const RunConfig& c) {
  std::vector<StrategySpec> specs;
  for (const auto& s : c.effective_strategies()) specs.push_back(StrategySpec::parse(s));
  return specs;
}

std::vector<std::string> names_of(const std::vector<BacktestResult>& results) {
  std::vector<std::string> names;
  for (const auto& r : results) names.push_back(r.name);
  return names;
}

std::string pnl_csv(const ReturnsPanel& panel, const std::vector<BacktestResult>& results) {
  std::string out = "t";
  if (!panel.dates.empty()) out += ",date";
  for (const auto& r : results) out += "," + r.name;
  out += '\n';
  for (Eigen::Index t = 0; t < panel.T(); ++t) {
    out += std::to_string(t + 1);
    if (!panel.dates.empty()) out += "," + panel.dates[static_cast<std::size_t>(t)].iso();
    for (const auto& r : results) out += "," + io::format_number(r.pnl(t));
    out += '\n';
  }
  return out;
}

json mix_json(const std::vector<std::string>& names, const MixResult& mix) {
  json weights = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) weights[names[i]] = num(mix.weights[i]);
  return {{"weights", weights}, {"sharpe", num(mix.sharpe)}};
}

std::string eigenrisk_csv(const ReturnsPanel& panel, const std::vector<BacktestResult>& results) {
  const auto start = static_cast<Eigen::Index>(results.front().warmup);
  const Eigen::MatrixXd live = panel.returns.bottomRows(panel.T() - start);
  const Eigen::MatrixXd centered = live.rowwise() - live.colwise().mean();
  const Eigen::MatrixXd sample_cov = centered.transpose() * centered / static_cast<double>(live.rows() - 1);
  const Eigen::MatrixXd corr = correlation(sample_cov);
  const Eigen::VectorXd vols = sample_cov.diagonal().cwiseSqrt();

  std::vector<EigenRiskProfile> profiles;
  for (const auto& r : results) profiles.push_back(realized_risk(r, corr, vols, panel));
  std::string out = "mode,eigenvalue";
  for (const auto& r : results) out += "," + r.name;
  out += '\n';
  for (Eigen::Index k = 0; k < panel.n(); ++k) {
    out += std::to_string(k + 1) + "," + io::format_number(profiles.front().eigenvalues(k));
    for (const auto& p : profiles) out += "," + io::format_number(p.realized_risk(k));
    out += '\n';
  }
  return out;
}

void cmd_simulate(const RunConfig& c, Artifacts& art) {
  const ReturnsPanel panel = simulate(build_model(c), c.effective_T(), c.seed);
  art.write("panel.csv", io::panel_csv(panel));
  art.write("panel.json", io::panel_sidecar(panel));
}

void cmd_backtest(const RunConfig& c, Artifacts& art, bool full) {
  const ReturnsPanel panel = load_panel(c);
  const auto results = run_many(panel, strategy_specs(c), backtest_config(c));
  if (full) {
    art.write("pnl.csv", pnl_csv(panel, results));
    json summary;
    json sharpes = json::array();
    for (const auto& r : results) sharpes.push_back({{"name", r.name}, {"sharpe", num(r.sharpe)}});
    summary["strategies"] = sharpes;
    summary["T"] = panel.T();
    summary["n"] = panel.n();
    summary["warmup"] = results.front().warmup;
    summary["correlations"] = matrix_json(strategy_correlations(results));
    if (results.size() >= 2) summary["optimal_mix"] = mix_json(names_of(results), optimal_mix(results));
    art.write_json("summary.json", summary);
  }
  art.write("eigenrisk.csv", eigenrisk_csv(panel, results));
}

void cmd_mix(const RunConfig& c, Artifacts& art) {
  const ReturnsPanel panel = load_panel(c);
  const auto results = run_many(panel, strategy_specs(c), backtest_config(c));
  const auto series = aligned_live_pnl(results);
  std::string curve = "weight_" + results[1].name + ",sharpe\n";
  for (const auto& p : sweep_mix_curve(series[0], series[1], c.step))
    curve += io::format_number(p.weight) + "," + io::format_number(p.sharpe) + "\n";
  art.write("mixcurve.csv", curve);
  json j;
  json singles = json::object();
  for (const auto& r : results) singles[r.name] = num(r.sharpe);
  j["sharpe"] = singles;
  j["optimal_mix"] = mix_json(names_of(results), optimal_mix(series));
  j["correlations"] = matrix_json(strategy_correlations(series));
  art.write_json("mix.json", j);
}

void cmd_oracle(const RunConfig& c, Artifacts& art) {
  json models = json::array();
  double worst_residual = 0.0, worst_ratio = 1.0;
  for (long i = 0; i < c.models; ++i) {
    const ModelParams m = random_weak_trend_model(c.oracle_n, derive_seed(c.seed, static_cast<std::uint64_t>(i)), c.strength);
    const PnlMoments pm = pnl_moments(m, c.eta, c.oracle_t);
    const Eigen::MatrixXd best = brute_force_optimal(pm);
    const Eigen::MatrixXd approx = stationary_weights(m, c.eta, c.oracle_t).weights;
    const Eigen::MatrixXd sandwich = sandwich_weights(m, c.eta, c.oracle_t).weights;
    const double s2_best = squared_sharpe(pm, best);
    const double residual = stationarity_residual(pm, approx);
    const double ratio = squared_sharpe(pm, approx) / s2_best;
    worst_residual = std::max(worst_residual, residual);
    worst_ratio = std::min(worst_ratio, ratio);
    json entry;
    entry["model_hash"] = io::hex64(io::fnv1a(model_fingerprint(m)));
    entry["t"] = c.oracle_t;
    entry["residuals"] = {{"brute_force", num(stationarity_residual(pm, best))},
                          {"approx", num(residual)},
                          {"sandwich", num(stationarity_residual(pm, sandwich))}};
    entry["s2_ratios"] = {{"approx", num(ratio)}, {"sandwich", num(squared_sharpe(pm, sandwich) / s2_best)}};
    models.push_back(entry);
  }
  json j;
  j["eta"] = num(c.eta);
  j["n"] = c.oracle_n;
  j["strength"] = num(c.strength);
  j["models"] = models;
  j["worst"] = {{"approx_residual", num(worst_residual)}, {"approx_s2_ratio", num(worst_ratio)}};
  art.write_json("oracle.json", j);
}

void cmd_agents(const RunConfig& c, Artifacts& art) {
  AgentSimParams p;
  p.A = c.A;
  p.N = c.N;
  p.j = c.j;
  p.T = c.effective_T();
  p.M = c.M;
  p.seed = c.seed;
  const AgentTrajectory traj = run(p);
  std::string csv = "t";
  for (long k = 0; k < p.N; ++k) csv += ",S_" + std::to_string(k + 1);
  csv += '\n';
  const Eigen::MatrixXd& f = traj.runs.front().fractions;
  for (Eigen::Index t = 0; t < f.rows(); ++t) {
    csv += std::to_string(t);
    for (Eigen::Index k = 0; k < f.cols(); ++k) csv += "," + io::format_number(f(t, k));
    csv += '\n';
  }
  art.write("trajectory.csv", csv);

  std::string tr = "j,max_I,stderr\n";
  for (const auto& pt : transition_curve(p, parse_grid(c.jgrid)))
    tr += io::format_number(pt.j) + "," + io::format_number(pt.max_I) + "," + io::format_number(pt.std_error) + "\n";
  art.write("transition.csv", tr);
}

}  // namespace

std::vector<fs::path> run_command(const RunConfig& config) {
  config.validate();
  Artifacts art(config);
  try {
    if (config.command == "simulate") cmd_simulate(config, art);
    else if (config.command == "backtest") cmd_backtest(config, art, true);
    else if (config.command == "eigenrisk") cmd_backtest(config, art, false);
    else if (config.command == "mix") cmd_mix(config, art);
    else if (config.command == "oracle") cmd_oracle(config, art);
    else if (config.command == "agents") cmd_agents(config, art);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorKind::IngestError, e.what());
  }
  return art.finish();
}

}  // namespace trendlab::cli
