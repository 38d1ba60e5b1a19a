#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>

#include "trendlab/cli.hpp"
#include "trendlab/io.hpp"

namespace {

const std::map<std::string, std::string> kHelp = {
    {"seed", "random seed"},
    {"out", "output directory"},
    {"input", "panel CSV with a .json sidecar (default: simulate one)"},
    {"n", "number of simulated assets"},
    {"T", "panel length, or agent steps for `agents`"},
    {"gamma", "trend decay rate"},
    {"xi_ratio", "trend covariance as a multiple of the noise covariance"},
    {"drift", "daily drift in units of volatility for stocks and bonds"},
    {"eta", "signal EMA rate"},
    {"eta_cov", "weekly covariance EMA rate"},
    {"eta_var", "daily variance EMA rate"},
    {"cleaner", "rie, clip or none"},
    {"target_vol", "daily volatility target of each strategy"},
    {"warmup", "days before trading starts"},
    {"strategy", "comma-separated list: arp,nm,ew,rp,torp or mix:arp=0.2+rp=0.5+torp=0.3"},
    {"step", "mix curve step"},
    {"oracle_n", "assets in oracle models (1 to 3)"},
    {"oracle_t", "evaluation time of the oracle"},
    {"models", "number of random oracle models"},
    {"strength", "bound on trend and drift relative to noise in oracle models"},
    {"A", "number of agents"},
    {"N", "number of strategies"},
    {"M", "Monte-Carlo runs"},
    {"j", "interaction strength for the trajectory"},
    {"jgrid", "interaction grid start:step:stop"},
};

}  // namespace

int main(int argc, char** argv) {
  using trendlab::cli::RunConfig;
  CLI::App app{"trendlab: trend-following research pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(trendlab::cli::kVersion));

  std::map<std::string, std::string> values;
  std::string config_path;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "write a synthetic return panel"},
      {"backtest", "run strategies over a panel and report Sharpe ratios"},
      {"oracle", "check closed-form weights against the brute-force optimum"},
      {"agents", "herding simulation and its transition curve"},
      {"mix", "Sharpe of strategy mixtures and the optimal mix"},
      {"eigenrisk", "realized risk of each strategy per eigenmode"},
  };
  for (const auto& [name, about] : commands) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", config_path, "JSON config; explicit flags override it");
    for (const auto& key : trendlab::cli::config_keys()) {
      if (key == "command") continue;
      options[name][key] = sub->add_option("--" + key, values[key], kHelp.at(key));
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << trendlab::cli::error_line(trendlab::ErrorKind::ConfigError, e.what()) << "\n";
    return 2;
  }

  try {
    RunConfig config;
    std::string command;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) command = name;
    if (!config_path.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(trendlab::io::read_file(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw trendlab::Error(trendlab::ErrorKind::ConfigError, std::string("config: ") + e.what());
      } catch (const trendlab::Error& e) {
        throw trendlab::Error(trendlab::ErrorKind::ConfigError, e.what());
      }
      config.merge_json(j);
    }
    config.command = command;
    for (const auto& [key, opt] : options[command])
      if (opt->count() > 0) config.set(key, values[key]);
    trendlab::cli::run_command(config);
  } catch (const trendlab::Error& e) {
    std::cerr << trendlab::cli::error_line(e.kind(), e.what()) << "\n";
    return trendlab::cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << trendlab::cli::error_line(trendlab::ErrorKind::DegenerateResult, e.what()) << "\n";
    return 4;
  }
  return 0;
}
