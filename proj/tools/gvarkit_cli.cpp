#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gvarkit/bgvar.hpp"
#include "gvarkit/config.hpp"
#include "gvarkit/errors.hpp"
#include "gvarkit/forecast.hpp"
#include "gvarkit/gvar.hpp"
#include "gvarkit/panel.hpp"
#include "gvarkit/report.hpp"
#include "gvarkit/rng.hpp"
#include "gvarkit/svg.hpp"
#include "gvarkit/table.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gvarkit;

struct CliState {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> data;
  std::optional<std::string> flows;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> draws;
  std::optional<int> burn;
  std::optional<int> thin;
  std::optional<int> n_ahead;
  std::optional<int> horizon;
  std::optional<int> window;
  std::optional<std::string> mode;
  std::string draws_file;  // forecast/girf: reuse a saved posterior
};

void add_common_options(CLI::App* sub, CliState* st) {
  sub->add_option("-c,--config", st->config_path, "JSON run configuration")->required();
  sub->add_option("--out", st->out, "output directory (overrides the config)");
  sub->add_option("--data", st->data, "panel CSV path (overrides the config)");
  sub->add_option("--flows", st->flows, "flow CSV path (overrides the config)");
  sub->add_option("--seed", st->seed, "sampler seed (overrides the config)");
  sub->add_option("--threads", st->threads, "sampler threads (overrides the config)");
  sub->add_option("--draws", st->draws, "retained posterior draws (overrides the config)");
  sub->add_option("--burn", st->burn, "burn-in iterations (overrides the config)");
  sub->add_option("--thin", st->thin, "thinning interval (overrides the config)");
  sub->add_option("--n-ahead", st->n_ahead, "forecast horizon (overrides the config)");
  sub->add_option("--horizon", st->horizon, "impulse-response horizon (overrides the config)");
  sub->add_option("--window", st->window, "rolling window length (overrides the config)");
  sub->add_option("--mode", st->mode, "conditioning mode: none, fixed or band");
}

RunConfig effective_config(const CliState& st) {
  RunConfig cfg = RunConfig::load(st.config_path);
  if (st.out) cfg.output_dir = *st.out;
  if (st.data) cfg.data = *st.data;
  if (st.flows) cfg.flows = *st.flows;
  if (st.seed) cfg.sampler.seed = *st.seed;
  if (st.threads) cfg.sampler.threads = *st.threads;
  if (st.draws) cfg.sampler.draws = *st.draws;
  if (st.burn) cfg.sampler.burn = *st.burn;
  if (st.thin) cfg.sampler.thin = *st.thin;
  if (st.n_ahead) cfg.forecast.n_ahead = *st.n_ahead;
  if (st.horizon) cfg.girf.horizon = *st.horizon;
  if (st.window) cfg.rolling.window = *st.window;
  if (st.mode) cfg.forecast.mode = conditioning_mode_from_string(*st.mode);
  return cfg;
}

struct Emitter {
  fs::path dir;
  std::string meta;

  explicit Emitter(const RunConfig& cfg)
      : dir(cfg.output_dir),
        meta("cfg=" + cfg.hash_hex() + " seed=" + std::to_string(cfg.sampler.seed)) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + cfg.output_dir + "'");
  }

  void table(const std::string& name, Table t) const {
    t.meta = meta;
    t.save((dir / name).string());
    std::cout << "wrote " << (dir / name).string() << "\n";
  }

  void chart(const std::string& name, FanChart c) const {
    c.meta = meta;
    c.save((dir / name).string());
    std::cout << "wrote " << (dir / name).string() << "\n";
  }

  void note(const std::string& name) const {
    std::cout << "wrote " << (dir / name).string() << "\n";
  }
};

// Posterior draws for the forecast/girf subcommands: loaded from a saved
// file when given, sampled fresh otherwise.
PosteriorDraws obtain_draws(const RunConfig& cfg, const Panel& panel,
                            const WeightMatrix& weights, const std::string& draws_file) {
  if (!draws_file.empty()) return load_draws(draws_file);
  PosteriorDraws draws =
      sample_posterior(panel, weights, cfg.prior, cfg.gvar.det, cfg.sampler.draws,
                       cfg.sampler.burn, cfg.sampler.thin, cfg.sampler.seed, cfg.sampler.threads);
  draws.config_hash = cfg.hash();
  return draws;
}

void emit_forecasts(const RunConfig& cfg, const Panel& panel, const WeightMatrix& weights,
                    const PosteriorDraws& draws, const Emitter& em) {
  const std::vector<SolvedDraw> solved =
      solve_draws(draws, weights, cfg.sampler.stable_only, cfg.gvar.cond_limit);
  const ForecastOrigin origin = make_origin(panel, weights.countries);
  const std::string chart_var =
      cfg.forecast.chart_variable.empty() ? panel.variables().front() : cfg.forecast.chart_variable;

  const ForecastFan fan =
      forecast_unconditional(solved, origin, cfg.forecast.n_ahead,
                             Rng::derive_seed(cfg.sampler.seed, "forecast/unconditional"));
  em.table("05_forecast_unconditional.csv", fan_csv(fan.labels, 1, fan.quantiles));
  em.chart("05_forecast_unconditional.svg",
           fan_chart("Unconditional forecast (" + chart_var + ")", fan.labels, weights.countries,
                     chart_var, 1, fan.quantiles));

  if (cfg.forecast.mode != ConditioningMode::none) {
    ConditioningSpec spec;
    spec.mode = cfg.forecast.mode;
    spec.rel_half_width = cfg.forecast.rel_half_width;
    spec.constraints = expand_constraints(cfg.forecast, panel);
    const ForecastFan cond =
        forecast_conditional(solved, origin, cfg.forecast.n_ahead, spec,
                             Rng::derive_seed(cfg.sampler.seed, "forecast/conditional"));
    const std::string kind = cfg.forecast.mode == ConditioningMode::fixed ? "fixed" : "band";
    em.table("05_forecast_conditional.csv", fan_csv(cond.labels, 1, cond.quantiles));
    em.chart("05_forecast_conditional.svg",
             fan_chart("Conditional forecast, " + kind + " constraints (" + chart_var + ")",
                       cond.labels, weights.countries, chart_var, 1, cond.quantiles));
  }
}

void emit_girf(const RunConfig& cfg, const Panel& panel, const WeightMatrix& weights,
               const PosteriorDraws& draws, const Emitter& em) {
  if (cfg.girf.country.empty()) {
    throw ConfigError("girf.country must name the shocked country");
  }
  const std::vector<SolvedDraw> solved =
      solve_draws(draws, weights, cfg.sampler.stable_only, cfg.gvar.cond_limit);
  const ForecastOrigin origin = make_origin(panel, weights.countries);
  const GirfResult g =
      girf(solved, origin.labels, cfg.girf.country, cfg.girf.variable, cfg.girf.horizon);
  em.table("05_girf.csv", fan_csv(g.labels, 0, g.quantiles));
  em.chart("05_girf.svg",
           fan_chart("Generalized impulse responses to " + cfg.girf.country + "." +
                         cfg.girf.variable,
                     g.labels, weights.countries, cfg.girf.variable, 0, g.quantiles));
}

int dispatch(const std::string& cmd, const CliState& st) {
  const RunConfig cfg = effective_config(st);

  if (cmd == "report") {
    const ReportBundle bundle = run_pipeline(cfg);
    for (const auto& f : bundle.files) {
      std::cout << "wrote " << (fs::path(bundle.output_dir) / f).string() << "\n";
    }
    std::cout << "config hash " << bundle.config_hash << "\n";
    return 0;
  }

  PipelineInputs in = load_inputs(cfg);
  const Panel& panel = in.panel;
  Emitter em(cfg);

  if (cmd == "ingest") {
    panel.save_long_csv((em.dir / "ingest_panel.csv").string());
    em.note("ingest_panel.csv");
    std::cout << "panel: " << panel.n_countries() << " countries x " << panel.n_variables()
              << " variables x " << panel.n_periods() << " periods\n";
    return 0;
  }
  if (cmd == "stationarity") {
    em.table("01_stationarity_adf.csv", stationarity_table(panel, cfg.tests, false));
    em.table("01_stationarity_pp.csv", stationarity_table(panel, cfg.tests, true));
    return 0;
  }
  if (cmd == "rollreg") {
    em.table("02_rolling.csv", rolling_grid(panel, cfg.rolling));
    return 0;
  }
  if (cmd == "var") {
    em.table("03_var.csv", var_summary_table(panel, cfg.var));
    return 0;
  }
  if (cmd == "granger") {
    em.table("03_granger.csv", granger_grid(panel, cfg.tests));
    return 0;
  }
  if (cmd == "johansen") {
    em.table("03_johansen.csv", johansen_grid(panel, cfg.tests));
    return 0;
  }

  const WeightMatrix weights =
      build_weights(in.flows.flows, WeightMode::row_stochastic, in.flows.countries);

  if (cmd == "gvar") {
    em.table("04_weights.csv", weights_table(build_weights(in.flows.flows,
                                                           WeightMode::max_normalized,
                                                           in.flows.countries)));
    const GlobalModel model = estimate_gvar(panel, weights, cfg.gvar.det, cfg.gvar.cond_limit);
    save_global_model(model, (em.dir / "04_gvar_model.txt").string());
    em.note("04_gvar_model.txt");
    return 0;
  }
  if (cmd == "bgvar") {
    PosteriorDraws draws = obtain_draws(cfg, panel, weights, "");
    save_draws(draws, (em.dir / "04_bgvar_draws.gvd").string());
    em.note("04_bgvar_draws.gvd");
    const DiagnosticsReport diag = make_diagnostics(draws, panel, weights);
    em.table("04_model_summary.csv", model_summary_table(cfg, diag, panel.n_countries()));
    std::cout << "stable draws: " << diag.n_stable << " of " << draws.n_draws << "\n";
    return 0;
  }
  if (cmd == "forecast") {
    const PosteriorDraws draws = obtain_draws(cfg, panel, weights, st.draws_file);
    emit_forecasts(cfg, panel, weights, draws, em);
    return 0;
  }
  if (cmd == "girf") {
    const PosteriorDraws draws = obtain_draws(cfg, panel, weights, st.draws_file);
    emit_girf(cfg, panel, weights, draws, em);
    return 0;
  }
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gvarkit: unit-root/causality testing, GVAR estimation, Bayesian "
               "shrinkage sampling, forecasting and impulse responses"};
  app.require_subcommand(1);

  CliState st;
  const std::vector<std::string> commands = {"ingest", "stationarity", "rollreg",  "var",
                                             "granger", "johansen",    "gvar",     "bgvar",
                                             "forecast", "girf",       "report"};
  const std::vector<std::string> descriptions = {
      "load, subset and transform the panel",
      "ADF and Phillips-Perron grids",
      "rolling-regression R^2 grid",
      "per-country VAR summary",
      "pairwise Granger-causality grid",
      "pairwise Johansen trace grid",
      "classical global model and weight table",
      "posterior sampling and model summary",
      "unconditional/conditional forecast fans",
      "generalized impulse responses",
      "full pipeline"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
    add_common_options(sub, &st);
    if (commands[i] == "forecast" || commands[i] == "girf") {
      sub->add_option("--draws-file", st.draws_file, "reuse a saved posterior draw file");
    }
  }

  try {
    app.parse(argc, argv);
    for (const auto& cmd : commands) {
      if (app.get_subcommand(cmd)->parsed()) return dispatch(cmd, st);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const gvarkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gvarkit::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const gvarkit::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
