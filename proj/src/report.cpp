#include "gvarkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <utility>

#include "gvarkit/bgvar.hpp"
#include "gvarkit/errors.hpp"
#include "gvarkit/forecast.hpp"
#include "gvarkit/gvar.hpp"
#include "gvarkit/stattests.hpp"
#include "gvarkit/strings.hpp"
#include "gvarkit/svg.hpp"
#include "gvarkit/table.hpp"
#include "gvarkit/var.hpp"

namespace gvarkit {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

// Star conventions differ by table: the rolling-regression grid marks the
// pooled F-test at 5% (*) and 1% (**); everything else uses the shared
// 10/5/1% three-star scheme.
std::string rolling_stars(double pvalue) {
  if (!std::isfinite(pvalue)) return "";
  if (pvalue <= 0.01) return "**";
  if (pvalue <= 0.05) return "*";
  return "";
}

std::string trace_stars(double stat, const std::array<double, 3>& cv90_95_99) {
  if (!std::isfinite(cv90_95_99[0])) return "";
  if (stat > cv90_95_99[2]) return "***";
  if (stat > cv90_95_99[1]) return "**";
  if (stat > cv90_95_99[0]) return "*";
  return "";
}

int find_name(const std::vector<std::string>& names, const std::string& name,
              const std::string& what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError(what + " has no entry '" + name + "'");
  return static_cast<int>(it - names.begin());
}

std::pair<std::string, std::string> split_series_ref(const std::string& ref) {
  const auto dot = ref.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == ref.size()) {
    throw ConfigError("series reference '" + ref + "' is not of the form country.variable");
  }
  return {ref.substr(0, dot), ref.substr(dot + 1)};
}

}  // namespace

Table stationarity_table(const Panel& panel, const TestOptions& opts, bool phillips_perron) {
  Table t;
  t.header.push_back("country");
  for (const auto& v : panel.variables()) t.header.push_back(v);
  for (int c = 0; c < panel.n_countries(); ++c) {
    std::vector<std::string> row{panel.countries()[c]};
    for (int v = 0; v < panel.n_variables(); ++v) {
      const Eigen::VectorXd y = panel.series(c, v);
      const UnitRootResult r = phillips_perron ? pp_test(y, opts.pp_lags, opts.det)
                                               : adf_test_auto(y, opts.adf_max_lag, opts.det);
      row.push_back(format_fixed(r.pvalue, 2) + significance_stars(r.pvalue));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table rolling_grid(const Panel& panel, const RollingOptions& opts) {
  Table t;
  t.header.push_back("country");
  t.header.push_back("series");
  for (const auto& v : panel.variables()) t.header.push_back(v);
  for (int c = 0; c < panel.n_countries(); ++c) {
    for (int a = 0; a < panel.n_variables(); ++a) {
      std::vector<std::string> row{panel.countries()[c], panel.variables()[a]};
      for (int b = 0; b < panel.n_variables(); ++b) {
        if (b <= a) {
          row.push_back("");
          continue;
        }
        const RollingResult r = rolling_ols(panel.series(c, b), panel.series(c, a), opts.window);
        row.push_back(format_fixed(r.mean_adj_r2, 5) + rolling_stars(r.pooled_f_pvalue));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table granger_grid(const Panel& panel, const TestOptions& opts) {
  Table t;
  t.header.push_back("country");
  t.header.push_back("causing");
  for (const auto& v : panel.variables()) t.header.push_back(v);
  for (int c = 0; c < panel.n_countries(); ++c) {
    for (int a = 0; a < panel.n_variables(); ++a) {
      std::vector<std::string> row{panel.countries()[c], panel.variables()[a]};
      for (int b = 0; b < panel.n_variables(); ++b) {
        if (b == a) {
          row.push_back("");
          continue;
        }
        const GrangerResult r =
            granger_test(panel.series(c, a), panel.series(c, b), opts.granger_lags);
        row.push_back(format_fixed(r.pvalue, 6) + significance_stars(r.pvalue));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table johansen_grid(const Panel& panel, const TestOptions& opts) {
  Table t;
  t.header.push_back("country");
  t.header.push_back("series");
  for (const auto& v : panel.variables()) t.header.push_back(v);
  for (int c = 0; c < panel.n_countries(); ++c) {
    for (int a = 0; a < panel.n_variables(); ++a) {
      std::vector<std::string> row{panel.countries()[c], panel.variables()[a]};
      for (int b = 0; b < panel.n_variables(); ++b) {
        if (b <= a) {
          row.push_back("");
          continue;
        }
        Eigen::MatrixXd pair(panel.n_periods(), 2);
        pair.col(0) = panel.series(c, a);
        pair.col(1) = panel.series(c, b);
        const JohansenResult r = johansen_trace(pair, opts.johansen_lags, opts.johansen_det);
        row.push_back(format_fixed(r.trace_stat[0], 2) + trace_stars(r.trace_stat[0], r.trace_cv[0]));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table var_summary_table(const Panel& panel, const VarOptions& opts) {
  Table t;
  t.header = {"country", "lags", "n_obs", "pooled_rms", "spectral_radius", "jb_reject_5pct"};
  for (int c = 0; c < panel.n_countries(); ++c) {
    const Eigen::MatrixXd block = panel.country_block(c);
    const int p = select_lag(block, opts.max_lag, opts.criterion, opts.det);
    const VarEstimate est = estimate_var(block, p, opts.det);
    const RmsReport rms = residual_rms(est);
    const double radius = var_stability(est).front();
    int jb_reject = 0;
    for (int v = 0; v < est.n_vars(); ++v) {
      if (jarque_bera(est.residuals.col(v)).pvalue <= 0.05) ++jb_reject;
    }
    t.rows.push_back({panel.countries()[c], std::to_string(p), std::to_string(est.n_obs),
                      format_fixed(rms.pooled, 6), format_fixed(radius, 4),
                      std::to_string(jb_reject)});
  }
  return t;
}

Table weights_table(const WeightMatrix& weights) {
  Table t;
  t.header.push_back("From/To");
  for (const auto& c : weights.countries) t.header.push_back(c);
  for (int i = 0; i < weights.w.rows(); ++i) {
    std::vector<std::string> row{weights.countries[static_cast<std::size_t>(i)]};
    for (int j = 0; j < weights.w.cols(); ++j) {
      row.push_back(i == j ? "0" : format_fixed(weights.w(i, j), 4));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table fan_csv(const std::vector<std::string>& labels, int first_step,
              const std::vector<Eigen::MatrixXd>& quantiles) {
  Table t;
  t.header = {"series", "horizon", "q05", "q16", "q50", "q84", "q95"};
  for (std::size_t c = 0; c < labels.size(); ++c) {
    for (int h = 0; h < quantiles[0].rows(); ++h) {
      std::vector<std::string> row{labels[c], std::to_string(first_step + h)};
      for (const auto& q : quantiles) row.push_back(format_full_double(q(h, static_cast<int>(c))));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

// One panel per country for the chosen variable, Figure-2 style.
FanChart fan_chart(const std::string& title, const std::vector<std::string>& labels,
                   const std::vector<std::string>& countries, const std::string& variable,
                   int first_step, const std::vector<Eigen::MatrixXd>& quantiles) {
  FanChart chart;
  chart.title = title;
  for (const auto& country : countries) {
    const std::string label = country + "." + variable;
    const int col = find_name(labels, label, "forecast coordinate list");
    ChartPanel p;
    p.label = label;
    p.x_start = first_step;
    const int n = static_cast<int>(quantiles[0].rows());
    for (int h = 0; h < n; ++h) {
      p.lo_outer.push_back(quantiles[0](h, col));
      p.lo_inner.push_back(quantiles[1](h, col));
      p.median.push_back(quantiles[2](h, col));
      p.hi_inner.push_back(quantiles[3](h, col));
      p.hi_outer.push_back(quantiles[4](h, col));
    }
    chart.panels.push_back(std::move(p));
  }
  return chart;
}

std::vector<ForecastConstraint> expand_constraints(const ForecastSpec& spec, const Panel& panel) {
  std::vector<ForecastConstraint> out;
  for (const auto& cc : spec.constraints) {
    ForecastConstraint fc;
    fc.country = cc.country;
    fc.variable = cc.variable;
    fc.horizons = cc.horizons;
    if (fc.horizons.empty()) {
      for (int h = 1; h <= spec.n_ahead; ++h) fc.horizons.push_back(h);
    }
    if (cc.hold_last) {
      const int c = panel.country_index(cc.country);
      const int v = panel.variable_index(cc.variable);
      const double last = panel.value(c, v, panel.n_periods() - 1);
      fc.values.assign(fc.horizons.size(), last);
    } else {
      fc.values = cc.values;
    }
    out.push_back(std::move(fc));
  }
  return out;
}

namespace {

class StageRunner {
 public:
  StageRunner(fs::path dir, std::string meta, std::vector<std::string>* files)
      : dir_(std::move(dir)), meta_(std::move(meta)), files_(files) {}

  void run(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const ConfigError& e) {
      abort_marker(name, e.what());
      throw ConfigError("stage " + name + ": " + e.what());
    } catch (const DataError& e) {
      abort_marker(name, e.what());
      throw DataError("stage " + name + ": " + e.what());
    } catch (const NumericError& e) {
      abort_marker(name, e.what());
      throw NumericError("stage " + name + ": " + e.what());
    } catch (const std::exception& e) {
      abort_marker(name, e.what());
      throw NumericError("stage " + name + ": " + e.what());
    }
  }

  void save_table(const std::string& name, Table t) {
    t.meta = meta_;
    t.save((dir_ / name).string());
    files_->push_back(name);
  }

  void save_chart(const std::string& name, FanChart chart) {
    chart.meta = meta_;
    chart.save((dir_ / name).string());
    files_->push_back(name);
  }

  void save_text(const std::string& name, const std::string& text) {
    write_text_file(dir_ / name, text);
    files_->push_back(name);
  }

 private:
  void abort_marker(const std::string& stage, const std::string& error) {
    std::ofstream out(dir_ / "INCOMPLETE", std::ios::binary);
    out << "pipeline aborted in stage " << stage << "\n"
        << error << "\n"
        << "artifacts in this directory are incomplete\n";
  }

  fs::path dir_;
  std::string meta_;
  std::vector<std::string>* files_;
};

}  // namespace

Panel subset_panel(const Panel& panel, const std::vector<std::string>& countries,
                   const std::vector<std::string>& variables) {
  const std::vector<std::string>& sel_c = countries.empty() ? panel.countries() : countries;
  const std::vector<std::string>& sel_v = variables.empty() ? panel.variables() : variables;
  std::vector<double> values;
  values.reserve(sel_c.size() * sel_v.size() * static_cast<std::size_t>(panel.n_periods()));
  for (const auto& country : sel_c) {
    const int c = panel.country_index(country);
    for (const auto& variable : sel_v) {
      const int v = panel.variable_index(variable);
      for (int t = 0; t < panel.n_periods(); ++t) values.push_back(panel.value(c, v, t));
    }
  }
  return Panel(sel_c, sel_v, panel.time_index(), std::move(values));
}

FlowTable subset_flows(const FlowTable& flows, const std::vector<std::string>& countries) {
  if (countries.empty()) return flows;
  const int n = static_cast<int>(countries.size());
  FlowTable out;
  out.countries = countries;
  out.flows.resize(n, n);
  std::vector<int> idx;
  for (const auto& c : countries) idx.push_back(find_name(flows.countries, c, "flow table"));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.flows(i, j) = flows.flows(idx[i], idx[j]);
  }
  return out;
}

PipelineInputs load_inputs(const RunConfig& config) {
  if (config.data.empty()) throw ConfigError("config.data (panel CSV path) is required");
  if (config.flows.empty()) throw ConfigError("config.flows (flow CSV path) is required");
  IngestOptions opts;
  opts.interpolate_interior_gaps = config.interpolate_gaps;
  Panel panel = Panel::from_long_csv(config.data, opts);
  FlowTable flows = load_flows_csv(config.flows);
  const std::vector<std::string>& countries =
      config.countries.empty() ? flows.countries : config.countries;
  panel = subset_panel(panel, countries, config.variables);
  flows = subset_flows(flows, countries);
  if (!config.transforms.empty()) panel = panel.transformed(config.transforms);
  return PipelineInputs{std::move(panel), std::move(flows)};
}

std::string geweke_line(int n_exceed, int n_tested) {
  return std::to_string(n_exceed) + " out of " + std::to_string(n_tested) +
         " variables' z-values exceed the 1.96 threshold (" +
         percent_string(n_exceed, n_tested) + "%)";
}

Table model_summary_table(const RunConfig& config, const DiagnosticsReport& diag,
                          int n_countries) {
  Table t;
  t.header = {"section", "item", "value"};
  const auto& s = config.sampler;
  t.rows.push_back({"model", "prior",
                    config.prior.ng_enabled ? "Normal-Gamma prior (NG)" : "Normal prior (vague)"});
  t.rows.push_back({"model", "endogenous lags", "1"});
  t.rows.push_back({"model", "weakly exogenous lags", "1"});
  t.rows.push_back({"model", "posterior draws",
                    std::to_string(static_cast<long long>(s.draws) * s.thin) + "/" +
                        std::to_string(s.thin) + "=" + std::to_string(s.draws)});
  t.rows.push_back({"model", "burn-in", std::to_string(s.burn)});
  t.rows.push_back({"model", "stable posterior draws", std::to_string(diag.n_stable)});
  t.rows.push_back({"model", "cross-sectional units", std::to_string(n_countries)});
  t.rows.push_back(
      {"convergence", "geweke", geweke_line(diag.geweke.n_exceed, diag.geweke.n_tested)});

  const int total = diag.autocorr.total();
  const char* bucket_names[4] = {"p > 0.10", "0.05 < p <= 0.10", "0.01 < p <= 0.05", "p <= 0.01"};
  for (int b = 0; b < 4; ++b) {
    const int count = diag.autocorr.counts[static_cast<std::size_t>(b)];
    t.rows.push_back({"autocorrelation", bucket_names[b],
                      std::to_string(count) + " (" + percent_string(count, total) + "%)"});
  }

  const char* corr_names[4] = {"< 0.1", "0.1 - 0.2", "0.2 - 0.5", ">= 0.5"};
  for (std::size_t v = 0; v < diag.cross_corr.variables.size(); ++v) {
    for (int b = 0; b < 4; ++b) {
      const int count = diag.cross_corr.counts[v][static_cast<std::size_t>(b)];
      t.rows.push_back({"cross-correlation",
                        diag.cross_corr.variables[v] + " " + corr_names[b],
                        std::to_string(count) + " (" + percent_string(count, n_countries) + "%)"});
    }
  }
  return t;
}

ReportBundle run_pipeline(const RunConfig& config) {
  config.prior.validate();

  ReportBundle bundle;
  bundle.output_dir = config.output_dir;
  bundle.config_hash = config.hash_hex();

  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + config.output_dir + "'");
  fs::remove(dir / "INCOMPLETE", ec);

  const std::string meta =
      "cfg=" + bundle.config_hash + " seed=" + std::to_string(config.sampler.seed);
  StageRunner stages(dir, meta, &bundle.files);

  stages.run("config", [&] {
    config.save((dir / "00_config.json").string());
    bundle.files.push_back("00_config.json");
  });

  std::optional<Panel> panel_slot;
  FlowTable flows;
  stages.run("ingest", [&] {
    PipelineInputs in = load_inputs(config);
    panel_slot.emplace(std::move(in.panel));
    flows = std::move(in.flows);
  });
  const Panel& panel = *panel_slot;

  stages.run("stationarity", [&] {
    stages.save_table("01_stationarity_adf.csv", stationarity_table(panel, config.tests, false));
    stages.save_table("01_stationarity_pp.csv", stationarity_table(panel, config.tests, true));
  });

  stages.run("rolling", [&] {
    stages.save_table("02_rolling.csv", rolling_grid(panel, config.rolling));
    if (!config.rolling.y.empty() && !config.rolling.x.empty()) {
      const auto [yc, yv] = split_series_ref(config.rolling.y);
      const auto [xc, xv] = split_series_ref(config.rolling.x);
      const RollingResult r =
          rolling_ols(panel.series(xc, xv), panel.series(yc, yv), config.rolling.window);
      Table t;
      t.header = {"window_end", "adj_r2"};
      for (std::size_t w = 0; w < r.fits.size(); ++w) {
        t.rows.push_back(
            {std::to_string(r.window_end[w]), format_full_double(r.fits[w].adj_r2)});
      }
      stages.save_table("02_rolling_pair.csv", std::move(t));
    }
  });

  stages.run("var", [&] {
    stages.save_table("03_var.csv", var_summary_table(panel, config.var));
    stages.save_table("03_granger.csv", granger_grid(panel, config.tests));
    stages.save_table("03_johansen.csv", johansen_grid(panel, config.tests));
  });

  WeightMatrix weights;
  stages.run("gvar", [&] {
    stages.save_table("04_weights.csv",
                      weights_table(build_weights(flows.flows, WeightMode::max_normalized,
                                                  flows.countries)));
    weights = build_weights(flows.flows, WeightMode::row_stochastic, flows.countries);
    const GlobalModel model =
        estimate_gvar(panel, weights, config.gvar.det, config.gvar.cond_limit);
    stages.save_text("04_gvar_model.txt",
                     global_model_to_text(model) + "meta " + meta + "\n");
  });

  PosteriorDraws draws;
  stages.run("bgvar", [&] {
    draws = sample_posterior(panel, weights, config.prior, config.gvar.det, config.sampler.draws,
                             config.sampler.burn, config.sampler.thin, config.sampler.seed,
                             config.sampler.threads);
    draws.config_hash = config.hash();
    save_draws(draws, (dir / "04_bgvar_draws.gvd").string());
    bundle.files.push_back("04_bgvar_draws.gvd");
    const DiagnosticsReport diag = make_diagnostics(draws, panel, weights);
    stages.save_table("04_model_summary.csv",
                      model_summary_table(config, diag, panel.n_countries()));
  });

  const std::string chart_var =
      config.forecast.chart_variable.empty() ? panel.variables().front()
                                             : config.forecast.chart_variable;

  std::vector<SolvedDraw> solved;
  ForecastOrigin origin;
  stages.run("forecast", [&] {
    solved = solve_draws(draws, weights, config.sampler.stable_only, config.gvar.cond_limit);
    origin = make_origin(panel, weights.countries);

    const ForecastFan fan = forecast_unconditional(
        solved, origin, config.forecast.n_ahead,
        Rng::derive_seed(config.sampler.seed, "forecast/unconditional"));
    stages.save_table("05_forecast_unconditional.csv", fan_csv(fan.labels, 1, fan.quantiles));
    stages.save_chart("05_forecast_unconditional.svg",
                      fan_chart("Unconditional forecast (" + chart_var + ")", fan.labels,
                                weights.countries, chart_var, 1, fan.quantiles));

    if (config.forecast.mode != ConditioningMode::none) {
      ConditioningSpec spec;
      spec.mode = config.forecast.mode;
      spec.rel_half_width = config.forecast.rel_half_width;
      spec.constraints = expand_constraints(config.forecast, panel);
      const ForecastFan cond = forecast_conditional(
          solved, origin, config.forecast.n_ahead, spec,
          Rng::derive_seed(config.sampler.seed, "forecast/conditional"));
      const std::string kind =
          config.forecast.mode == ConditioningMode::fixed ? "fixed" : "band";
      stages.save_table("05_forecast_conditional.csv", fan_csv(cond.labels, 1, cond.quantiles));
      stages.save_chart("05_forecast_conditional.svg",
                        fan_chart("Conditional forecast, " + kind + " constraints (" + chart_var +
                                      ")",
                                  cond.labels, weights.countries, chart_var, 1, cond.quantiles));
    }
  });

  if (!config.girf.country.empty()) {
    stages.run("girf", [&] {
      const GirfResult g = girf(solved, origin.labels, config.girf.country, config.girf.variable,
                                config.girf.horizon);
      stages.save_table("05_girf.csv", fan_csv(g.labels, 0, g.quantiles));
      stages.save_chart(
          "05_girf.svg",
          fan_chart("Generalized impulse responses to " + config.girf.country + "." +
                        config.girf.variable,
                    g.labels, weights.countries, config.girf.variable, 0, g.quantiles));
    });
  }

  return bundle;
}

}  // namespace gvarkit
