#ifndef GVARKIT_REPORT_HPP_
#define GVARKIT_REPORT_HPP_

#include <string>
#include <vector>

#include "gvarkit/bgvar.hpp"
#include "gvarkit/config.hpp"
#include "gvarkit/forecast.hpp"
#include "gvarkit/panel.hpp"
#include "gvarkit/svg.hpp"
#include "gvarkit/table.hpp"

namespace gvarkit {

// What a full pipeline run wrote, in write order (paths relative to the
// output directory).
struct ReportBundle {
  std::string output_dir;
  std::string config_hash;
  std::vector<std::string> files;
};

// Load the panel and flow inputs, restrict them to the configured country
// and variable selections (config order) and apply the transforms.
struct PipelineInputs {
  Panel panel;
  FlowTable flows;
};
PipelineInputs load_inputs(const RunConfig& config);

// Panel restricted to the given countries/variables in the given order; an
// empty selection keeps everything.
Panel subset_panel(const Panel& panel, const std::vector<std::string>& countries,
                   const std::vector<std::string>& variables);
FlowTable subset_flows(const FlowTable& flows, const std::vector<std::string>& countries);

// Stage table builders. Grids follow the published layouts: stationarity is
// countries x variables of starred p-values; rolling/Granger/Johansen are
// country-blocked variable x variable grids (Johansen and rolling fill only
// the upper triangle, the rest stays empty); the weight table prints a
// literal 0 diagonal.
Table stationarity_table(const Panel& panel, const TestOptions& opts, bool phillips_perron);
Table rolling_grid(const Panel& panel, const RollingOptions& opts);
Table granger_grid(const Panel& panel, const TestOptions& opts);
Table johansen_grid(const Panel& panel, const TestOptions& opts);
Table var_summary_table(const Panel& panel, const VarOptions& opts);
Table weights_table(const WeightMatrix& weights);

// Tidy quantile table (series, horizon, q05..q95) and the per-country fan
// chart for one charted variable.
Table fan_csv(const std::vector<std::string>& labels, int first_step,
              const std::vector<Eigen::MatrixXd>& quantiles);
FanChart fan_chart(const std::string& title, const std::vector<std::string>& labels,
                   const std::vector<std::string>& countries, const std::string& variable,
                   int first_step, const std::vector<Eigen::MatrixXd>& quantiles);

// Constraint configs resolved against the panel: hold_last copies the last
// observation, empty horizon lists expand to 1..n_ahead.
std::vector<ForecastConstraint> expand_constraints(const ForecastSpec& spec, const Panel& panel);

// Model-summary emission helpers, exposed so their arithmetic is testable:
// "280 out of 1680 variables' z-values exceed the 1.96 threshold (16.67%)".
std::string geweke_line(int n_exceed, int n_tested);
Table model_summary_table(const RunConfig& config, const DiagnosticsReport& diag,
                          int n_countries);

// Run the full pipeline: stationarity tests, rolling regressions,
// VAR/Granger/Johansen, weights + GVAR + posterior sampling with its model
// summary, then forecasts and impulse responses. Every artifact embeds the
// config hash; filenames carry the stage number. A stage failure writes an
// INCOMPLETE marker naming the stage and rethrows with the stage name
// prefixed.
ReportBundle run_pipeline(const RunConfig& config);

}  // namespace gvarkit

#endif  // GVARKIT_REPORT_HPP_
