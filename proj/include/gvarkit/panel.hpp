#ifndef GVARKIT_PANEL_HPP_
#define GVARKIT_PANEL_HPP_

#include <Eigen/Dense>
#include <compare>
#include <iosfwd>
#include <string>
#include <vector>

namespace gvarkit {

// A time period label: plain year ("2001") or quarter ("2001Q3").
struct Period {
  int year = 0;
  int quarter = 0;  // 0 = annual

  static Period parse(const std::string& text);
  std::string str() const;
  bool is_quarterly() const { return quarter != 0; }
  // Position on the period's natural integer grid, used for gap detection.
  long ordinal() const { return quarter == 0 ? year : 4L * year + (quarter - 1); }
  auto operator<=>(const Period&) const = default;
};

struct TransformSpec {
  std::string variable;
  bool log = false;
  int diff = 0;
};

// Applied-transformation record per series. initial_values holds the leading
// observations dropped by differencing (on the post-log scale) so the
// original series can be reconstructed.
struct SeriesTransform {
  bool log = false;
  int diff = 0;
  std::vector<double> initial_values;
  bool had_gaps = false;  // interior gaps were interpolated at ingest
};

struct IngestOptions {
  // Interior gaps (missing rows inside a series) are linearly interpolated
  // when set; leading/trailing gaps always fail. Off by default.
  bool interpolate_interior_gaps = false;
};

// Immutable country x variable x time tensor with per-series transform
// history. All operations return new panels.
class Panel {
 public:
  Panel(std::vector<std::string> countries, std::vector<std::string> variables,
        std::vector<Period> time_index, std::vector<double> values);

  static Panel from_long_csv(const std::string& path, const IngestOptions& opts = {});
  static Panel from_long_csv_stream(std::istream& in, const IngestOptions& opts = {},
                                    const std::string& origin = "<stream>");

  std::string to_long_csv() const;
  void save_long_csv(const std::string& path) const;

  int n_countries() const { return static_cast<int>(countries_.size()); }
  int n_variables() const { return static_cast<int>(variables_.size()); }
  int n_periods() const { return static_cast<int>(time_.size()); }

  const std::vector<std::string>& countries() const { return countries_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Period>& time_index() const { return time_; }

  int country_index(const std::string& name) const;  // throws DataError if absent
  int variable_index(const std::string& name) const;

  double value(int c, int v, int t) const { return values_[idx(c, v, t)]; }
  Eigen::VectorXd series(int c, int v) const;
  Eigen::VectorXd series(const std::string& country, const std::string& variable) const;
  // T x V block of one country's series, columns in panel variable order.
  Eigen::MatrixXd country_block(int c) const;

  const SeriesTransform& transform_record(int c, int v) const {
    return transforms_[static_cast<std::size_t>(c) * variables_.size() + v];
  }

  // Apply per-variable log/difference transforms; shortens the time index by
  // the maximum difference order so all series stay aligned.
  Panel transformed(const std::vector<TransformSpec>& specs) const;

 private:
  std::size_t idx(int c, int v, int t) const {
    return (static_cast<std::size_t>(c) * variables_.size() + v) * time_.size() + t;
  }

  std::vector<std::string> countries_;
  std::vector<std::string> variables_;
  std::vector<Period> time_;
  std::vector<double> values_;  // row-major (country, variable, time)
  std::vector<SeriesTransform> transforms_;

  friend Panel apply_transforms(const Panel&, const std::vector<TransformSpec>&);
};

// Reconstruct the original series from a transformed one: cumulative sums
// anchored at the retained initial values, then exp if log was applied.
std::vector<double> invert_transform(const SeriesTransform& record,
                                     const std::vector<double>& transformed);

enum class WeightMode { row_stochastic, max_normalized };

struct WeightMatrix {
  std::vector<std::string> countries;
  Eigen::MatrixXd w;  // zero diagonal
  WeightMode mode = WeightMode::row_stochastic;

  int index_of(const std::string& country) const;
};

// Normalize raw bilateral flows. The diagonal is forced to zero before
// normalizing. row_stochastic divides each row by its row sum (all-zero rows
// are an error); max_normalized divides everything by the largest
// off-diagonal entry.
WeightMatrix build_weights(const Eigen::MatrixXd& flows, WeightMode mode,
                           std::vector<std::string> countries);

struct FlowTable {
  std::vector<std::string> countries;
  Eigen::MatrixXd flows;
};

// Square CSV with a country header row and leading country column.
FlowTable load_flows_csv(const std::string& path);
std::string flows_to_csv(const std::vector<std::string>& countries, const Eigen::MatrixXd& m);

}  // namespace gvarkit

#endif  // GVARKIT_PANEL_HPP_
