#include "gvarkit/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"

namespace gvarkit {

namespace {

constexpr const char* kLongHeader = "country,variable,date,value";

std::string cell_name(const std::string& country, const std::string& variable,
                      const Period& p) {
  return country + "/" + variable + "@" + p.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Period Period::parse(const std::string& text) {
  const std::string t = trim(text);
  auto fail = [&] { throw DataError("invalid period '" + t + "' (expected YYYY or YYYYQn)"); };
  auto digits = [](const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  Period p;
  const auto q = t.find('Q');
  if (q == std::string::npos) {
    if (!digits(t) || t.size() != 4) fail();
    p.year = std::stoi(t);
  } else {
    const std::string y = t.substr(0, q), rest = t.substr(q + 1);
    if (!digits(y) || y.size() != 4 || rest.size() != 1 || rest[0] < '1' || rest[0] > '4') fail();
    p.year = std::stoi(y);
    p.quarter = rest[0] - '0';
  }
  return p;
}

std::string Period::str() const {
  char buf[16];
  if (quarter == 0) {
    std::snprintf(buf, sizeof(buf), "%04d", year);
  } else {
    std::snprintf(buf, sizeof(buf), "%04dQ%d", year, quarter);
  }
  return buf;
}

Panel::Panel(std::vector<std::string> countries, std::vector<std::string> variables,
             std::vector<Period> time_index, std::vector<double> values)
    : countries_(std::move(countries)),
      variables_(std::move(variables)),
      time_(std::move(time_index)),
      values_(std::move(values)),
      transforms_(countries_.size() * variables_.size()) {
  if (countries_.empty() || variables_.empty() || time_.empty()) {
    throw DataError("panel requires at least one country, variable and period");
  }
  if (values_.size() != countries_.size() * variables_.size() * time_.size()) {
    throw DataError("panel value count does not match dimensions");
  }
  if (!std::is_sorted(time_.begin(), time_.end())) {
    throw DataError("panel time index must be increasing");
  }
}

int Panel::country_index(const std::string& name) const {
  auto it = std::find(countries_.begin(), countries_.end(), name);
  if (it == countries_.end()) throw DataError("unknown country '" + name + "'");
  return static_cast<int>(it - countries_.begin());
}

int Panel::variable_index(const std::string& name) const {
  auto it = std::find(variables_.begin(), variables_.end(), name);
  if (it == variables_.end()) throw DataError("unknown variable '" + name + "'");
  return static_cast<int>(it - variables_.begin());
}

Eigen::VectorXd Panel::series(int c, int v) const {
  Eigen::VectorXd out(n_periods());
  for (int t = 0; t < n_periods(); ++t) out[t] = value(c, v, t);
  return out;
}

Eigen::VectorXd Panel::series(const std::string& country, const std::string& variable) const {
  return series(country_index(country), variable_index(variable));
}

Eigen::MatrixXd Panel::country_block(int c) const {
  Eigen::MatrixXd out(n_periods(), n_variables());
  for (int v = 0; v < n_variables(); ++v) {
    for (int t = 0; t < n_periods(); ++t) out(t, v) = value(c, v, t);
  }
  return out;
}

Panel Panel::from_long_csv(const std::string& path, const IngestOptions& opts) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  return from_long_csv_stream(in, opts, path);
}

Panel Panel::from_long_csv_stream(std::istream& in, const IngestOptions& opts,
                                  const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  {
    auto head = split_csv_line(line);
    for (auto& h : head) h = trim(h);
    const std::vector<std::string> want = {"country", "variable", "date", "value"};
    if (std::vector<std::string>(head.begin(), head.end()) != want) {
      throw DataError(origin + ":1: header must be '" + kLongHeader + "'");
    }
  }

  struct Row {
    int c, v;
    Period p;
    double value;
    int line_no;
  };
  std::vector<std::string> countries, variables;
  std::map<std::string, int> cidx, vidx;
  std::vector<Period> period_pool;
  std::vector<Row> rows;
  bool any_quarterly = false, any_annual = false;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (f.size() != 4) {
      throw DataError(where + ": expected 4 fields, found " + std::to_string(f.size()));
    }
    const std::string country = trim(f[0]), variable = trim(f[1]);
    if (country.empty() || variable.empty()) {
      throw DataError(where + ": empty country or variable name");
    }
    Period p;
    try {
      p = Period::parse(f[2]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    (p.is_quarterly() ? any_quarterly : any_annual) = true;
    const double value = parse_double(f[3], where);
    if (!std::isfinite(value)) throw DataError(where + ": non-finite value");

    auto [ci, cnew] = cidx.try_emplace(country, static_cast<int>(countries.size()));
    if (cnew) countries.push_back(country);
    auto [vi, vnew] = vidx.try_emplace(variable, static_cast<int>(variables.size()));
    if (vnew) variables.push_back(variable);
    rows.push_back({ci->second, vi->second, p, value, line_no});
    period_pool.push_back(p);
  }
  if (rows.empty()) throw DataError(origin + ": no data rows");
  if (any_quarterly && any_annual) {
    throw DataError(origin + ": mixed annual and quarterly dates");
  }

  std::sort(period_pool.begin(), period_pool.end());
  period_pool.erase(std::unique(period_pool.begin(), period_pool.end()), period_pool.end());
  for (std::size_t i = 1; i < period_pool.size(); ++i) {
    if (period_pool[i].ordinal() != period_pool[i - 1].ordinal() + 1) {
      throw DataError(origin + ": time index has a hole between " + period_pool[i - 1].str() +
                      " and " + period_pool[i].str() + " (no observations at all in between)");
    }
  }
  std::map<long, int> tidx;
  for (std::size_t i = 0; i < period_pool.size(); ++i) {
    tidx[period_pool[i].ordinal()] = static_cast<int>(i);
  }

  const std::size_t nc = countries.size(), nv = variables.size(), nt = period_pool.size();
  const double kMissing = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values(nc * nv * nt, kMissing);
  std::vector<int> first_line(nc * nv * nt, 0);
  auto at = [&](int c, int v, int t) { return (static_cast<std::size_t>(c) * nv + v) * nt + t; };

  for (const Row& r : rows) {
    const int t = tidx.at(r.p.ordinal());
    const std::size_t k = at(r.c, r.v, t);
    if (first_line[k] != 0) {
      throw DataError(origin + ":" + std::to_string(r.line_no) + ": duplicate observation for " +
                      cell_name(countries[r.c], variables[r.v], r.p) + " (first at line " +
                      std::to_string(first_line[k]) + ")");
    }
    first_line[k] = r.line_no;
    values[k] = r.value;
  }

  // Balanced-panel check with optional interior interpolation.
  std::vector<std::string> missing_report;
  std::vector<std::pair<int, int>> interpolated;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t v = 0; v < nv; ++v) {
      int first_obs = -1, last_obs = -1;
      for (std::size_t t = 0; t < nt; ++t) {
        if (!std::isnan(values[at(c, v, t)])) {
          if (first_obs < 0) first_obs = static_cast<int>(t);
          last_obs = static_cast<int>(t);
        }
      }
      if (first_obs < 0) {
        missing_report.push_back(countries[c] + "/" + variables[v] + " (entire series)");
        continue;
      }
      for (std::size_t t = 0; t < nt; ++t) {
        if (!std::isnan(values[at(c, v, t)])) continue;
        const bool interior = static_cast<int>(t) > first_obs && static_cast<int>(t) < last_obs;
        if (interior && opts.interpolate_interior_gaps) {
          interpolated.emplace_back(static_cast<int>(c), static_cast<int>(v));
        } else {
          missing_report.push_back(
              cell_name(countries[c], variables[v], period_pool[t]) +
              (interior ? " (interior gap; enable interpolation to fill)" : ""));
        }
      }
    }
  }
  if (!missing_report.empty()) {
    std::string msg = origin + ": unbalanced panel, missing " +
                      std::to_string(missing_report.size()) + " observation(s):";
    const std::size_t shown = std::min<std::size_t>(missing_report.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + missing_report[i];
    if (shown < missing_report.size()) msg += "\n  ...";
    throw DataError(msg);
  }
  for (auto [c, v] : interpolated) {
    // Linear interpolation across each interior NaN run.
    std::size_t t = 0;
    while (t < nt) {
      if (!std::isnan(values[at(c, v, t)])) {
        ++t;
        continue;
      }
      std::size_t end = t;
      while (end < nt && std::isnan(values[at(c, v, end)])) ++end;
      const double lo = values[at(c, v, t - 1)];
      const double hi = values[at(c, v, end)];
      const double span = static_cast<double>(end - (t - 1));
      for (std::size_t k = t; k < end; ++k) {
        values[at(c, v, k)] = lo + (hi - lo) * static_cast<double>(k - (t - 1)) / span;
      }
      t = end;
    }
  }

  Panel panel(std::move(countries), std::move(variables), std::move(period_pool),
              std::move(values));
  for (auto [c, v] : interpolated) {
    panel.transforms_[static_cast<std::size_t>(c) * nv + v].had_gaps = true;
  }
  return panel;
}

std::string Panel::to_long_csv() const {
  std::string out = kLongHeader;
  out += '\n';
  for (int c = 0; c < n_countries(); ++c) {
    for (int v = 0; v < n_variables(); ++v) {
      for (int t = 0; t < n_periods(); ++t) {
        out += countries_[c];
        out += ',';
        out += variables_[v];
        out += ',';
        out += time_[t].str();
        out += ',';
        out += format_full_double(value(c, v, t));
        out += '\n';
      }
    }
  }
  return out;
}

void Panel::save_long_csv(const std::string& path) const { write_file(path, to_long_csv()); }

Panel Panel::transformed(const std::vector<TransformSpec>& specs) const {
  std::vector<TransformSpec> by_var(variables_.size());
  for (std::size_t v = 0; v < variables_.size(); ++v) by_var[v].variable = variables_[v];
  for (const auto& s : specs) {
    if (s.diff < 0) throw ConfigError("negative difference order for '" + s.variable + "'");
    by_var[variable_index(s.variable)] = s;
  }
  int max_d = 0;
  for (const auto& s : by_var) max_d = std::max(max_d, s.diff);
  if (max_d >= n_periods()) {
    throw DataError("difference order " + std::to_string(max_d) + " leaves no observations (T=" +
                    std::to_string(n_periods()) + ")");
  }

  const int nt_out = n_periods() - max_d;
  std::vector<Period> new_time(time_.begin() + max_d, time_.end());
  std::vector<double> new_values(static_cast<std::size_t>(n_countries()) * n_variables() * nt_out);
  std::vector<SeriesTransform> new_tr(static_cast<std::size_t>(n_countries()) * n_variables());

  for (int c = 0; c < n_countries(); ++c) {
    for (int v = 0; v < n_variables(); ++v) {
      const TransformSpec& s = by_var[v];
      std::vector<double> x(n_periods());
      for (int t = 0; t < n_periods(); ++t) x[t] = value(c, v, t);
      if (s.log) {
        for (int t = 0; t < n_periods(); ++t) {
          if (!(x[t] > 0.0)) {
            throw DataError("log transform of non-positive value " + format_full_double(x[t]) +
                            " for " + cell_name(countries_[c], variables_[v], time_[t]));
          }
          x[t] = std::log(x[t]);
        }
      }
      SeriesTransform rec;
      rec.log = s.log;
      rec.diff = s.diff;
      rec.had_gaps = transform_record(c, v).had_gaps;
      rec.initial_values.assign(x.begin(), x.begin() + s.diff);
      std::vector<double> y = x;
      for (int d = 0; d < s.diff; ++d) {
        std::vector<double> next(y.size() - 1);
        for (std::size_t t = 0; t + 1 < y.size(); ++t) next[t] = y[t + 1] - y[t];
        y = std::move(next);
      }
      // y has length T - diff; keep the last nt_out values, stashing the
      // leading (max_d - diff) so the transform stays invertible.
      const int drop = max_d - s.diff;
      rec.initial_values.insert(rec.initial_values.end(), y.begin(), y.begin() + drop);
      for (int t = 0; t < nt_out; ++t) {
        new_values[(static_cast<std::size_t>(c) * n_variables() + v) * nt_out + t] = y[t + drop];
      }
      new_tr[static_cast<std::size_t>(c) * n_variables() + v] = std::move(rec);
    }
  }

  Panel out(countries_, variables_, std::move(new_time), std::move(new_values));
  out.transforms_ = std::move(new_tr);
  return out;
}

std::vector<double> invert_transform(const SeriesTransform& record,
                                     const std::vector<double>& transformed) {
  const int d = record.diff;
  if (static_cast<int>(record.initial_values.size()) < d) {
    throw DataError("transform record lacks initial values for inversion");
  }
  // initial_values = [d post-log levels, extra leading d-th differences].
  std::vector<double> cur(record.initial_values.begin() + d, record.initial_values.end());
  cur.insert(cur.end(), transformed.begin(), transformed.end());
  std::vector<double> init(record.initial_values.begin(), record.initial_values.begin() + d);
  for (int k = d; k >= 1; --k) {
    // Anchor = first element of the (k-1)-th difference of the level series,
    // obtained by differencing the stored initial levels (k-1) times.
    std::vector<double> a = init;
    for (int j = 0; j < k - 1; ++j) {
      for (std::size_t t = 0; t + 1 < a.size(); ++t) a[t] = a[t + 1] - a[t];
      a.pop_back();
    }
    std::vector<double> next(cur.size() + 1);
    next[0] = a.front();
    for (std::size_t t = 0; t < cur.size(); ++t) next[t + 1] = next[t] + cur[t];
    cur = std::move(next);
  }
  if (record.log) {
    for (double& x : cur) x = std::exp(x);
  }
  return cur;
}

int WeightMatrix::index_of(const std::string& country) const {
  auto it = std::find(countries.begin(), countries.end(), country);
  if (it == countries.end()) throw DataError("unknown country '" + country + "' in weight matrix");
  return static_cast<int>(it - countries.begin());
}

WeightMatrix build_weights(const Eigen::MatrixXd& flows, WeightMode mode,
                           std::vector<std::string> countries) {
  const int n = static_cast<int>(countries.size());
  if (flows.rows() != n || flows.cols() != n) {
    throw DataError("flow matrix is " + std::to_string(flows.rows()) + "x" +
                    std::to_string(flows.cols()) + " but " + std::to_string(n) +
                    " countries were given");
  }
  if (n < 2) throw DataError("weight matrix requires at least two countries");
  Eigen::MatrixXd w = flows;
  for (int i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) {
        throw DataError("flow from " + countries[i] + " to " + countries[j] +
                        " must be finite and non-negative");
      }
    }
  }
  if (mode == WeightMode::row_stochastic) {
    for (int i = 0; i < n; ++i) {
      const double s = w.row(i).sum();
      if (s <= 0.0) {
        throw DataError("country " + countries[i] + " has no off-diagonal flows; " +
                        "row-stochastic weights are undefined");
      }
      w.row(i) /= s;
    }
  } else {
    const double m = w.maxCoeff();
    if (m <= 0.0) throw DataError("all flows are zero; max-normalized weights are undefined");
    w /= m;
  }
  return WeightMatrix{std::move(countries), std::move(w), mode};
}

FlowTable load_flows_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  auto head = split_csv_line(line);
  if (head.size() < 3) throw DataError(path + ":1: expected a country header row");
  std::vector<std::string> countries;
  for (std::size_t i = 1; i < head.size(); ++i) {
    const std::string name = trim(head[i]);
    if (name.empty()) throw DataError(path + ":1: empty country name in header");
    countries.push_back(name);
  }
  const int n = static_cast<int>(countries.size());
  Eigen::MatrixXd flows(n, n);
  int line_no = 1;
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw DataError(path + ": expected " + std::to_string(n) + " data rows, found " +
                      std::to_string(i));
    }
    ++line_no;
    const auto f = split_csv_line(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (static_cast<int>(f.size()) != n + 1) {
      throw DataError(where + ": expected " + std::to_string(n + 1) + " fields");
    }
    if (trim(f[0]) != countries[i]) {
      throw DataError(where + ": row label '" + trim(f[0]) + "' does not match header order ('" +
                      countries[i] + "' expected)");
    }
    for (int j = 0; j < n; ++j) flows(i, j) = parse_double(f[j + 1], where);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": unexpected extra row");
    }
  }
  return FlowTable{std::move(countries), std::move(flows)};
}

std::string flows_to_csv(const std::vector<std::string>& countries, const Eigen::MatrixXd& m) {
  std::string out = "country";
  for (const auto& c : countries) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (int i = 0; i < m.rows(); ++i) {
    out += countries[i];
    for (int j = 0; j < m.cols(); ++j) {
      out += ',';
      out += format_full_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace gvarkit
