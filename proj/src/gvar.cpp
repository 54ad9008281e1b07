#include "gvarkit/gvar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"

namespace gvarkit {

namespace {

Eigen::MatrixXd solve_named(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            const std::vector<std::string>& labels) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const int k = static_cast<int>(x.cols());
  if (qr.rank() < k) {
    const auto perm = qr.colsPermutation().indices();
    std::string cols;
    for (int i = qr.rank(); i < k; ++i) {
      if (!cols.empty()) cols += ", ";
      cols += labels[perm[i]];
    }
    throw NumericError("collinear regressors: " + cols);
  }
  return qr.solve(y);
}

std::string checked_name(const std::string& name) {
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw DataError("name '" + name + "' contains whitespace and cannot be serialized");
    }
  }
  return name;
}

void append_matrix(std::string& out, const std::string& name, const Eigen::MatrixXd& m) {
  out += "matrix " + name + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) +
         "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_full_double(m(i, j));
    }
    out += '\n';
  }
}

void append_vector(std::string& out, const std::string& name, const Eigen::VectorXd& v) {
  out += "vector " + name + " " + std::to_string(v.size()) + "\n";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_full_double(v[i]);
  }
  out += '\n';
}

class TextReader {
 public:
  explicit TextReader(const std::string& text) : in_(text) {}

  std::vector<std::string> expect_line(const std::string& head) {
    std::string line;
    if (!std::getline(in_, line)) throw DataError("global model text ended before '" + head + "'");
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty() || tok[0] != head) {
      throw DataError("global model text: expected '" + head + "', found '" + line + "'");
    }
    return tok;
  }

  Eigen::MatrixXd read_matrix(const std::string& name) {
    const auto tok = expect_line("matrix");
    if (tok.size() != 4 || tok[1] != name) {
      throw DataError("global model text: expected matrix " + name);
    }
    const int rows = std::stoi(tok[2]), cols = std::stoi(tok[3]);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        if (!(in_ >> m(i, j))) throw DataError("global model text: truncated matrix " + name);
      }
    }
    in_.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    return m;
  }

  Eigen::VectorXd read_vector(const std::string& name) {
    const auto tok = expect_line("vector");
    if (tok.size() != 3 || tok[1] != name) {
      throw DataError("global model text: expected vector " + name);
    }
    const int n = std::stoi(tok[2]);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      if (!(in_ >> v[i])) throw DataError("global model text: truncated vector " + name);
    }
    in_.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    return v;
  }

 private:
  std::istringstream in_;
};

}  // namespace

Eigen::MatrixXd CountryModel::a_mat() const {
  Eigen::MatrixXd a(k, k + k_star);
  a.leftCols(k).setIdentity();
  a.rightCols(k_star) = -lambda0;
  return a;
}

Eigen::MatrixXd CountryModel::b_mat() const {
  Eigen::MatrixXd b(k, k + k_star);
  b.leftCols(k) = psi1;
  b.rightCols(k_star) = lambda1;
  return b;
}

int GlobalModel::label_index(const std::string& country, const std::string& variable) const {
  const std::string want = country + "." + variable;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == want) return static_cast<int>(i);
  }
  throw ConfigError("no global variable '" + want + "' in the model");
}

Eigen::MatrixXd build_star(const Panel& panel, const WeightMatrix& weights,
                           const std::string& country) {
  if (weights.mode != WeightMode::row_stochastic) {
    throw ConfigError("star variables require row-stochastic weights "
                      "(max-normalized weights are display-only)");
  }
  const int row = weights.index_of(country);
  const int t = panel.n_periods();
  const int nv = panel.n_variables();
  Eigen::MatrixXd star = Eigen::MatrixXd::Zero(t, nv);
  for (std::size_t j = 0; j < weights.countries.size(); ++j) {
    const double w = weights.w(row, static_cast<int>(j));
    if (w == 0.0) continue;
    star += w * panel.country_block(panel.country_index(weights.countries[j]));
  }
  return star;
}

VarxDesign build_varx_design(const Eigen::MatrixXd& block, const Eigen::MatrixXd& star,
                             Deterministic det) {
  const int t_total = static_cast<int>(block.rows());
  const int k = static_cast<int>(block.cols());
  const int ks = static_cast<int>(star.cols());
  if (star.rows() != t_total) throw DataError("country and star blocks are misaligned");
  if (t_total < 3) throw DataError("need at least three observations to build a lagged design");
  const int ndet = deterministic_count(det);
  const int rows = t_total - 1;

  VarxDesign d;
  d.x.resize(rows, k + 2 * ks + ndet);
  d.x.leftCols(k) = block.topRows(rows);
  for (int v = 0; v < k; ++v) d.labels.push_back("own_lag:var" + std::to_string(v + 1));
  d.x.middleCols(k, ks) = star.bottomRows(rows);
  for (int v = 0; v < ks; ++v) d.labels.push_back("star:var" + std::to_string(v + 1));
  d.x.middleCols(k + ks, ks) = star.topRows(rows);
  for (int v = 0; v < ks; ++v) d.labels.push_back("star_lag:var" + std::to_string(v + 1));
  d.x.rightCols(ndet) = deterministic_terms(rows, det);
  if (ndet >= 1) d.labels.push_back("const");
  if (ndet >= 2) d.labels.push_back("trend");
  d.y = block.bottomRows(rows);
  return d;
}

CountryModel estimate_varx(const Eigen::MatrixXd& block, const Eigen::MatrixXd& star,
                           Deterministic det, const std::string& country) {
  const int k = static_cast<int>(block.cols());
  const int ks = static_cast<int>(star.cols());
  const int ndet = deterministic_count(det);
  const int ncoef = k + 2 * ks + ndet;
  if (static_cast<int>(block.rows()) - 1 <= ncoef + 2) {
    throw DataError("sample too short to estimate a VARX*(1,1) with " + std::to_string(ncoef) +
                    " coefficients per equation");
  }

  const VarxDesign d = build_varx_design(block, star, det);
  const int rows = static_cast<int>(d.y.rows());
  const Eigen::MatrixXd& x = d.x;
  const Eigen::MatrixXd& y = d.y;
  const Eigen::MatrixXd coef = solve_named(x, y, d.labels);

  CountryModel m;
  m.country = country;
  m.k = k;
  m.k_star = ks;
  m.det = det;
  m.psi1 = coef.topRows(k).transpose();
  m.lambda0 = coef.middleRows(k, ks).transpose();
  m.lambda1 = coef.middleRows(k + ks, ks).transpose();
  m.a0 = ndet >= 1 ? coef.row(k + 2 * ks).transpose() : Eigen::VectorXd::Zero(k).eval();
  m.a1 = ndet >= 2 ? coef.row(k + 2 * ks + 1).transpose() : Eigen::VectorXd::Zero(k).eval();
  m.residuals = y - x * coef;
  m.sigma = m.residuals.transpose() * m.residuals / double(rows - ncoef);
  return m;
}

LinkMatrix build_link(const std::vector<std::string>& countries, int n_vars,
                      const WeightMatrix& weights, const std::string& country) {
  if (n_vars < 1) throw ConfigError("link matrix needs at least one variable per country");
  const int n = static_cast<int>(countries.size());
  const int k = n * n_vars;
  int own = -1;
  for (int i = 0; i < n; ++i) {
    if (countries[i] == country) own = i;
  }
  if (own < 0) throw ConfigError("country '" + country + "' missing from the global ordering");
  const int wrow = weights.index_of(country);

  LinkMatrix link;
  link.country = country;
  link.w = Eigen::MatrixXd::Zero(2 * n_vars, k);
  for (int v = 0; v < n_vars; ++v) {
    link.w(v, own * n_vars + v) = 1.0;  // selector rows
  }
  for (int v = 0; v < n_vars; ++v) {
    for (int j = 0; j < n; ++j) {
      if (j == own) continue;
      link.w(n_vars + v, j * n_vars + v) = weights.w(wrow, weights.index_of(countries[j]));
    }
  }
  return link;
}

GlobalModel stack_global(const std::vector<CountryModel>& models,
                         const std::vector<LinkMatrix>& links,
                         const std::vector<std::string>& variables, double cond_limit) {
  if (models.empty()) throw ConfigError("cannot stack an empty set of country models");
  if (models.size() != links.size()) {
    throw ConfigError("country model and link matrix counts differ");
  }
  const int n_vars = static_cast<int>(variables.size());
  int k = 0;
  for (const auto& m : models) {
    if (m.k != n_vars) {
      throw ConfigError("country " + m.country + " has " + std::to_string(m.k) +
                        " variables, expected " + std::to_string(n_vars));
    }
    k += m.k;
  }

  GlobalModel gm;
  gm.variables = variables;
  gm.det = models.front().det;
  gm.g.resize(k, k);
  gm.h.resize(k, k);
  gm.a0.resize(k);
  gm.a1.resize(k);
  gm.sigma_eps = Eigen::MatrixXd::Zero(k, k);

  int row = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const CountryModel& m = models[i];
    const LinkMatrix& link = links[i];
    if (link.country != m.country) {
      throw ConfigError("country model order does not match link matrix order (" + m.country +
                        " vs " + link.country + ")");
    }
    if (link.w.rows() != m.k + m.k_star || link.w.cols() != k) {
      throw ConfigError("link matrix for " + m.country + " has inconsistent dimensions");
    }
    gm.countries.push_back(m.country);
    for (const auto& v : variables) gm.labels.push_back(m.country + "." + v);
    gm.g.middleRows(row, m.k) = m.a_mat() * link.w;
    gm.h.middleRows(row, m.k) = m.b_mat() * link.w;
    gm.a0.segment(row, m.k) = m.a0;
    gm.a1.segment(row, m.k) = m.a1;
    gm.sigma_eps.block(row, row, m.k, m.k) = m.sigma;
    row += m.k;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gm.g);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  gm.g_condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(gm.g_condition < cond_limit)) {
    // Identify the country whose own diagonal block is closest to singular.
    std::string worst = models.front().country;
    double worst_cond = 0.0;
    int off = 0;
    for (const auto& m : models) {
      Eigen::JacobiSVD<Eigen::MatrixXd> bs(gm.g.block(off, off, m.k, m.k));
      const double bmin = bs.singularValues().minCoeff();
      const double bc = bmin > 0.0 ? bs.singularValues().maxCoeff() / bmin
                                   : std::numeric_limits<double>::infinity();
      if (bc > worst_cond) {
        worst_cond = bc;
        worst = m.country;
      }
      off += m.k;
    }
    throw NumericError("global contemporaneous matrix G is ill-conditioned (condition " +
                       format_fixed(gm.g_condition, 3) + " exceeds the limit); worst country " +
                       "block: " + worst);
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(gm.g);
  gm.f = lu.solve(gm.h);
  gm.b0 = lu.solve(gm.a0);
  gm.b1 = lu.solve(gm.a1);
  const Eigen::MatrixXd g_inv = lu.inverse();
  Eigen::MatrixXd se = g_inv * gm.sigma_eps * g_inv.transpose();
  gm.sigma_e = 0.5 * (se + se.transpose());
  return gm;
}

GlobalModel estimate_gvar(const Panel& panel, const WeightMatrix& weights, Deterministic det,
                          double cond_limit) {
  std::vector<CountryModel> models;
  std::vector<LinkMatrix> links;
  for (const auto& country : weights.countries) {
    const Eigen::MatrixXd block = panel.country_block(panel.country_index(country));
    const Eigen::MatrixXd star = build_star(panel, weights, country);
    models.push_back(estimate_varx(block, star, det, country));
    links.push_back(build_link(weights.countries, panel.n_variables(), weights, country));
  }
  GlobalModel gm = stack_global(models, links, panel.variables(), cond_limit);
  gm.trend_last = panel.n_periods() - 1;  // trend is 1-based over T-1 sample rows
  return gm;
}

Eigen::VectorXd iterate_global(const GlobalModel& model, const Eigen::VectorXd& x_prev,
                               double trend_value) {
  if (x_prev.size() != model.k()) throw DataError("state vector does not match model dimension");
  return model.b0 + model.b1 * trend_value + model.f * x_prev;
}

std::string global_model_to_text(const GlobalModel& model) {
  std::string out = "gvarkit global model 1\n";
  out += "countries " + std::to_string(model.countries.size());
  for (const auto& c : model.countries) out += " " + checked_name(c);
  out += "\nvariables " + std::to_string(model.variables.size());
  for (const auto& v : model.variables) out += " " + checked_name(v);
  out += "\ndet " + to_string(model.det) + "\n";
  out += "trend_last " + std::to_string(model.trend_last) + "\n";
  out += "g_condition " + format_full_double(model.g_condition) + "\n";
  append_matrix(out, "G", model.g);
  append_matrix(out, "H", model.h);
  append_vector(out, "a0", model.a0);
  append_vector(out, "a1", model.a1);
  append_matrix(out, "sigma_eps", model.sigma_eps);
  append_vector(out, "b0", model.b0);
  append_vector(out, "b1", model.b1);
  append_matrix(out, "F", model.f);
  append_matrix(out, "sigma_e", model.sigma_e);
  out += "end\n";
  return out;
}

GlobalModel global_model_from_text(const std::string& text) {
  TextReader reader(text);
  {
    std::istringstream head(text);
    std::string line;
    std::getline(head, line);
    if (line != "gvarkit global model 1") {
      throw DataError("not a gvarkit global model file (bad header)");
    }
  }
  reader.expect_line("gvarkit");

  GlobalModel m;
  auto tok = reader.expect_line("countries");
  for (std::size_t i = 2; i < tok.size(); ++i) m.countries.push_back(tok[i]);
  if (tok.size() < 2 || m.countries.size() != std::stoul(tok[1])) {
    throw DataError("global model text: country list does not match its declared count");
  }
  tok = reader.expect_line("variables");
  for (std::size_t i = 2; i < tok.size(); ++i) m.variables.push_back(tok[i]);
  if (tok.size() < 2 || m.variables.size() != std::stoul(tok[1])) {
    throw DataError("global model text: variable list does not match its declared count");
  }
  tok = reader.expect_line("det");
  if (tok.size() != 2) throw DataError("global model text: malformed det line");
  m.det = deterministic_from_string(tok[1]);
  tok = reader.expect_line("trend_last");
  if (tok.size() != 2) throw DataError("global model text: malformed trend_last line");
  m.trend_last = std::stoi(tok[1]);
  tok = reader.expect_line("g_condition");
  if (tok.size() != 2) throw DataError("global model text: malformed g_condition line");
  m.g_condition = parse_double(tok[1], "g_condition");

  for (const auto& c : m.countries) {
    for (const auto& v : m.variables) m.labels.push_back(c + "." + v);
  }
  const int k = m.k();
  m.g = reader.read_matrix("G");
  m.h = reader.read_matrix("H");
  m.a0 = reader.read_vector("a0");
  m.a1 = reader.read_vector("a1");
  m.sigma_eps = reader.read_matrix("sigma_eps");
  m.b0 = reader.read_vector("b0");
  m.b1 = reader.read_vector("b1");
  m.f = reader.read_matrix("F");
  m.sigma_e = reader.read_matrix("sigma_e");
  reader.expect_line("end");
  if (m.g.rows() != k || m.f.cols() != k || m.sigma_e.rows() != k) {
    throw DataError("global model text: matrix dimensions do not match the label count");
  }
  return m;
}

void save_global_model(const GlobalModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << global_model_to_text(model);
  if (!out) throw DataError("write failed for '" + path + "'");
}

GlobalModel load_global_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return global_model_from_text(ss.str());
}

}  // namespace gvarkit
