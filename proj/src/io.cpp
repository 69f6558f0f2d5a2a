#include "singvecm/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "singvecm/errors.hpp"

namespace singvecm {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

ordered_json poly_to_json(const PolyMatrix& p) {
  ordered_json arr = ordered_json::array();
  for (const Eigen::MatrixXd& c : p.coeffs()) arr.push_back(matrix_to_json(c));
  return arr;
}

double number_at(const ordered_json& j, const std::string& origin, const std::string& where) {
  if (!j.is_number()) fail(origin, where + " must be a number");
  return j.get<double>();
}

Eigen::MatrixXd matrix_from_json(const ordered_json& j, const std::string& origin,
                                 const std::string& key, int rows, int cols) {
  if (!j.is_array()) fail(origin, "'" + key + "' must be an array of rows");
  if (static_cast<int>(j.size()) != rows) {
    fail(origin, "'" + key + "' must have " + std::to_string(rows) + " rows, found " +
                     std::to_string(j.size()));
  }
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const ordered_json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      fail(origin, "'" + key + "' row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (int k = 0; k < cols; ++k) {
      m(i, k) = number_at(row.at(static_cast<std::size_t>(k)), origin,
                          "'" + key + "' entry (" + std::to_string(i) + "," + std::to_string(k) + ")");
    }
  }
  return m;
}

PolyMatrix poly_from_json(const ordered_json& j, const std::string& origin,
                          const std::string& key, int rows, int cols) {
  if (!j.is_array()) fail(origin, "'" + key + "' must be an array of coefficient matrices");
  if (j.empty()) return PolyMatrix::zero(rows, cols);
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    coeffs.push_back(
        matrix_from_json(j.at(k), origin, key + "[" + std::to_string(k) + "]", rows, cols));
  }
  return PolyMatrix(std::move(coeffs));
}

int int_field(const ordered_json& doc, const std::string& origin, const std::string& key) {
  const ordered_json& j = doc.at(key);
  if (!j.is_number_integer()) fail(origin, "'" + key + "' must be an integer");
  return j.get<int>();
}

void check_keys(const ordered_json& doc, const std::string& origin,
                const std::set<std::string>& valid) {
  if (!doc.is_object()) fail(origin, "top level must be an object");
  for (const auto& item : doc.items()) {
    if (valid.count(item.key()) == 0) {
      std::string keys;
      for (const std::string& k : valid) {
        if (!keys.empty()) keys += ", ";
        keys += k;
      }
      fail(origin, "unknown key '" + item.key() + "'; valid keys: " + keys);
    }
  }
  for (const std::string& k : valid) {
    if (!doc.contains(k)) fail(origin, "missing key '" + k + "'");
  }
}

ordered_json parse_json(const std::string& text, const std::string& origin) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(origin, "not valid JSON");
  return doc;
}

std::string csv_row_prefix(int t) { return std::to_string(t); }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string spec_to_json(const I1FamilySpec& spec) {
  ordered_json doc;
  doc["r"] = spec.r;
  doc["q"] = spec.q;
  doc["c"] = spec.c;
  doc["xi"] = matrix_to_json(spec.xi);
  doc["eta"] = matrix_to_json(spec.eta);
  doc["D"] = matrix_to_json(spec.D);
  doc["E"] = poly_to_json(spec.E);
  doc["S"] = poly_to_json(spec.S);
  doc["gamma_u"] = matrix_to_json(spec.gamma_u);
  return doc.dump(2) + "\n";
}

I1FamilySpec spec_from_json_text(const std::string& text, const std::string& origin) {
  const ordered_json doc = parse_json(text, origin);
  check_keys(doc, origin, {"r", "q", "c", "xi", "eta", "D", "E", "S", "gamma_u"});
  I1FamilySpec spec;
  spec.r = int_field(doc, origin, "r");
  spec.q = int_field(doc, origin, "q");
  spec.c = int_field(doc, origin, "c");
  if (spec.r < 1 || spec.q < 1 || spec.q >= spec.r) fail(origin, "need r > q >= 1");
  spec.d = spec.c - (spec.r - spec.q);
  const int common = spec.r - spec.c;  // columns of xi and eta, equals q - d
  if (common < 1 || spec.d < 0) fail(origin, "c must lie in [r-q, r-q+q-1] so that 0 <= d < q");
  spec.xi = matrix_from_json(doc.at("xi"), origin, "xi", spec.r, common);
  spec.eta = matrix_from_json(doc.at("eta"), origin, "eta", spec.q, common);
  spec.D = matrix_from_json(doc.at("D"), origin, "D", spec.r, spec.q);
  spec.E = poly_from_json(doc.at("E"), origin, "E", spec.r, spec.q);
  spec.S = poly_from_json(doc.at("S"), origin, "S", spec.r, spec.r);
  spec.gamma_u = matrix_from_json(doc.at("gamma_u"), origin, "gamma_u", spec.q, spec.q);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    fail(origin, std::string("invalid family: ") + e.what());
  }
  return spec;
}

std::string granger_to_json(const GrangerRep& rep) {
  ordered_json doc;
  doc["A"] = poly_to_json(rep.A);
  doc["A_star"] = poly_to_json(rep.A_star);
  doc["alpha"] = matrix_to_json(rep.alpha);
  doc["beta"] = matrix_to_json(rep.beta);
  doc["h"] = vector_to_json(rep.h);
  doc["C0"] = matrix_to_json(rep.C0);
  return doc.dump(2) + "\n";
}

std::string pt_to_json(const PtDecomp& pt) {
  ordered_json doc;
  doc["G1"] = poly_to_json(pt.G1);
  doc["G2"] = poly_to_json(pt.G2);
  doc["xi"] = matrix_to_json(pt.xi);
  return doc.dump(2) + "\n";
}

std::string path_csv(const SimPath& path) {
  const auto F = path.F();
  const auto u = path.u();
  std::ostringstream os;
  os << "t";
  for (Eigen::Index j = 0; j < F.cols(); ++j) os << ",F" << (j + 1);
  for (Eigen::Index j = 0; j < u.cols(); ++j) os << ",u" << (j + 1);
  os << "\n";
  for (Eigen::Index t = 0; t < F.rows(); ++t) {
    os << csv_row_prefix(static_cast<int>(t));
    for (Eigen::Index j = 0; j < F.cols(); ++j) os << ',' << format_double(F(t, j));
    for (Eigen::Index j = 0; j < u.cols(); ++j) os << ',' << format_double(u(t, j));
    os << "\n";
  }
  return os.str();
}

std::string panel_csv(const Eigen::MatrixXd& x) {
  std::ostringstream os;
  os << "t";
  for (Eigen::Index j = 0; j < x.cols(); ++j) os << ",x" << (j + 1);
  os << "\n";
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    os << csv_row_prefix(static_cast<int>(t));
    for (Eigen::Index j = 0; j < x.cols(); ++j) os << ',' << format_double(x(t, j));
    os << "\n";
  }
  return os.str();
}

std::string irf_csv(const IrfSet& irf) {
  std::ostringstream os;
  os << "lag";
  const Eigen::Index r = irf.level_coeffs.empty() ? 0 : irf.level_coeffs[0].rows();
  const Eigen::Index q = irf.level_coeffs.empty() ? 0 : irf.level_coeffs[0].cols();
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) os << ",response_" << (i + 1) << "_shock_" << (j + 1);
  }
  os << "\n";
  for (std::size_t lag = 0; lag < irf.level_coeffs.size(); ++lag) {
    os << lag;
    const Eigen::MatrixXd& m = irf.level_coeffs[lag];
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < q; ++j) os << ',' << format_double(m(i, j));
    }
    os << "\n";
  }
  return os.str();
}

std::string mc_csv(const McTable& table) {
  std::ostringstream os;
  os << "T,lag,estimator,rmse,n_reps,n_failures\n";
  for (const McEntry& e : table.entries) {
    os << e.T << ',' << e.lag << ',' << estimator_name(e.estimator) << ','
       << format_double(e.rmse) << ',' << e.n_reps << ',' << e.n_failures << "\n";
  }
  return os.str();
}

std::string mc_markdown(const McTable& table) {
  std::ostringstream os;
  os << "# Impulse-response RMSE by estimator\n\n";
  os << "Seed " << table.config.seed << ", " << table.config.replications
     << " replications per sample length, config digest " << table.config_digest << ".\n";
  for (const int T : table.config.T_list) {
    os << "\n## T = " << T << "\n\n";
    os << "| estimator |";
    for (const int lag : table.config.lags_report) os << " lag " << lag << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < table.config.lags_report.size(); ++i) os << "---|";
    os << "\n";
    for (const Estimator est : table.config.estimators) {
      os << "| " << estimator_name(est) << " |";
      for (const int lag : table.config.lags_report) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", table.rmse(T, lag, est));
        os << ' ' << buf << " |";
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw ConfigError("read failed: " + path);
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace singvecm
