#include "rcp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rcp::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream iss(s);
  while (std::getline(iss, cur, delim)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == delim) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s == "inf" || s == "Inf" || s == "INF") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

CsvData read_csv_matrix(std::istream& in, const std::string& name) {
  CsvData data;
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (rows.empty() && !data.has_header) {
      // header detection: any cell that does not parse as a number
      bool numeric = true;
      double tmp;
      for (const auto& c : cells) {
        if (!parse_double(c, tmp)) {
          numeric = false;
          break;
        }
      }
      if (!numeric) {
        data.header = cells;
        data.has_header = true;
        width = cells.size();
        continue;
      }
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw CsvError(name + ": row " + std::to_string(lineno) + " has " +
                     std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    }
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j) {
      double v;
      if (!parse_double(cells[j], v) || !std::isfinite(v)) {
        throw CsvError(name + ": non-numeric cell at row " + std::to_string(lineno) +
                       ", column " + std::to_string(j + 1) + " ('" + cells[j] + "')");
      }
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(name + ": no data rows");
  data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return data;
}

CsvData read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CsvError("cannot open file: " + path);
  return read_csv_matrix(f, path);
}

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  out << std::setprecision(17);
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      out << header[j] << (j + 1 < header.size() ? "," : "\n");
    }
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << m(i, j) << (j + 1 < m.cols() ? "," : "\n");
    }
  }
}

void write_csv_file(const std::string& path, const Eigen::MatrixXd& m,
                    const std::vector<std::string>& header) {
  std::ofstream f(path);
  if (!f) throw CsvError("cannot open file for writing: " + path);
  write_csv_matrix(f, m, header);
}

// ---------------------------------------------------------------------------
// experiment config

namespace {

struct Line {
  int no;
  std::string text;
};

[[noreturn]] void fail(const std::string& name, int lineno, const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(lineno) + ": " + msg);
}

double require_double(const std::string& name, int lineno, const std::string& value) {
  double v;
  if (!parse_double(value, v)) fail(name, lineno, "expected a number, got '" + value + "'");
  return v;
}

Eigen::VectorXd parse_vector(const std::string& name, int lineno, const std::string& value) {
  const auto parts = split(value, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = require_double(name, lineno, parts[i]);
  }
  return v;
}

bool parse_on_off(const std::string& name, int lineno, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  fail(name, lineno, "expected on/off, got '" + value + "'");
}

BandwidthRule bw_rule_from(const std::string& name, int lineno, const std::string& value,
                           double& fixed) {
  if (value == "default") return BandwidthRule::Default;
  if (value == "bandmulti") return BandwidthRule::Bandmulti;
  if (value == "mq") return BandwidthRule::Mq;
  double v;
  if (parse_double(value, v) && v > 0.0) {
    fixed = v;
    return BandwidthRule::Fixed;
  }
  fail(name, lineno, "bad bandwidth rule '" + value + "'");
}

MethodSpec parse_method_tokens(const std::string& name, int lineno, const std::string& text) {
  std::istringstream iss(text);
  std::string id;
  iss >> id;
  if (id.empty()) fail(name, lineno, "empty method spec");

  MethodSpec spec;
  spec.name = id;
  std::vector<std::pair<std::string, std::string>> kvs;
  std::string tok;
  while (iss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected key=value, got '" + tok + "'");
    kvs.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }

  if (id == "md" || id == "gmd") {
    BaselineMethod bm;
    bm.estimator = id == "md" ? ScaleEstimator::MD : ScaleEstimator::GMD;
    for (const auto& [key, value] : kvs) {
      if (key == "correction") bm.correction = parse_on_off(name, lineno, value);
      else if (key == "name") spec.name = value;
      else fail(name, lineno, "unknown key '" + key + "' for method " + id);
    }
    spec.method = bm;
    return spec;
  }

  PsiMethod pm;
  pm.variant = [&] {
    try {
      return psi_variant_from_name(id == "cov" ? "hcov" : id);
    } catch (const std::exception& e) {
      fail(name, lineno, e.what());
    }
  }();
  if (id == "cov") pm.k = kInfiniteK;  // classical covariance baseline
  bool named = false;
  for (const auto& [key, value] : kvs) {
    if (key == "level") pm.chi2_level = require_double(name, lineno, value);
    else if (key == "k") pm.k = require_double(name, lineno, value);
    else if (key == "bw") pm.bw_rule = bw_rule_from(name, lineno, value, pm.bw_fixed);
    else if (key == "functional") {
      if (value == "sup") pm.functional = Functional::Sup;
      else if (value == "integral") pm.functional = Functional::Integral;
      else fail(name, lineno, "unknown functional '" + value + "'");
    } else if (key == "correction") pm.correction = parse_on_off(name, lineno, value);
    else if (key == "literal") pm.literal_marginal_cov = parse_on_off(name, lineno, value);
    else if (key == "a") pm.direction = parse_vector(name, lineno, value);
    else if (key == "name") { spec.name = value; named = true; }
    else fail(name, lineno, "unknown key '" + key + "' for method " + id);
  }
  if (!named) {
    std::ostringstream label;
    label << id;
    if (pm.chi2_level) label << *pm.chi2_level;
    else if (!std::isinf(pm.k)) label << "_k" << pm.k;
    spec.name = label.str();
  }
  spec.method = pm;
  return spec;
}

Eigen::MatrixXd parse_sigma(const std::string& name, int lineno, const std::string& value) {
  if (value == "sigma_two") return sigma_two();
  if (value == "identity4") return Eigen::MatrixXd::Identity(4, 4);
  const std::string prefix = "sigma_delta(";
  if (value.rfind(prefix, 0) == 0 && value.back() == ')') {
    const double d =
        require_double(name, lineno, value.substr(prefix.size(), value.size() - prefix.size() - 1));
    return sigma_delta(d);
  }
  fail(name, lineno, "unknown covariance matrix '" + value + "'");
}

}  // namespace

MethodSpec parse_method_spec(const std::string& text) {
  return parse_method_tokens("<method>", 1, text);
}

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& name) {
  ExperimentConfig cfg;
  cfg.methods.clear();

  std::string section;
  std::string line;
  int lineno = 0;
  std::string gen_kind;
  std::map<std::string, std::pair<int, std::string>> gen_kv;
  std::map<std::string, std::pair<int, std::string>> brk_kv;
  bool has_break = false;

  while (std::getline(in, line)) {
    ++lineno;
    // strip comments (';' or '#')
    const auto cpos = line.find_first_of(";#");
    if (cpos != std::string::npos) line = line.substr(0, cpos);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(name, lineno, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section != "generator" && section != "break" && section != "methods" &&
          section != "run") {
        fail(name, lineno, "unknown section [" + section + "]");
      }
      if (section == "break") has_break = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section.empty()) fail(name, lineno, "key outside any section");

    if (section == "generator") {
      if (key == "kind") gen_kind = value;
      else gen_kv[key] = {lineno, value};
    } else if (section == "break") {
      brk_kv[key] = {lineno, value};
    } else if (section == "methods") {
      if (key != "method") fail(name, lineno, "only 'method = ...' lines allowed in [methods]");
      cfg.methods.push_back(parse_method_tokens(name, lineno, value));
    } else {  // run
      if (key == "alpha") cfg.alpha = require_double(name, lineno, value);
      else if (key == "n_rep") cfg.n_rep = static_cast<int>(require_double(name, lineno, value));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(require_double(name, lineno, value));
      else if (key == "threads") cfg.threads = static_cast<int>(require_double(name, lineno, value));
      else if (key == "mc_rep") cfg.mc.n_rep = static_cast<int>(require_double(name, lineno, value));
      else if (key == "mc_grid") cfg.mc.n_grid = static_cast<int>(require_double(name, lineno, value));
      else if (key == "sweep") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) fail(name, lineno, "sweep syntax: param : v1, v2, ...");
        try {
          cfg.sweep = sweep_param_from_name(trim(value.substr(0, colon)));
        } catch (const std::exception& e) {
          fail(name, lineno, e.what());
        }
        for (const auto& v : split(value.substr(colon + 1), ',')) {
          if (v.empty()) continue;
          cfg.sweep_values.push_back(require_double(name, lineno, v));
        }
        if (cfg.sweep_values.empty()) fail(name, lineno, "sweep has no values");
      } else {
        fail(name, lineno, "unknown key '" + key + "' in [run]");
      }
    }
  }

  // generator
  auto take = [&](std::map<std::string, std::pair<int, std::string>>& kv, const std::string& key)
      -> std::optional<std::pair<int, std::string>> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto out = it->second;
    kv.erase(it);
    return out;
  };

  if (gen_kind == "arch1") {
    Arch1Spec g;
    if (auto v = take(gen_kv, "pi0")) g.pi0 = require_double(name, v->first, v->second);
    if (auto v = take(gen_kv, "pi1")) g.pi1 = require_double(name, v->first, v->second);
    if (auto v = take(gen_kv, "T")) g.t = static_cast<int>(require_double(name, v->first, v->second));
    if (auto v = take(gen_kv, "burn_in")) g.burn_in = static_cast<int>(require_double(name, v->first, v->second));
    cfg.generator = g;
  } else if (gen_kind == "var1") {
    Var1Spec g;
    if (auto v = take(gen_kv, "rho")) g.rho = require_double(name, v->first, v->second);
    if (auto v = take(gen_kv, "p")) g.p = static_cast<int>(require_double(name, v->first, v->second));
    if (auto v = take(gen_kv, "df")) g.df = require_double(name, v->first, v->second);
    if (auto v = take(gen_kv, "T")) g.t = static_cast<int>(require_double(name, v->first, v->second));
    if (auto v = take(gen_kv, "burn_in")) g.burn_in = static_cast<int>(require_double(name, v->first, v->second));
    if (auto v = take(gen_kv, "shape")) g.shape = parse_sigma(name, v->first, v->second);
    cfg.generator = g;
  } else if (gen_kind.empty()) {
    throw ConfigError(name + ": missing [generator] kind");
  } else {
    throw ConfigError(name + ": unknown generator kind '" + gen_kind + "'");
  }
  if (!gen_kv.empty()) {
    const auto& [key, lv] = *gen_kv.begin();
    fail(name, lv.first, "unknown generator key '" + key + "'");
  }

  // break
  if (has_break) {
    std::string kind = "none";
    if (auto v = take(brk_kv, "kind")) kind = v->second;
    if (kind == "none") {
      cfg.brk.kind = BreakDesign::Kind::None;
    } else if (kind == "scale_jump") {
      cfg.brk.kind = BreakDesign::Kind::ScaleJump;
      if (auto v = take(brk_kv, "s")) cfg.brk.s_mag = require_double(name, v->first, v->second);
      if (auto v = take(brk_kv, "delta")) cfg.brk.delta = require_double(name, v->first, v->second);
      if (auto v = take(brk_kv, "b")) cfg.brk.b = require_double(name, v->first, v->second);
    } else if (kind == "cov_switch") {
      cfg.brk.kind = BreakDesign::Kind::CovSwitch;
      if (auto v = take(brk_kv, "t_switch")) {
        cfg.brk.t_switch = static_cast<int>(require_double(name, v->first, v->second));
      }
      if (auto v = take(brk_kv, "sigma_after")) {
        cfg.brk.sigma_after = parse_sigma(name, v->first, v->second);
      } else {
        throw ConfigError(name + ": cov_switch requires sigma_after");
      }
    } else {
      throw ConfigError(name + ": unknown break kind '" + kind + "'");
    }
    if (!brk_kv.empty()) {
      const auto& [key, lv] = *brk_kv.begin();
      fail(name, lv.first, "unknown break key '" + key + "'");
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse_experiment_config(f, path);
}

std::string rate_table_csv(const RateTable& table) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "scenario,param,value,method,rate,mc_se,n_fail,n_rep\n";
  for (const auto& r : table.rows) {
    out << r.scenario << ',' << r.param << ',' << r.value << ',' << r.method << ',' << r.rate
        << ',' << r.mc_se << ',' << r.n_fail << ',' << r.n_rep << '\n';
  }
  return out.str();
}

std::string rate_table_json(const RateTable& table, const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["alpha"] = cfg.alpha;
  j["n_rep"] = cfg.n_rep;
  j["seed"] = cfg.seed;
  j["sweep"] = sweep_param_name(cfg.sweep);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row;
    row["scenario"] = r.scenario;
    row["param"] = r.param;
    row["value"] = r.value;
    row["method"] = r.method;
    if (std::isnan(r.rate)) row["rate"] = nullptr;
    else row["rate"] = r.rate;
    row["mc_se"] = r.mc_se;
    row["n_fail"] = r.n_fail;
    row["n_rep"] = r.n_rep;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2);
}

std::string plot_series_csv(const RateTable& table, const std::string& method) {
  std::ostringstream out;
  out << std::setprecision(10) << "x,rate\n";
  for (const auto& r : table.rows) {
    if (r.method == method) out << r.value << ',' << r.rate << '\n';
  }
  return out.str();
}

}  // namespace rcp::io
