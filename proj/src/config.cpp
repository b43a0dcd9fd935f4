#include "wgfc/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wgfc/errors.hpp"
#include "wgfc/expr.hpp"
#include "wgfc/identities.hpp"
#include "wgfc/mlf.hpp"
#include "wgfc/operators.hpp"
#include "wgfc/variational.hpp"

namespace wgfc::cli {

using nlohmann::ordered_json;

// ------------------------------------------------------------- key access

static std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return key;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end())
    throw ConfigError("missing required key '" + key + "' for command '" + command + "'",
                      key, 0);
  return it->second.first;
}

std::string RunConfig::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second.first;
}

static double parse_real(const std::string& key, const std::string& text, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + text + "'", key, line);
  }
}

double RunConfig::get_real(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) return parse_real(key, get(key), 0);  // throws missing-key
  return parse_real(key, it->second.first, it->second.second);
}

double RunConfig::get_real_or(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

std::size_t RunConfig::get_index(const std::string& key) const {
  const double v = get_real(key);
  if (v < 0 || v != std::floor(v))
    throw ConfigError("key '" + key + "' expects a nonnegative integer", key,
                      values.at(key).second);
  return static_cast<std::size_t>(v);
}

std::size_t RunConfig::get_index_or(const std::string& key, std::size_t fallback) const {
  return has(key) ? get_index(key) : fallback;
}

void RunConfig::set(const std::string& key, const std::string& value, int line) {
  values[normalize_key(key)] = {value, line};
}

// ----------------------------------------------------------- file parsing

static std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "config", 0);

  RunConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw ConfigError("malformed section header", "section", line);
      continue;  // sections only group keys visually
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", trim(text), line);
    const std::string key = normalize_key(trim(text.substr(0, eq)));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", key, line);
    if (value.empty()) throw ConfigError("empty value for key '" + key + "'", key, line);
    if (key == "command") {
      cfg.command = value;
      continue;
    }
    if (cfg.values.count(key))
      throw ConfigError("duplicate key '" + key + "'", key, line);
    cfg.values[key] = {value, line};
  }
  return cfg;
}

RunConfig parse_command_line(int argc, const char* const* argv) {
  RunConfig flags;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--", 0) == 0) {
      const std::string key = normalize_key(arg.substr(2));
      if (i + 1 >= argc)
        throw ConfigError("flag '" + arg + "' needs a value", key, 0);
      const std::string value = argv[++i];
      if (key == "config")
        config_path = value;
      else if (key == "command")
        flags.command = value;
      else
        flags.values[key] = {value, 0};
    } else if (flags.command.empty()) {
      flags.command = arg;
    } else {
      throw ConfigError("unexpected positional argument '" + arg + "'", arg, 0);
    }
  }

  RunConfig cfg;
  if (!config_path.empty()) cfg = parse_config_file(config_path);
  if (!flags.command.empty()) cfg.command = flags.command;  // flags win
  for (const auto& [k, v] : flags.values) cfg.values[k] = v;
  return cfg;
}

// ------------------------------------------------------------- validation

namespace {

struct CommandSpec {
  std::vector<std::string> required;
  std::vector<std::string> allowed;  // includes required
};

const std::map<std::string, CommandSpec>& command_table() {
  static const std::vector<std::string> common = {"output", "format", "threshold", "exec"};
  auto with_common = [](std::vector<std::string> keys) {
    keys.insert(keys.end(), common.begin(), common.end());
    return keys;
  };
  static const std::map<std::string, CommandSpec> table = {
      {"ml-eval", {{"beta", "z"}, with_common({"beta", "z", "abs_tol", "max_terms"})}},
      {"frac-int",
       {{"a", "b", "n", "alpha", "beta", "f"},
        with_common({"a", "b", "n", "alpha", "beta", "f", "w", "normalization", "side"})}},
      {"frac-deriv",
       {{"a", "b", "n", "alpha", "beta", "f"},
        with_common({"a", "b", "n", "alpha", "beta", "f", "w", "normalization", "side",
                     "series_tol", "max_terms", "sidecar"})}},
      {"verify-inverse",
       {{"a", "b", "n", "alpha", "beta", "f", "side"},
        with_common({"a", "b", "n", "alpha", "beta", "f", "side", "w", "normalization",
                     "n_list", "series_tol", "max_terms"})}},
      {"verify-ibp",
       {{"a", "b", "n", "identity", "beta", "f", "g"},
        with_common({"a", "b", "n", "identity", "operator", "alpha", "beta", "f", "g", "w",
                     "normalization", "n_list", "series_tol", "max_terms"})}},
      {"verify-ab",
       {{"a", "b", "n", "alpha", "f", "g"},
        with_common({"a", "b", "n", "alpha", "f", "g", "n_list", "series_tol",
                     "max_terms"})}},
      {"el-residual",
       {{"a", "b", "n", "alpha", "beta", "x"},
        with_common({"a", "b", "n", "alpha", "beta", "x", "w", "normalization", "form", "m",
                     "v", "c2", "c3", "c4", "f2", "f3", "f4", "band", "series_tol",
                     "max_terms"})}},
      {"solve-variational",
       {{"a", "b", "n", "alpha", "beta", "x_a", "x_b"},
        with_common({"a", "b", "n", "alpha", "beta", "x_a", "x_b", "x_init", "w",
                     "normalization", "form", "m", "v", "c2", "c3", "c4", "f2", "f3", "f4",
                     "max_iters", "grad_tol", "step_control", "fixed_step", "band",
                     "series_tol", "max_terms"})}},
      {"newton-law",
       {{"a", "b", "n", "alpha", "beta", "m", "v", "x"},
        with_common({"a", "b", "n", "alpha", "beta", "m", "v", "x", "w", "normalization",
                     "band", "series_tol", "max_terms"})}},
  };
  return table;
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.command.empty())
    throw ConfigError("no command given (config key 'command' or first argument)",
                      "command", 0);
  const auto& table = command_table();
  auto it = table.find(cfg.command);
  if (it == table.end())
    throw ConfigError("unknown command '" + cfg.command + "'", "command", 0);
  const CommandSpec& spec = it->second;
  for (const auto& [key, value] : cfg.values) {
    if (std::find(spec.allowed.begin(), spec.allowed.end(), key) == spec.allowed.end())
      throw ConfigError("unknown key '" + key + "' for command '" + cfg.command + "'",
                        key, value.second);
  }
  for (const auto& key : spec.required)
    if (!cfg.has(key)) cfg.get(key);  // throws with the key name
}

// --------------------------------------------------------------- helpers

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path + "'");
  out << contents;
}

std::string default_format(const std::string& command) {
  if (command.rfind("verify", 0) == 0 || command == "ml-eval") return "json";
  return "csv";
}

expr::Expr parse_expr_key(const RunConfig& cfg, const std::string& key) {
  const std::string text = cfg.get(key);
  try {
    return expr::parse(text);
  } catch (const Error& e) {
    throw ConfigError("key '" + key + "': " + e.what(), key,
                      cfg.values.at(key).second);
  }
}

RealFn fn_of(const expr::Expr& e) {
  return [e](double x) { return expr::eval(e, x); };
}

WeightFunction weight_of(const RunConfig& cfg) {
  if (!cfg.has("w")) return unit_weight();
  const expr::Expr w = parse_expr_key(cfg, "w");
  const expr::Expr dw = expr::differentiate(w);
  return WeightFunction{fn_of(w), fn_of(dw), cfg.get("w")};
}

Normalization normalization_of(const RunConfig& cfg) {
  const std::string text = cfg.get_or("normalization", "constant-one");
  const std::string key = normalize_key(text);
  if (key == "constant_one") return Normalization::ConstantOne;
  if (key == "one_minus_alpha_plus_alpha_over_gamma" || key == "ab_style")
    return Normalization::OneMinusAlphaPlusAlphaOverGamma;
  throw ConfigError("unknown normalization '" + text + "'", "normalization",
                    cfg.values.at("normalization").second);
}

Side side_of(const RunConfig& cfg, const std::string& fallback = "left") {
  const std::string text = normalize_key(cfg.get_or("side", fallback));
  if (text == "left") return Side::Left;
  if (text == "right") return Side::Right;
  throw ConfigError("key 'side' must be 'left' or 'right'", "side",
                    cfg.has("side") ? cfg.values.at("side").second : 0);
}

Exec exec_of(const RunConfig& cfg) {
  const std::string text = normalize_key(cfg.get_or("exec", "parallel"));
  if (text == "serial") return Exec::serial;
  if (text == "parallel") return Exec::parallel;
  throw ConfigError("key 'exec' must be 'serial' or 'parallel'", "exec",
                    cfg.values.at("exec").second);
}

Grid grid_of(const RunConfig& cfg) {
  return make_grid(cfg.get_real("a"), cfg.get_real("b"), cfg.get_index("n"));
}

SeriesOptions series_of(const RunConfig& cfg) {
  SeriesOptions s;
  s.series_tol = cfg.get_real_or("series_tol", s.series_tol);
  s.max_terms = cfg.get_index_or("max_terms", s.max_terms);
  return s;
}

std::vector<std::size_t> ladder_of(const RunConfig& cfg) {
  if (!cfg.has("n_list")) return {64, 128, 256, 512};
  std::vector<std::size_t> out;
  std::stringstream ss(cfg.get("n_list"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(static_cast<std::size_t>(std::stoul(item)));
    } catch (const std::exception&) {
      throw ConfigError("key 'n_list' expects comma-separated integers", "n_list",
                        cfg.values.at("n_list").second);
    }
  }
  if (out.empty())
    throw ConfigError("key 'n_list' is empty", "n_list", cfg.values.at("n_list").second);
  return out;
}

// The implicit default weight is 1, whose w' = 0 note would be pure noise;
// warnings are surfaced only for user-supplied weights.
void emit_warnings(const RunConfig& cfg, const WeightFunction& w, const Grid& grid,
                   std::ostream& err) {
  if (!cfg.has("w")) return;
  for (const auto& msg : w.validate_on(grid)) err << "warning: " << msg << "\n";
}

ordered_json report_to_json(const IdentityReport& rep) {
  ordered_json j;
  j["identity_id"] = to_string(rep.identity_id);
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["abs_gap"] = rep.abs_gap;
  j["rel_gap"] = rep.rel_gap;
  j["grid_n"] = rep.grid_n;
  ordered_json echo;
  echo["alpha"] = rep.params_echo.alpha;
  echo["beta"] = rep.params_echo.beta;
  echo["normalization"] = rep.params_echo.normalization;
  echo["weight"] = rep.params_echo.weight;
  echo["f"] = rep.params_echo.f;
  echo["g"] = rep.params_echo.g;
  echo["variant"] = rep.params_echo.variant;
  j["params_echo"] = echo;
  ordered_json rows = ordered_json::array();
  for (const auto& [n, gap] : rep.convergence_rows) rows.push_back({n, gap});
  j["convergence_rows"] = rows;
  for (const auto& [key, value] : rep.notes) j[key] = value;
  return j;
}

std::string report_to_csv(const IdentityReport& rep) {
  std::string out = "n,abs_gap\n";
  for (const auto& [n, gap] : rep.convergence_rows)
    out += std::to_string(n) + "," + format_real(gap) + "\n";
  return out;
}

// Writes the report, prints the one-line summary and applies the threshold.
int finish_report(const RunConfig& cfg, const IdentityReport& rep, std::ostream& out,
                  std::ostream& err) {
  const std::string format = cfg.get_or("format", default_format(cfg.command));
  const std::string path = cfg.get_or("output", cfg.command + "." + format);
  if (format == "json")
    write_file(path, report_to_json(rep).dump(2) + "\n");
  else if (format == "csv")
    write_file(path, report_to_csv(rep));
  else
    throw ConfigError("key 'format' must be 'csv' or 'json'", "format", 0);

  out << cfg.command << " n=" << rep.grid_n << " identity=" << to_string(rep.identity_id)
      << " abs_gap=" << format_real(rep.abs_gap) << "\n";
  if (cfg.has("threshold") && rep.abs_gap > cfg.get_real("threshold")) {
    err << cfg.command << ": abs_gap " << format_real(rep.abs_gap)
        << " exceeds threshold " << format_real(cfg.get_real("threshold")) << "\n";
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------- commands

int run_ml_eval(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  MLEvalOptions opts;
  opts.abs_tol = cfg.get_real_or("abs_tol", opts.abs_tol);
  opts.max_terms = cfg.get_index_or("max_terms", opts.max_terms);
  const double beta = cfg.get_real("beta");
  const double z = cfg.get_real("z");
  MLDiagnostics diag;
  const double value = mittag_leffler(beta, z, opts, &diag);

  const std::string format = cfg.get_or("format", "json");
  const std::string path = cfg.get_or("output", cfg.command + "." + format);
  if (format == "json") {
    ordered_json j;
    j["beta"] = beta;
    j["z"] = z;
    j["value"] = value;
    j["terms_used"] = diag.terms_used;
    j["max_term"] = diag.max_term;
    j["cancellation_warning"] = diag.cancellation_warning;
    write_file(path, j.dump(2) + "\n");
  } else {
    write_file(path, "beta,z,value\n" + format_real(beta) + "," + format_real(z) + "," +
                         format_real(value) + "\n");
  }
  out << "ml-eval beta=" << format_real(beta) << " z=" << format_real(z)
      << " value=" << format_real(value) << "\n";
  return 0;
}

int run_frac_op(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Grid grid = grid_of(cfg);
  const FracParams p = make_params(cfg.get_real("alpha"), cfg.get_real("beta"),
                                   normalization_of(cfg));
  const WeightFunction w = weight_of(cfg);
  emit_warnings(cfg, w, grid, err);
  const Side side = side_of(cfg);
  const Exec exec = exec_of(cfg);
  const SampledFunction f = sample(fn_of(parse_expr_key(cfg, "f")), grid);

  SampledFunction result = zeros(grid);
  if (cfg.command == "frac-int") {
    const auto op = side == Side::Left ? gen_integral_left(grid, p, w, exec)
                                       : gen_integral_right(grid, p, w, exec);
    result = apply(op, f, exec);
  } else {
    const SeriesOptions series = series_of(cfg);
    auto [op, rep] = side == Side::Left ? gen_derivative_left(grid, p, w, series, exec)
                                        : gen_derivative_right(grid, p, w, series, exec);
    result = apply(op, f, exec);
    for (const auto& flag : rep.warning_flags) {
      if (flag == "nonincreasing-weight" && !cfg.has("w")) continue;
      err << "warning: series " << flag << "\n";
    }
    if (cfg.has("sidecar")) {
      ordered_json j;
      j["terms_used"] = rep.terms_used;
      j["last_term_norm"] = rep.last_term_norm;
      j["warning_flags"] = rep.warning_flags;
      write_file(cfg.get("sidecar"), j.dump(2) + "\n");
    }
  }

  const std::string format = cfg.get_or("format", "csv");
  const std::string path = cfg.get_or("output", cfg.command + "." + format);
  if (format == "csv") {
    std::string text = "t,value\n";
    for (std::size_t i = 0; i < grid.points(); ++i)
      text += format_real(grid.node(i)) + "," + format_real(result.values[i]) + "\n";
    write_file(path, text);
  } else {
    ordered_json j;
    ordered_json t = ordered_json::array(), v = ordered_json::array();
    for (std::size_t i = 0; i < grid.points(); ++i) {
      t.push_back(grid.node(i));
      v.push_back(result.values[i]);
    }
    j["t"] = t;
    j["value"] = v;
    write_file(path, j.dump(2) + "\n");
  }
  out << cfg.command << " n=" << grid.n << " sup=" << format_real(sup_norm(result)) << "\n";
  return 0;
}

int run_verify_inverse(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Grid grid = grid_of(cfg);
  const FracParams p = make_params(cfg.get_real("alpha"), cfg.get_real("beta"),
                                   normalization_of(cfg));
  const WeightFunction w = weight_of(cfg);
  emit_warnings(cfg, w, grid, err);
  VerifyOptions opts;
  opts.ladder = ladder_of(cfg);
  opts.series = series_of(cfg);
  opts.exec = exec_of(cfg);
  const NamedFn f{fn_of(parse_expr_key(cfg, "f")), cfg.get("f")};
  const IdentityReport rep = verify_inversion(p, w, f, grid, side_of(cfg), opts);
  return finish_report(cfg, rep, out, err);
}

int run_verify_ibp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Grid grid = grid_of(cfg);
  const WeightFunction w = weight_of(cfg);
  emit_warnings(cfg, w, grid, err);
  VerifyOptions opts;
  opts.ladder = ladder_of(cfg);
  opts.series = series_of(cfg);
  opts.exec = exec_of(cfg);
  const NamedFn f{fn_of(parse_expr_key(cfg, "f")), cfg.get("f")};
  const NamedFn g{fn_of(parse_expr_key(cfg, "g")), cfg.get("g")};

  const std::string identity = normalize_key(cfg.get("identity"));
  IdentityReport rep;
  if (identity == "samko") {
    rep = verify_samko(cfg.get_real("beta"), f, g, grid, opts);
  } else {
    const FracParams p = make_params(cfg.get_real("alpha"), cfg.get_real("beta"),
                                     normalization_of(cfg));
    const std::string op = normalize_key(cfg.get("operator"));
    OpVariant variant;
    if (op == "integral")
      variant = OpVariant::Integral;
    else if (op == "derivative")
      variant = OpVariant::Derivative;
    else
      throw ConfigError("key 'operator' must be 'integral' or 'derivative'", "operator",
                        cfg.values.at("operator").second);
    if (identity == "unweighted")
      rep = verify_ibp_unweighted(p, f, g, grid, variant, opts);
    else if (identity == "weighted")
      rep = verify_ibp_weighted(p, w, f, g, grid, variant, opts);
    else if (identity == "corollary_right")
      rep = verify_ibp_corollary_right(p, w, f, g, grid, variant, opts);
    else if (identity == "symmetric")
      rep = verify_ibp_symmetric(p, w, f, g, grid, variant, opts);
    else
      throw ConfigError("key 'identity' must be one of samko, unweighted, weighted, "
                        "corollary-right, symmetric",
                        "identity", cfg.values.at("identity").second);
  }
  return finish_report(cfg, rep, out, err);
}

int run_verify_ab(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Grid grid = grid_of(cfg);
  VerifyOptions opts;
  opts.ladder = ladder_of(cfg);
  opts.series = series_of(cfg);
  opts.exec = exec_of(cfg);
  const NamedFn f{fn_of(parse_expr_key(cfg, "f")), cfg.get("f")};
  const NamedFn g{fn_of(parse_expr_key(cfg, "g")), cfg.get("g")};
  const IdentityReport rep = verify_ab_reduction(cfg.get_real("alpha"), f, g, grid, opts);
  return finish_report(cfg, rep, out, err);
}

LagrangianSpec lagrangian_of(const RunConfig& cfg) {
  LagrangianSpec spec;
  const std::string form = normalize_key(cfg.get_or("form", "quadratic_kinetic"));
  if (form == "quadratic_kinetic") {
    spec.form = LagrangianForm::QuadraticKinetic;
    spec.mass = cfg.get_real_or("m", 1.0);
    if (cfg.has("v")) spec.potential = parse_expr_key(cfg, "v");
  } else if (form == "general_sum") {
    spec.form = LagrangianForm::GeneralSum;
    spec.c2 = cfg.get_real_or("c2", 0.0);
    spec.c3 = cfg.get_real_or("c3", 0.0);
    spec.c4 = cfg.get_real_or("c4", 0.0);
    if (cfg.has("f2")) spec.f2 = parse_expr_key(cfg, "f2");
    if (cfg.has("f3")) spec.f3 = parse_expr_key(cfg, "f3");
    if (cfg.has("f4")) spec.f4 = parse_expr_key(cfg, "f4");
  } else {
    throw ConfigError("key 'form' must be 'quadratic-kinetic' or 'general-sum'", "form",
                      cfg.has("form") ? cfg.values.at("form").second : 0);
  }
  return spec;
}

std::string trajectory_csv(const VariationalProblem& prob, const SampledFunction& X,
                           const SampledFunction& residual, const SeriesOptions& series,
                           Exec exec) {
  const auto dleft = gen_derivative_left(prob.grid, prob.params, prob.w, series, exec).first;
  const auto dright =
      gen_derivative_right(prob.grid, prob.params, prob.w, series, exec).first;
  const auto dl = apply(dleft, X, exec);
  const auto dr = apply(dright, X, exec);
  std::string text = "t,X,DL_X,DR_X,residual\n";
  for (std::size_t i = 0; i < prob.grid.points(); ++i) {
    text += format_real(prob.grid.node(i)) + "," + format_real(X.values[i]) + "," +
            format_real(dl.values[i]) + "," + format_real(dr.values[i]) + "," +
            format_real(residual.values[i]) + "\n";
  }
  return text;
}

VariationalProblem problem_of(const RunConfig& cfg, std::ostream& err) {
  VariationalProblem prob;
  prob.grid = grid_of(cfg);
  prob.params = make_params(cfg.get_real("alpha"), cfg.get_real("beta"),
                            normalization_of(cfg));
  prob.w = weight_of(cfg);
  emit_warnings(cfg, prob.w, prob.grid, err);
  prob.lagrangian = lagrangian_of(cfg);
  return prob;
}

int finish_trajectory(const RunConfig& cfg, const VariationalProblem& prob,
                      const SampledFunction& X, const SampledFunction& residual,
                      const SeriesOptions& series, Exec exec, std::ostream& out,
                      std::ostream& err, const SolveDiagnostics* diag) {
  const std::string format = cfg.get_or("format", "csv");
  const std::string path = cfg.get_or("output", cfg.command + "." + format);
  if (format == "csv") {
    write_file(path, trajectory_csv(prob, X, residual, series, exec));
  } else {
    ordered_json j;
    ordered_json t = ordered_json::array(), x = ordered_json::array(),
                 r = ordered_json::array();
    for (std::size_t i = 0; i < prob.grid.points(); ++i) {
      t.push_back(prob.grid.node(i));
      x.push_back(X.values[i]);
      r.push_back(residual.values[i]);
    }
    j["t"] = t;
    j["X"] = x;
    j["residual"] = r;
    if (diag) {
      ordered_json d;
      d["iterations"] = diag->iterations;
      d["grad_norm"] = diag->grad_norm;
      d["objective"] = diag->objective;
      d["used_linear_path"] = diag->used_linear_path;
      d["converged"] = diag->converged;
      d["warnings"] = diag->warnings;
      j["diagnostics"] = d;
    }
    write_file(path, j.dump(2) + "\n");
  }

  const double band = cfg.get_real_or("band", 0.05);
  const double band_max = interior_band_max(residual, band);
  out << cfg.command << " n=" << prob.grid.n
      << " residual_band_max=" << format_real(band_max);
  if (diag)
    out << " objective=" << format_real(diag->objective)
        << " grad_norm=" << format_real(diag->grad_norm);
  out << "\n";
  if (cfg.has("threshold") && band_max > cfg.get_real("threshold")) {
    err << cfg.command << ": residual " << format_real(band_max)
        << " exceeds threshold " << format_real(cfg.get_real("threshold")) << "\n";
    return 2;
  }
  return 0;
}

int run_el_residual(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  VariationalProblem prob = problem_of(cfg, err);
  const SeriesOptions series = series_of(cfg);
  const Exec exec = exec_of(cfg);
  const SampledFunction X = sample(fn_of(parse_expr_key(cfg, "x")), prob.grid);
  prob.X_a = X.values.front();
  prob.X_b = X.values.back();
  const SampledFunction r = cfg.command == "newton-law"
                                ? newton_law_residual(prob, X, series, exec)
                                : el_residual(prob, X, series, exec);
  return finish_trajectory(cfg, prob, X, r, series, exec, out, err, nullptr);
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  VariationalProblem prob = problem_of(cfg, err);
  prob.X_a = cfg.get_real("x_a");
  prob.X_b = cfg.get_real("x_b");

  SolveOptions opts;
  opts.max_iters = cfg.get_index_or("max_iters", opts.max_iters);
  opts.grad_tol = cfg.get_real_or("grad_tol", opts.grad_tol);
  opts.fixed_step = cfg.get_real_or("fixed_step", opts.fixed_step);
  opts.series = series_of(cfg);
  opts.exec = exec_of(cfg);
  const std::string step = normalize_key(cfg.get_or("step_control", "backtracking"));
  if (step == "fixed" || step == "fixed_step")
    opts.step_control = StepControl::FixedStep;
  else if (step == "backtracking" || step == "backtracking_line_search")
    opts.step_control = StepControl::BacktrackingLineSearch;
  else
    throw ConfigError("key 'step_control' must be 'fixed' or 'backtracking'",
                      "step_control", cfg.values.at("step_control").second);

  SampledFunction X_init = zeros(prob.grid);
  if (cfg.has("x_init")) {
    X_init = sample(fn_of(parse_expr_key(cfg, "x_init")), prob.grid);
  } else {
    for (std::size_t i = 0; i < prob.grid.points(); ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(prob.grid.n);
      X_init.values[i] = (1.0 - s) * prob.X_a + s * prob.X_b;
    }
  }
  X_init.values.front() = prob.X_a;
  X_init.values.back() = prob.X_b;

  auto [X, diag] = solve(prob, X_init, opts);
  for (const auto& warning : diag.warnings) err << "warning: solve " << warning << "\n";
  const SampledFunction r = el_residual(prob, X, opts.series, opts.exec);
  return finish_trajectory(cfg, prob, X, r, opts.series, opts.exec, out, err, &diag);
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate(cfg);
  if (cfg.command == "ml-eval") return run_ml_eval(cfg, out, err);
  if (cfg.command == "frac-int" || cfg.command == "frac-deriv")
    return run_frac_op(cfg, out, err);
  if (cfg.command == "verify-inverse") return run_verify_inverse(cfg, out, err);
  if (cfg.command == "verify-ibp") return run_verify_ibp(cfg, out, err);
  if (cfg.command == "verify-ab") return run_verify_ab(cfg, out, err);
  if (cfg.command == "el-residual" || cfg.command == "newton-law")
    return run_el_residual(cfg, out, err);
  if (cfg.command == "solve-variational") return run_solve(cfg, out, err);
  throw ConfigError("unknown command '" + cfg.command + "'", "command", 0);
}

std::string usage() {
  return
      "usage: wgfc <command> [--config <file>] [--key value ...]\n"
      "\n"
      "commands:\n"
      "  ml-eval            evaluate E_beta(z)            (keys: beta, z)\n"
      "  frac-int           generalized fractional integral of f on a grid\n"
      "  frac-deriv         generalized fractional derivative of f on a grid\n"
      "  verify-inverse     check the inversion identities over a grid ladder\n"
      "  verify-ibp         check an integration-by-parts identity\n"
      "                     (identity = samko|unweighted|weighted|corollary-right|symmetric)\n"
      "  verify-ab          compare against the Atangana-Baleanu specialization\n"
      "  el-residual        stationarity residual of a Lagrangian along X\n"
      "  solve-variational  minimize the discretized functional\n"
      "  newton-law         force-balance residual of the kinetic Lagrangian\n"
      "\n"
      "Common keys: a, b, n, alpha, beta, normalization, w, f, g, side, output,\n"
      "format (csv|json), threshold, n_list, exec (serial|parallel). See the\n"
      "README and the configs/ examples for the per-command key matrix.\n";
}

}  // namespace wgfc::cli
