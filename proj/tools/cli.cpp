#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ratiodelay/api.hpp"
#include "ratiodelay/verify.hpp"

namespace rd = ratiodelay;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNoEquilibrium = 2, kNumeric = 3, kVerifyFailed = 4 };

struct ParamFlags {
  std::string preset;
  std::string params_file;
  std::optional<double> r, K, alpha;
  bool no_memory = false;
  std::vector<std::string> predators;
};

struct OutputFlags {
  std::string out;
  std::string format = "json";
  bool no_meta = false;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--preset", f.preset, "named parameter set (paper-example)")
      ->check(CLI::IsMember({"paper-example"}));
  cmd->add_option("--params", f.params_file, "JSON file with r, K, alpha, predators")->check(CLI::ExistingFile);
  cmd->add_option("--r", f.r, "intrinsic prey growth rate");
  cmd->add_option("--K", f.K, "prey carrying capacity");
  cmd->add_option("--alpha", f.alpha, "memory decay rate");
  cmd->add_flag("--no-memory", f.no_memory, "analyse the memoryless system only");
  cmd->add_option("--predator", f.predators, "predator as kind:m:a:d, repeatable (kind is holling or ivlev)");
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--out", f.out, "output path (standard output when omitted)");
  cmd->add_option("--format", f.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_flag("--no-meta", f.no_meta, "omit the timestamped metadata header");
}

json predator_from_flag(const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(flag);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) throw rd::Error(rd::ErrorCode::Validation, "", "--predator expects kind:m:a:d, got '" + flag + "'");
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw rd::Error(rd::ErrorCode::Validation, "", "--predator: '" + s + "' is not a number");
    }
  };
  return {{"kind", parts[0]}, {"m", number(parts[1])}, {"a", number(parts[2])}, {"d", number(parts[3])}};
}

rd::ModelParams resolve_params(const ParamFlags& f) {
  json j = json::object();
  if (!f.params_file.empty()) {
    std::ifstream in(f.params_file);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw rd::Error(rd::ErrorCode::Validation, "", "could not parse " + f.params_file + ": " + e.what());
    }
  } else if (!f.preset.empty()) {
    j = rd::api::presets().at(f.preset);
  }
  if (f.r) j["r"] = *f.r;
  if (f.K) j["K"] = *f.K;
  if (f.alpha) j["alpha"] = *f.alpha;
  if (f.no_memory) j["alpha"] = nullptr;
  if (!f.predators.empty()) {
    j["predators"] = json::array();
    for (const auto& flag : f.predators) j["predators"].push_back(predator_from_flag(flag));
  }
  return rd::io::params_from_json(j);
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

/// Right-pads the columns of a CSV document for reading in a terminal.
std::string csv_to_table(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(csv);
  for (std::string line; std::getline(ss, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

void flatten(const json& j, const std::string& path, std::string& csv) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), csv);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", csv);
  } else if (j.is_number_float()) {
    csv += path + "," + rd::io::fmt_number(j.get<double>()) + "\n";
  } else {
    csv += path + "," + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
  }
}

/// Generic key,value CSV for documents without a natural tabular form.
std::string json_to_csv(const json& doc) {
  std::string csv = "key,value\n";
  flatten(doc, "", csv);
  return csv;
}

struct Artifact {
  json doc;
  std::optional<std::string> csv;    // native CSV; falls back to flattened key,value rows
  std::optional<std::string> table;  // native table; falls back to the aligned CSV
};

void emit(const Artifact& art, const OutputFlags& o, const std::string& command) {
  std::string text;
  if (o.format == "json") {
    json doc = art.doc;
    if (!o.no_meta && doc.is_object()) {
      doc["meta"] = {{"tool", "ratiodelay"}, {"command", command}, {"generated_at", timestamp()}};
    }
    text = doc.dump(2) + "\n";
  } else {
    const std::string header = o.no_meta ? "" : "# ratiodelay " + command + " generated_at=" + timestamp() + "\n";
    const std::string csv = art.csv ? *art.csv : json_to_csv(art.doc);
    text = header + (o.format == "csv" ? csv : (art.table ? *art.table : csv_to_table(csv)));
  }
  if (o.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw rd::Error(rd::ErrorCode::Validation, "", "cannot write " + o.out);
  f << text;
}

int exit_code(rd::ErrorCode code) {
  switch (code) {
    case rd::ErrorCode::NoPositiveEquilibrium: return kNoEquilibrium;
    case rd::ErrorCode::NumericFailure:
    case rd::ErrorCode::BudgetExceeded: return kNumeric;
    default: return kUsage;
  }
}

std::string equilibrium_csv(const json& eq) {
  const auto& y = eq.at("y_star");
  std::string head = "x_star", row = rd::io::fmt_number(eq.at("x_star").get<double>());
  for (std::size_t i = 0; i < y.size(); ++i) {
    head += ",y" + std::to_string(i + 1) + "_star";
    row += "," + rd::io::fmt_number(y[i].get<double>());
  }
  return head + ",q_star\n" + row + "," + rd::io::fmt_number(eq.at("q_star").get<double>()) + "\n";
}

std::string jacobian_csv(const rd::JacobianPair& jac) {
  std::string csv = "matrix,row,col,value\n";
  auto dump = [&](const char* name, const rd::Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        csv += std::string(name) + "," + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
               rd::io::fmt_number(m(i, j)) + "\n";
      }
    }
  };
  dump("A", jac.A);
  if (jac.A_d) dump("A_d", *jac.A_d);
  return csv;
}

std::string verify_csv(const std::vector<rd::verify::CriterionResult>& results) {
  std::string csv = "criterion,passed,check,check_passed,detail\n";
  auto quote = [](std::string s) {
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
  };
  for (const auto& r : results) {
    for (const auto& c : r.checks) {
      csv += std::to_string(r.id) + "," + (r.passed() ? "true" : "false") + "," + quote(c.name) + "," +
             (c.passed ? "true" : "false") + "," + quote(c.detail) + "\n";
    }
  }
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis of a ratio-dependent n-predator/one-prey model with fading memory"};
  app.require_subcommand(1, 1);

  ParamFlags pf;
  OutputFlags of;
  double from = 0.0, to = 0.0;
  std::size_t steps = 0;
  std::string param = "r";
  double t_end = 100.0, dt = 0.05, perturbation = 0.01, rel_tol = 1e-9, abs_tol = 1e-12;
  std::vector<double> initial;

  auto* c_eq = app.add_subcommand("equilibrium", "positive equilibrium (CSV: x_star,y1_star..yn_star,q_star)");
  auto* c_jac = app.add_subcommand("jacobian", "Jacobians at the equilibrium (CSV: matrix,row,col,value)");
  auto* c_stab = app.add_subcommand("stability", "full stability report (CSV: key,value)");
  auto* c_h = app.add_subcommand("hscan", "H(alpha) over a log grid, n = 2 (CSV: alpha,H,abscissa,stable)");
  auto* c_sim = app.add_subcommand("simulate", "integrate the system (CSV: t,x,y1..yn[,q])");
  auto* c_bif = app.add_subcommand(
      "bifurcate", "sweep r, K or alpha (CSV: <param>,class,has_equilibrium,A_stable,sign_stable,delay_robust,"
                   "Ad_stable,a11,abscissa_A,abscissa_Ad,H)");
  auto* c_null = app.add_subcommand("nullcline", "prey nullcline over (y1, y2), n = 2 (CSV: y1,y2,x)");
  auto* c_ver = app.add_subcommand("verify", "run the acceptance suite (CSV: criterion,passed,check,check_passed,detail)");

  for (auto* cmd : {c_eq, c_jac, c_stab, c_h, c_sim, c_bif, c_null}) add_param_flags(cmd, pf);
  for (auto* cmd : {c_eq, c_jac, c_stab, c_h, c_sim, c_bif, c_null, c_ver}) add_output_flags(cmd, of);

  c_h->add_option("--from", from, "smallest alpha (default 0.01)");
  c_h->add_option("--to", to, "largest alpha (default 100)");
  c_h->add_option("--steps", steps, "grid points (default 200)");

  c_bif->add_option("--param", param, "parameter to sweep")->check(CLI::IsMember({"r", "K", "alpha"}));
  c_bif->add_option("--from", from, "first value")->required();
  c_bif->add_option("--to", to, "last value")->required();
  c_bif->add_option("--steps", steps, "number of values, endpoints included")->required();

  c_sim->add_option("--t-end", t_end, "final time")->capture_default_str();
  c_sim->add_option("--dt", dt, "sample spacing")->capture_default_str();
  c_sim->add_option("--perturbation", perturbation, "relative offset from the equilibrium")->capture_default_str();
  c_sim->add_option("--initial", initial, "initial state x,y1,..,yn[,q]")->delimiter(',');
  c_sim->add_option("--rel-tol", rel_tol, "relative tolerance")->capture_default_str();
  c_sim->add_option("--abs-tol", abs_tol, "absolute tolerance")->capture_default_str();

  c_null->add_option("--from", from, "smallest y1 and y2 (default K/1000)");
  c_null->add_option("--to", to, "largest y1 and y2 (default K/2)");
  c_null->add_option("--steps", steps, "grid points per axis (default 21)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_ver->parsed()) {
      const auto results = rd::verify::run_acceptance();
      Artifact art{rd::verify::results_to_json(results), verify_csv(results), rd::verify::format_results(results)};
      emit(art, of, "verify");
      for (const auto& r : results) {
        if (!r.passed()) return kVerifyFailed;
      }
      return kOk;
    }

    const rd::ModelParams params = resolve_params(pf);
    const std::string command = app.get_subcommands().front()->get_name();
    const bool tabular = of.format != "json";

    if (c_eq->parsed()) {
      const json doc = rd::api::equilibrium_response(params);
      emit({doc, equilibrium_csv(doc.at("equilibrium")), std::nullopt}, of, command);
    } else if (c_jac->parsed()) {
      const json doc = rd::api::jacobian_response(params);
      emit({doc, jacobian_csv(rd::build_jacobians(params)), std::nullopt}, of, command);
    } else if (c_stab->parsed()) {
      emit({rd::api::stability_response(params), std::nullopt, std::nullopt}, of, command);
    } else if (c_h->parsed()) {
      rd::api::HCurveOptions o;
      if (c_h->count("--from")) o.alpha_min = from;
      if (c_h->count("--to")) o.alpha_max = to;
      if (c_h->count("--steps")) o.points = steps;
      const json doc = rd::api::hcurve_response(params, o);
      emit({doc, tabular ? std::optional(rd::io::to_csv(rd::api::hcurve_scan(params, o))) : std::nullopt, std::nullopt},
           of, command);
    } else if (c_sim->parsed()) {
      rd::api::SimulateOptions o;
      o.t_end = t_end;
      o.dt = dt;
      o.perturbation = perturbation;
      o.rel_tol = rel_tol;
      o.abs_tol = abs_tol;
      if (!initial.empty()) {
        const bool with_q = initial.size() == params.n() + 2;
        if (initial.size() != params.n() + 1 && !with_q) {
          throw rd::Error(rd::ErrorCode::Validation, "", "--initial needs x, one value per predator and optionally q");
        }
        o.initial = rd::State::from_vector(initial, params.n(), with_q);
      }
      const json doc = rd::api::simulate_response(params, o);
      emit({doc, tabular ? std::optional(rd::io::to_csv(rd::api::run_simulation(params, o))) : std::nullopt,
            std::nullopt},
           of, command);
    } else if (c_bif->parsed()) {
      const auto rows = rd::sweep_parameter(params, rd::api::sweep_param_from(param), from, to, steps);
      const json doc = rd::api::bifurcate_response(params, param, from, to, steps);
      emit({doc, rd::io::to_csv(rows, param), std::nullopt}, of, command);
    } else if (c_null->parsed()) {
      rd::api::NullclineOptions o = rd::api::NullclineOptions::defaults(params);
      for (rd::GridRange* g : {&o.y1, &o.y2}) {
        if (c_null->count("--from")) g->lo = from;
        if (c_null->count("--to")) g->hi = to;
        if (c_null->count("--steps")) g->count = steps;
      }
      const json doc = rd::api::nullcline_response(params, o);
      emit({doc, rd::io::to_csv(rd::prey_nullcline_sample(params, o.y1, o.y2)), std::nullopt}, of, command);
    }
    return kOk;
  } catch (const rd::Error& e) {
    std::fprintf(stderr, "error [%s]%s%s: %s\n", std::string(rd::to_string(e.code())).c_str(),
                 e.condition().empty() ? "" : " condition: ", e.condition().c_str(), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error [numeric_failure]: %s\n", e.what());
    return kNumeric;
  }
}
