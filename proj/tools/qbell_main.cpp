// Command-line front end: quasiprobability evaluation, Bell maximization,
// violation thresholds, (s, eta) scans, and the oracle self-check.
//
// Exit codes: 0 ok, 2 domain error, 3 optimizer non-convergence,
// 4 no violation on the searched interval, 5 scan convergence below 99%,
// 6 oracle-check failure.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbell/bell.hpp"
#include "qbell/kernels.hpp"
#include "qbell/search.hpp"
#include "qbell/selftest.hpp"

using nlohmann::json;
using namespace qbell;

namespace {

constexpr int kExitDomain = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitNoViolation = 4;
constexpr int kExitScanIncomplete = 5;
constexpr int kExitOracle = 6;

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

// Axis syntax: a bare scalar or "lo:hi:count" inclusive of both endpoints.
std::vector<double> parse_axis(const std::string& text) {
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) return {std::stod(text)};
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::domain_error("axis syntax is lo:hi:count, got " + text);
  const double lo = std::stod(text.substr(0, c1));
  const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const int count = std::stoi(text.substr(c2 + 1));
  if (count < 1) throw std::domain_error("axis count must be >= 1");
  if (count == 1) {
    if (lo != hi) throw std::domain_error("single-point axis needs lo == hi");
    return {lo};
  }
  std::vector<double> axis(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    axis[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return axis;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::domain_error("empty list");
  return out;
}

struct CommonArgs {
  std::string state = "single-photon";
  double r = 0.0;
  std::uint64_t seed = 0;
  int jobs = 0;
  int restarts = 32;
  bool real_only = false;
  double box = 2.0;
  double margin = 1e-6;
  std::string format;
  std::string output;
};

StateModel make_state(const CommonArgs& a) {
  if (a.state == "single-photon") return SinglePhotonEntangled{};
  if (a.state == "tmss") {
    if (a.r <= 0.0) throw std::domain_error("tmss requires --r > 0");
    return Tmss(a.r);
  }
  throw std::domain_error("unknown state '" + a.state + "' (single-photon | tmss)");
}

search::SearchOptions make_search_options(const CommonArgs& a) {
  search::SearchOptions opts;
  opts.restarts = a.restarts;
  opts.real_only = a.real_only;
  opts.initial_box = a.box;
  opts.violation_margin = a.margin;
  opts.seed = a.seed;
  opts.jobs = a.jobs;
  return opts;
}

json config_echo(const CommonArgs& a) {
  json c;
  c["state"] = a.state;
  if (a.state == "tmss" && a.r > 0.0) c["r"] = a.r;
  c["seed"] = a.seed;
  c["jobs"] = a.jobs;
  c["restarts"] = a.restarts;
  c["real-only"] = a.real_only;
  c["box"] = a.box;
  c["margin"] = a.margin;
  return c;
}

json settings_json(const MeasurementSettings& st) {
  return json{{"alpha1", format_complex(st.alpha1.value())},
              {"alpha2", format_complex(st.alpha2.value())},
              {"beta1", format_complex(st.beta1.value())},
              {"beta2", format_complex(st.beta2.value())}};
}

void emit(const std::string& output, const std::string& text) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(output);
  if (!f) throw std::runtime_error("cannot open output file " + output);
  f << text;
}

// Flat json -> "# key=value" comment block plus csv header/row.
std::string json_as_csv(const json& config, const json& row) {
  std::ostringstream out;
  for (auto it = config.begin(); it != config.end(); ++it)
    out << "# " << it.key() << "=" << (it.value().is_string()
                                           ? it.value().get<std::string>()
                                           : it.value().dump())
        << "\n";
  std::string header, values;
  for (auto it = row.begin(); it != row.end(); ++it) {
    if (!header.empty()) {
      header += ',';
      values += ',';
    }
    header += it.key();
    if (it.value().is_number_float())
      values += shortest(it.value().get<double>());
    else if (it.value().is_string())
      values += it.value().get<std::string>();
    else
      values += it.value().dump();
  }
  out << header << "\n" << values << "\n";
  return out.str();
}

void report(const CommonArgs& a, const json& config, const json& result,
            const std::string& default_format) {
  const std::string fmt = a.format.empty() ? default_format : a.format;
  if (fmt == "json") {
    json doc;
    doc["config"] = config;
    doc["result"] = result;
    emit(a.output, doc.dump(2) + "\n");
  } else if (fmt == "csv") {
    emit(a.output, json_as_csv(config, result));
  } else {
    throw std::domain_error("unknown format '" + fmt + "' (json | csv)");
  }
}

int cmd_eval_w(const CommonArgs& a, const std::string& alpha_text,
               const std::string& beta_text, double s_value, bool check_oracle,
               std::optional<int> cutoff) {
  const StateModel state = make_state(a);
  const PhasePoint alpha{parse_complex(alpha_text)};
  const PhasePoint beta{parse_complex(beta_text)};
  const SParameter s(s_value);

  json config = config_echo(a);
  config["command"] = "eval-w";
  config["alpha"] = format_complex(alpha.value());
  config["beta"] = format_complex(beta.value());
  config["s"] = s_value;

  json result;
  result["w_pair"] = kernels::w_pair(state, alpha, beta, s);
  result["w_marginal_alpha"] = kernels::w_marginal(state, alpha, s, kernels::Mode::A);
  result["w_marginal_beta"] = kernels::w_marginal(state, beta, s, kernels::Mode::B);
  if (check_oracle) {
    const double radius = std::max(alpha.abs(), beta.abs());
    const fock::FockCutoff cut = cutoff ? fock::FockCutoff(*cutoff)
                                        : fock::cutoff_for(state, radius, s_value);
    config["cutoff"] = cut.n_max();
    const fock::FockDensityMatrix rho = fock::build_density(state, cut);
    const double oracle = fock::w_pair_oracle(
        rho, alpha, beta, s, cutoff ? std::optional<fock::FockCutoff>(cut) : std::nullopt);
    result["oracle_w_pair"] = oracle;
    result["oracle_abs_diff"] = std::fabs(oracle - result["w_pair"].get<double>());
  }
  report(a, config, result, "json");
  return 0;
}

int cmd_bell_max(const CommonArgs& a, double s_value, double eta,
                 const std::string& settings_text, bool no_optimize) {
  const StateModel state = make_state(a);
  const BellContext ctx(SParameter(s_value), eta);
  json config = config_echo(a);
  config["command"] = "bell-max";
  config["s"] = s_value;
  config["eta"] = eta;

  json result;
  if (no_optimize) {
    if (settings_text.empty())
      throw std::domain_error("--no-optimize requires --settings");
    std::vector<std::complex<double>> vals;
    std::stringstream ss(settings_text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(parse_complex(item));
    if (vals.size() != 4)
      throw std::domain_error("--settings needs 4 comma-separated values");
    const MeasurementSettings st{PhasePoint(vals[0]), PhasePoint(vals[1]),
                                 PhasePoint(vals[2]), PhasePoint(vals[3])};
    const BellValue b = bell::bell_value(state, st, ctx);
    config["settings"] = settings_text;
    result["magnitude"] = b.magnitude;
    result["value"] = b.value;
    result["violated"] = b.violated;
    result["settings"] = settings_json(st);
    result["restarts"] = 0;
    result["evaluations"] = 0;
    result["converged"] = true;
    report(a, config, result, "json");
    return 0;
  }

  search::SearchOptions opts = make_search_options(a);
  opts.seed = search::split_seed(a.seed, 0);  // matches the 1x1 scan cell
  std::optional<MeasurementSettings> warm;
  if (!settings_text.empty()) {
    std::vector<std::complex<double>> vals;
    std::stringstream ss(settings_text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(parse_complex(item));
    if (vals.size() != 4)
      throw std::domain_error("--settings needs 4 comma-separated values");
    warm = MeasurementSettings{PhasePoint(vals[0]), PhasePoint(vals[1]),
                               PhasePoint(vals[2]), PhasePoint(vals[3])};
    config["settings"] = settings_text;
  }
  const search::OptimizationResult r =
      search::maximize_bell(state, ctx, opts, warm ? &*warm : nullptr);
  result["magnitude"] = r.best.magnitude;
  result["value"] = r.best.value;
  result["violated"] = r.best.violated;
  result["settings"] = settings_json(r.settings);
  result["restarts"] = r.restarts_used;
  result["evaluations"] = r.evaluations;
  result["converged"] = r.converged;
  report(a, config, result, "json");
  return r.converged ? 0 : kExitNonConvergence;
}

int cmd_threshold(const CommonArgs& a, const std::string& axis, double s_value,
                  double eta, double tol) {
  const StateModel state = make_state(a);
  json config = config_echo(a);
  config["command"] = "threshold";
  config["axis"] = axis;
  config["tol"] = tol;

  search::SearchOptions opts = make_search_options(a);
  search::ThresholdResult tr;
  if (axis == "eta") {
    config["s"] = s_value;
    tr = search::min_eta_threshold(state, SParameter(s_value), tol, opts);
  } else if (axis == "s") {
    config["eta"] = eta;
    tr = search::min_s_threshold(state, eta, tol, opts);
  } else {
    throw std::domain_error("--axis must be 'eta' or 's'");
  }

  json result;
  result["threshold"] = tr.threshold;
  result["bracket_lo"] = tr.bracket_lo;
  result["bracket_hi"] = tr.bracket_hi;
  result["tolerance"] = tr.tolerance;
  result["magnitude_at_bracket_hi"] = tr.at_bracket_hi.best.magnitude;
  result["settings_at_bracket_hi"] = settings_json(tr.at_bracket_hi.settings);
  report(a, config, result, "json");
  return 0;
}

int cmd_scan(const CommonArgs& a, const std::string& s_axis, const std::string& s_list,
             const std::string& eta_axis, const std::string& eta_list,
             const std::string& r_axis, const std::string& r_list, bool audit) {
  std::vector<double> s_grid = !s_list.empty() ? parse_list(s_list) : parse_axis(s_axis);
  std::vector<double> eta_grid =
      !eta_list.empty() ? parse_list(eta_list) : parse_axis(eta_axis);
  std::vector<double> r_grid;
  if (a.state == "tmss") {
    if (!r_list.empty())
      r_grid = parse_list(r_list);
    else if (!r_axis.empty())
      r_grid = parse_axis(r_axis);
    else
      throw std::domain_error("tmss scan requires --r or --r-list");
  } else {
    r_grid = {0.0};
  }

  json config = config_echo(a);
  config["command"] = "scan";
  config["s-grid"] = s_axis.empty() ? s_list : s_axis;
  config["eta-grid"] = eta_axis.empty() ? eta_list : eta_axis;
  if (a.state == "tmss") config["r-grid"] = !r_list.empty() ? r_list : r_axis;
  config["audit"] = audit;

  std::ostringstream out;
  for (auto it = config.begin(); it != config.end(); ++it)
    out << "# " << it.key() << "="
        << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
        << "\n";
  out << "s,eta,r,bell_magnitude,violated,alpha1,alpha2,beta1,beta2,converged\n";

  std::size_t total = 0, converged = 0;
  double audit_worst = 0.0;
  for (double r_value : r_grid) {
    const StateModel state =
        a.state == "tmss" ? StateModel(Tmss(r_value)) : StateModel(SinglePhotonEntangled{});
    search::ScanOptions opts;
    opts.search = make_search_options(a);
    opts.audit = audit;
    const search::ScanResult scan = search::scan_grid(state, s_grid, eta_grid, opts);
    audit_worst = std::max(audit_worst, scan.audit_max_discrepancy);
    for (const auto& cell : scan.cells) {
      ++total;
      const bool ok = !cell.failed && cell.result.converged;
      converged += ok ? 1 : 0;
      out << shortest(cell.s) << ',' << shortest(cell.eta) << ',' << shortest(r_value)
          << ',';
      out << shortest(cell.failed ? 0.0 : cell.result.best.magnitude) << ','
          << (!cell.failed && cell.result.best.violated ? "true" : "false") << ',';
      const MeasurementSettings& st = cell.result.settings;
      out << format_complex(st.alpha1.value()) << ',' << format_complex(st.alpha2.value())
          << ',' << format_complex(st.beta1.value()) << ','
          << format_complex(st.beta2.value()) << ',' << (ok ? "true" : "false") << "\n";
    }
  }
  if (audit) std::cerr << "audit max discrepancy: " << audit_worst << "\n";

  const std::string fmt = a.format.empty() ? "csv" : a.format;
  if (fmt != "csv") throw std::domain_error("scan output supports only csv");
  emit(a.output, out.str());
  return converged >= static_cast<std::size_t>(0.99 * static_cast<double>(total))
             ? 0
             : kExitScanIncomplete;
}

int cmd_oracle_check(const CommonArgs& a, int trials, const std::string& suite,
                     std::optional<int> cutoff) {
  json config = config_echo(a);
  config["command"] = "oracle-check";
  config["trials"] = trials;
  config["suite"] = suite;
  if (cutoff) config["cutoff"] = *cutoff;

  std::optional<fock::FockCutoff> cut;
  if (cutoff) cut = fock::FockCutoff(*cutoff);

  json result;
  bool ok = true;
  std::string worst;
  if (suite == "equivalence" || suite == "all") {
    const auto rep = selftest::equivalence_suite(trials, a.seed, cut, a.jobs);
    json r{{"trials", rep.trials},
           {"max_abs_dev", rep.max_abs_dev},
           {"worst_case", rep.worst_case},
           {"passed", rep.passed}};
    if (!rep.error.empty()) r["error"] = rep.error;
    result["equivalence"] = r;
    ok = ok && rep.passed;
    if (!rep.passed) worst = rep.error.empty() ? rep.worst_case : rep.error;
  }
  if (suite == "loss" || suite == "all") {
    const auto rep = selftest::loss_suite(trials, a.seed);
    json r{{"trials", rep.trials},
           {"max_abs_dev", rep.max_abs_dev},
           {"worst_case", rep.worst_case},
           {"passed", rep.passed}};
    if (!rep.error.empty()) r["error"] = rep.error;
    result["loss"] = r;
    ok = ok && rep.passed;
    if (!rep.passed && worst.empty()) worst = rep.error.empty() ? rep.worst_case : rep.error;
  }
  result["passed"] = ok;
  report(a, config, result, "json");
  if (!ok) std::cerr << "oracle-check failed, worst case: " << worst << "\n";
  return ok ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s-parameterized quasiprobability Bell tests"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string alpha_text = "0", beta_text = "0";
  double s_value = 0.0, eta = 1.0, tol = 1e-3;
  bool check_oracle = false, no_optimize = false, audit = false;
  std::string axis = "eta", settings_text;
  std::string s_axis, s_list, eta_axis, eta_list, r_axis, r_list;
  int trials = 200;
  std::string suite = "all";
  std::optional<int> cutoff;
  int cutoff_raw = -1;

  auto add_common = [&](CLI::App* cmd, bool with_search, bool scalar_r = true) {
    cmd->add_option("--state", a.state, "single-photon | tmss");
    if (scalar_r) cmd->add_option("--r", a.r, "TMSS squeezing parameter");
    cmd->add_option("--seed", a.seed, "deterministic master seed (default 0)");
    cmd->add_option("--jobs", a.jobs, "parallel work items; 1 = serial, 0 = all cores");
    cmd->add_option("--format", a.format, "json | csv");
    cmd->add_option("--output", a.output, "output file (default stdout)");
    if (with_search) {
      cmd->add_option("--restarts", a.restarts, "multistart restarts (default 32)");
      cmd->add_flag("--real-only", a.real_only, "restrict settings to the real axis");
      cmd->add_option("--box", a.box, "start box half-width (default 2)");
      cmd->add_option("--margin", a.margin, "violation margin over 2 (default 1e-6)");
    }
  };

  CLI::App* eval = app.add_subcommand("eval-w", "evaluate W(alpha, beta; s) and marginals");
  add_common(eval, false);
  eval->add_option("--alpha", alpha_text, "complex literal a+bi");
  eval->add_option("--beta", beta_text, "complex literal a+bi");
  eval->add_option("--s", s_value, "order parameter, s <= 0")->required();
  eval->add_flag("--check-oracle", check_oracle, "also evaluate the Fock oracle");
  eval->add_option("--cutoff", cutoff_raw, "explicit Fock cutoff for the oracle");

  CLI::App* bmax = app.add_subcommand("bell-max", "maximize |<B>| over settings");
  add_common(bmax, true);
  bmax->add_option("--s", s_value, "order parameter, s <= 0")->required();
  bmax->add_option("--eta", eta, "overall efficiency in (0, 1] (default 1)");
  bmax->add_option("--settings", settings_text,
                   "settings a1,a2,b1,b2 (warm start, or fixed with --no-optimize)");
  bmax->add_flag("--no-optimize", no_optimize, "evaluate --settings without search");

  CLI::App* thr = app.add_subcommand("threshold", "locate the violation threshold");
  add_common(thr, true);
  thr->add_option("--axis", axis, "eta | s")->required();
  thr->add_option("--s", s_value, "fixed s for --axis eta");
  thr->add_option("--eta", eta, "fixed eta for --axis s (default 1)");
  thr->add_option("--tol", tol, "bisection tolerance (default 1e-3)");

  CLI::App* scan = app.add_subcommand("scan", "grid scan over s and eta (and r)");
  add_common(scan, true, /*scalar_r=*/false);
  scan->add_option("--s", s_axis, "s value or lo:hi:count grid");
  scan->add_option("--s-list", s_list, "explicit comma-separated s values");
  scan->add_option("--eta", eta_axis, "eta value or lo:hi:count grid");
  scan->add_option("--eta-list", eta_list, "explicit comma-separated eta values");
  scan->add_option("--r", r_axis, "r value or lo:hi:count grid (tmss)");
  scan->add_option("--r-list", r_list, "explicit comma-separated r values (tmss)");
  scan->add_flag("--audit", audit, "cold re-run every 20th cell and report drift");

  CLI::App* oracle = app.add_subcommand("oracle-check", "kernel/oracle equivalence suites");
  add_common(oracle, false);
  oracle->add_option("--trials", trials, "number of random trials (default 200)");
  oracle->add_option("--suite", suite, "equivalence | loss | all");
  oracle->add_option("--cutoff", cutoff_raw, "explicit Fock cutoff override");

  CLI11_PARSE(app, argc, argv);
  if (cutoff_raw >= 0) cutoff = cutoff_raw;

  try {
    if (app.got_subcommand(eval))
      return cmd_eval_w(a, alpha_text, beta_text, s_value, check_oracle, cutoff);
    if (app.got_subcommand(bmax))
      return cmd_bell_max(a, s_value, eta, settings_text, no_optimize);
    if (app.got_subcommand(thr)) return cmd_threshold(a, axis, s_value, eta, tol);
    if (app.got_subcommand(scan))
      return cmd_scan(a, s_axis, s_list, eta_axis, eta_list, r_axis, r_list, audit);
    if (app.got_subcommand(oracle)) return cmd_oracle_check(a, trials, suite, cutoff);
  } catch (const NoViolationError& e) {
    std::cerr << "no violation: " << e.what() << "\n";
    return kExitNoViolation;
  } catch (const InadequateCutoffError& e) {
    std::cerr << "inadequate cutoff: " << e.what() << "\n";
    return kExitOracle;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
