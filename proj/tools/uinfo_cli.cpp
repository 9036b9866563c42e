// uinfo: unique-information decomposition, secret-key-rate bound chains,
// Blackwell dominance tests and the property verification suite.
//
// Exit codes: 0 ok, 1 input error, 2 convergence flag, 3 hard-invariant
// violation, 4 property-suite violations.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uinfo/blackwell.hpp"
#include "uinfo/bounds.hpp"
#include "uinfo/dist_io.hpp"
#include "uinfo/property_harness.hpp"
#include "uinfo/random.hpp"
#include "uinfo/ui_solver.hpp"

namespace {

using nlohmann::ordered_json;
using namespace uinfo;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConvergence = 2;
constexpr int kExitHardViolation = 3;
constexpr int kExitSuiteViolations = 4;

struct GlobalOpts {
  double tol = 1e-6;
  int restarts = 20;
  std::uint64_t seed = 1;
  int max_iters = 10000;
  std::string format = "table";  // table | json
  std::vector<std::string> role_s, role_y, role_z;
};

// All printed values are bits with 6 decimals; machine output carries the
// same rounded numbers.
double round6(double v) {
  if (!std::isfinite(v)) return v;
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // normalize -0
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", round6(v));
  return std::string(buf);
}

UiOptions ui_options(const GlobalOpts& g) {
  UiOptions o;
  o.tolerance = g.tol;
  o.max_iterations = g.max_iters;
  o.seed = g.seed;
  return o;
}

BoundsOptions bounds_options(const GlobalOpts& g) {
  BoundsOptions o;
  o.restarts = g.restarts;
  o.seed = g.seed;
  o.ui = ui_options(g);
  return o;
}

ParsedDistribution load(const std::string& path, const GlobalOpts& g, Roles& roles) {
  ParsedDistribution parsed = read_distribution_file(path);
  if (parsed.renormalized)
    std::cerr << "warning: probabilities renormalized (sum deviated by <= 1e-6)\n";
  roles = resolve_roles(parsed, g.role_s, g.role_y, g.role_z);
  return parsed;
}

void emit(const GlobalOpts& g, const std::vector<std::pair<std::string, std::string>>& rows,
          const ordered_json& machine) {
  if (g.format == "json") {
    std::cout << machine.dump(2) << "\n";
    return;
  }
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) {
    std::cout << k;
    for (std::size_t i = k.size(); i < width + 2; ++i) std::cout << ' ';
    std::cout << v << "\n";
  }
}

int cmd_ui(const std::string& file, const GlobalOpts& g) {
  Roles roles;
  const ParsedDistribution parsed = load(file, g, roles);
  const DecompositionResult r = compute_ui(parsed.dist, roles, ui_options(g));

  ordered_json j;
  j["ui"] = round6(r.ui);
  j["si"] = round6(r.si);
  j["ci"] = round6(r.ci);
  j["gap"] = round6(r.gap);
  j["iterations"] = r.iterations;
  j["method"] = r.method;
  j["converged"] = r.converged;
  emit(g,
       {{"ui", fmt6(r.ui)},
        {"si", fmt6(r.si)},
        {"ci", fmt6(r.ci)},
        {"gap", fmt6(r.gap)},
        {"iterations", std::to_string(r.iterations)},
        {"method", r.method},
        {"converged", r.converged ? "yes" : "no"}},
       j);
  return r.converged ? kExitOk : kExitConvergence;
}

int cmd_bounds(const std::string& file, const GlobalOpts& g) {
  Roles roles;
  const ParsedDistribution parsed = load(file, g, roles);
  std::optional<BoundsReport> maybe;
  try {
    maybe.emplace(bounds_chain(parsed.dist, roles, bounds_options(g)));
  } catch (const std::logic_error& e) {
    std::cerr << "hard chain invariant violated: " << e.what() << "\n";
    return kExitHardViolation;
  }
  const BoundsReport& rep = *maybe;

  ordered_json j;
  j["one_way_lower"] = round6(rep.one_way_lower);
  j["ui"] = round6(rep.ui);
  j["ui_gap"] = round6(rep.ui_gap);
  j["b_gui_upper"] = round6(rep.b_gui_upper);
  j["b1_upper"] = round6(rep.b1_upper);
  j["intrinsic_upper"] = round6(rep.intrinsic_upper);
  j["cmi"] = round6(rep.cmi);
  j["flags"] = rep.flags;
  std::string flags;
  for (const auto& f : rep.flags) flags += (flags.empty() ? "" : ",") + f;
  emit(g,
       {{"one_way (lower est.)", fmt6(rep.one_way_lower) + "  ^"},
        {"ui (gap " + fmt6(rep.ui_gap) + ")", fmt6(rep.ui)},
        {"b_gui (upper est.)", fmt6(rep.b_gui_upper) + "  v"},
        {"b1 (upper est.)", fmt6(rep.b1_upper) + "  v"},
        {"intrinsic (upper est.)", fmt6(rep.intrinsic_upper) + "  v"},
        {"cmi", fmt6(rep.cmi)},
        {"flags", flags.empty() ? "-" : flags}},
       j);
  return rep.flags.empty() ? kExitOk : kExitConvergence;
}

int cmd_blackwell(const std::string& file, const GlobalOpts& g) {
  Roles roles;
  const ParsedDistribution parsed = load(file, g, roles);
  const DominanceVerdict v = blackwell_dominates(parsed.dist, roles);

  ordered_json j;
  j["dominates"] = v.dominates;
  j["residual"] = round6(v.residual);
  std::vector<std::pair<std::string, std::string>> rows{
      {"dominates", v.dominates ? "true" : "false"}, {"residual", fmt6(v.residual)}};
  if (v.witness) {
    ordered_json wj = ordered_json::array();
    const Channel& w = *v.witness;
    for (std::size_t r = 0; r < w.rows(); ++r) {
      ordered_json row = ordered_json::array();
      std::string srow;
      for (int o = 0; o < w.output.size; ++o) {
        row.push_back(round6(w(r, o)));
        srow += (o ? " " : "") + fmt6(w(r, o));
      }
      wj.push_back(row);
      rows.push_back({"witness[z=" + std::to_string(r) + "]", srow});
    }
    j["witness"] = wj;
  }
  emit(g, rows, j);
  return kExitOk;
}

int cmd_keyrate(const std::string& file, const GlobalOpts& g) {
  Roles roles;
  const ParsedDistribution parsed = load(file, g, roles);
  const OneWayResult ow = one_way_rate(parsed.dist, roles, bounds_options(g));
  const DecompositionResult r = compute_ui(parsed.dist, roles, ui_options(g));

  // One-way secret key rate bracket: achieved strategy value from below,
  // unique information from above.
  ordered_json j;
  j["one_way_lower"] = round6(ow.value);
  j["ui_upper"] = round6(r.ui);
  j["ui_gap"] = round6(r.gap);
  j["converged"] = ow.converged && r.converged;
  emit(g,
       {{"one_way (lower est.)", fmt6(ow.value) + "  ^"},
        {"ui (upper bound)", fmt6(r.ui) + "  v"},
        {"ui_gap", fmt6(r.gap)},
        {"converged", (ow.converged && r.converged) ? "yes" : "no"}},
       j);
  return (ow.converged && r.converged) ? kExitOk : kExitConvergence;
}

SuiteConfig suite_config_from_json(const std::string& path, const GlobalOpts& g) {
  SuiteConfig cfg = default_suite_config();
  cfg.ui = ui_options(g);
  cfg.bounds.seed = g.seed;
  cfg.bounds.ui = cfg.ui;
  if (path.empty()) return cfg;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("suite config: invalid JSON: ") + e.what());
  }
  if (j.contains("tolerance")) cfg.ui.tolerance = j["tolerance"].get<double>();
  if (j.contains("restarts")) cfg.bounds.restarts = j["restarts"].get<int>();
  if (j.contains("max_evals")) cfg.bounds.max_evals = j["max_evals"].get<int>();
  if (j.contains("ensembles")) {
    cfg.ensembles.clear();
    for (const auto& e : j["ensembles"]) {
      EnsembleSpec spec;
      spec.id = e.at("id").get<std::string>();
      if (e.contains("draws")) spec.draws = e["draws"].get<int>();
      if (e.contains("seed")) spec.seed = e["seed"].get<std::uint64_t>();
      if (e.contains("concentration")) spec.concentration = e["concentration"].get<double>();
      if (e.contains("shapes")) spec.shapes = e["shapes"].get<std::vector<std::vector<int>>>();
      cfg.ensembles.push_back(std::move(spec));
    }
  }
  cfg.bounds.ui = cfg.ui;
  return cfg;
}

int cmd_verify(const std::string& config_path, const GlobalOpts& g) {
  SuiteConfig cfg;
  try {
    cfg = suite_config_from_json(config_path, g);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  const std::vector<PropertyReport> reports = run_suite(cfg);

  int total_violations = 0;
  ordered_json j = ordered_json::array();
  for (const auto& rep : reports) {
    total_violations += rep.violations;
    ordered_json rj;
    rj["property"] = rep.property_id;
    rj["instances"] = rep.instances;
    rj["violations"] = rep.violations;
    rj["worst_slack"] = round6(rep.worst_slack);
    rj["violating_seeds"] = rep.violating_seeds;
    if (!rep.note.empty()) rj["note"] = rep.note;
    j.push_back(rj);
  }
  if (g.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& rep : reports) {
      std::printf("%-9s instances=%-4d violations=%-3d worst_slack=%s%s%s\n",
                  rep.property_id.c_str(), rep.instances, rep.violations,
                  fmt6(rep.worst_slack).c_str(), rep.note.empty() ? "" : "  ",
                  rep.note.c_str());
      if (!rep.violating_seeds.empty()) {
        std::printf("  violating seeds:");
        for (const auto s : rep.violating_seeds) std::printf(" %llu", (unsigned long long)s);
        std::printf("\n");
      }
    }
    std::printf("total violations: %d\n", total_violations);
  }
  return total_violations == 0 ? kExitOk : kExitSuiteViolations;
}

int cmd_random(const std::vector<int>& shape, double concentration, std::uint64_t seed,
               const std::string& out_path) {
  const JointDist d = random_dirichlet(shape, concentration, seed);
  std::map<std::string, std::vector<std::string>> roles;
  if (d.dim() >= 3) {
    roles["s"] = {d.variables()[0].name};
    roles["y"] = {d.variables()[1].name};
    roles["z"] = {d.variables()[2].name};
  }
  if (out_path.empty() || out_path == "-")
    std::cout << write_distribution_canonical(d, roles);
  else
    write_distribution_file(out_path, d, roles);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unique information, secret-key-rate bounds and Blackwell dominance"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--tol", g.tol, "solver gap tolerance in bits")->capture_default_str();
  app.add_option("--restarts", g.restarts, "restarts for the bound searches")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--max-iters", g.max_iters, "iteration cap for the UI solver")
      ->capture_default_str();
  app.add_option("--format", g.format, "output format: table|json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  app.add_option("--role-s", g.role_s, "variables forming the S role")->delimiter(',');
  app.add_option("--role-y", g.role_y, "variables forming the Y role")->delimiter(',');
  app.add_option("--role-z", g.role_z, "variables forming the Z role")->delimiter(',');

  std::string file, config_path, out_path = "-";
  std::vector<int> shape;
  double concentration = 1.0;

  auto* ui = app.add_subcommand("ui", "UI/SI/CI decomposition of a distribution file");
  ui->add_option("file", file, "distribution file")->required();
  auto* bounds = app.add_subcommand("bounds", "secret-key-rate bound chain");
  bounds->add_option("file", file, "distribution file")->required();
  auto* blackwell = app.add_subcommand("blackwell", "Blackwell dominance Z >=_S Y");
  blackwell->add_option("file", file, "distribution file")->required();
  auto* keyrate = app.add_subcommand("keyrate", "one-way secret-key-rate bracket");
  keyrate->add_option("file", file, "distribution file")->required();
  auto* verify = app.add_subcommand("verify", "run the property verification suite");
  verify->add_option("config", config_path, "suite config JSON (default built-in suite)");
  auto* random = app.add_subcommand("random", "write a seeded Dirichlet distribution file");
  random->add_option("--shape", shape, "alphabet sizes, e.g. 2,2,2")->delimiter(',')->required();
  random->add_option("--concentration", concentration, "Dirichlet concentration")
      ->capture_default_str();
  random->add_option("-o,--out", out_path, "output path (default stdout)");

  // Global flags are accepted after the subcommand as well.
  for (auto* sub : {ui, bounds, blackwell, keyrate, verify, random}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (ui->parsed()) return cmd_ui(file, g);
    if (bounds->parsed()) return cmd_bounds(file, g);
    if (blackwell->parsed()) return cmd_blackwell(file, g);
    if (keyrate->parsed()) return cmd_keyrate(file, g);
    if (verify->parsed()) return cmd_verify(config_path, g);
    if (random->parsed()) return cmd_random(shape, concentration, g.seed, out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitHardViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
