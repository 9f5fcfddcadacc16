#include "spectral_lab/cli.hpp"

#include "spectral_lab/cocycle.hpp"
#include "spectral_lab/construction.hpp"
#include "spectral_lab/io.hpp"
#include "spectral_lab/measures.hpp"
#include "spectral_lab/operator.hpp"
#include "spectral_lab/parallel.hpp"
#include "spectral_lab/thouless.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <regex>

namespace spectral_lab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Grid energy_grid(const RunConfig& cfg, const ComposedSampler& v) {
  const auto& n = cfg.numerics;
  if (n.grid_lo) return Grid(*n.grid_lo, *n.grid_hi, n.grid_size);
  const double r = 2.0 + v.sup_bound() + n.grid_margin;
  return n.grid_size == 1 ? Grid(0.0, 0.0, 1) : Grid(-r, r, n.grid_size);
}

json bands_doc(const BandSet& bands, double gap_tol, double weight_tol) {
  return {{"bands", bands_to_json(bands)}, {"count", bands.count()}, {"gap_tol", gap_tol}, {"weight_tol", weight_tol}};
}

void write_ids_csv(const fs::path& path, const Grid& grid, const std::vector<double>& ids) {
  std::vector<std::vector<double>> rows;
  for (std::size_t g = 0; g < grid.size; ++g) rows.push_back({grid.x(g), ids[g]});
  write_csv(path, {"E", "N"}, rows);
}

void write_le_csv(const fs::path& path, const Grid& grid, const std::vector<LyapunovEstimate>& le) {
  std::vector<std::vector<double>> rows;
  for (std::size_t g = 0; g < grid.size; ++g) rows.push_back({grid.x(g), le[g].value, le[g].stderr_});
  write_csv(path, {"E", "L", "stderr"}, rows);
}

std::vector<LyapunovEstimate> direct_le(const RunConfig& cfg, const ComposedSampler& v, const BaseSystem& sys,
                                        const Grid& grid) {
  const auto pts = grid.points();
  return lyapunov_curve(v, sys, pts, cfg.numerics.n, cfg.numerics.M_le, cfg.numerics.seed);
}

int cmd_dos(const RunConfig& cfg, const fs::path& out) {
  const auto sys = make_system(cfg);
  const auto v = make_sampler(cfg);
  const auto& n = cfg.numerics;
  const EmpiricalMeasure nu = empirical_dos(v, sys, n.N, n.M, n.seed);
  const Grid grid = energy_grid(cfg, v);
  std::vector<double> ids(grid.size);
  for (std::size_t g = 0; g < grid.size; ++g) ids[g] = nu.ids(grid.x(g));
  const BandSet bands = support_bands(nu, n.gap_tol, n.weight_tol);
  write_measure_csv(out / "dos.csv", nu);
  write_ids_csv(out / "ids.csv", grid, ids);
  write_json(out / "bands.json", bands_doc(bands, n.gap_tol, n.weight_tol));
  std::cout << "dos: " << nu.size() << " atoms, " << bands.count() << " bands\n";
  return kExitOk;
}

int cmd_lyapunov(const RunConfig& cfg, const fs::path& out) {
  const auto sys = make_system(cfg);
  const auto v = make_sampler(cfg);
  const Grid grid = energy_grid(cfg, v);
  write_le_csv(out / "le_direct.csv", grid, direct_le(cfg, v, sys, grid));
  std::cout << "lyapunov: " << grid.size << " energies\n";
  return kExitOk;
}

int cmd_thouless(const RunConfig& cfg, const fs::path& out) {
  const auto sys = make_system(cfg);
  const auto v = make_sampler(cfg);
  const auto& n = cfg.numerics;
  const Grid grid = energy_grid(cfg, v);
  const EmpiricalMeasure nu = empirical_dos(v, sys, n.N, n.M, n.seed);
  const LogPotentialCurve th = thouless_curve(nu, grid);
  const auto direct = direct_le(cfg, v, sys, grid);
  const BandSet bands = support_bands(nu, n.gap_tol, n.weight_tol);

  std::vector<std::vector<double>> rows;
  double sup_gap = 0.0, worst_E = std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  for (std::size_t g = 0; g < grid.size; ++g) {
    const double E = grid.x(g);
    rows.push_back({E, th.curve.values[g], th.nudged[g] ? 1.0 : 0.0});
    if (bands.edge_distance(E) <= n.edge_exclusion) continue;
    ++used;
    const double d = std::abs(th.curve.values[g] - direct[g].value);
    if (d > sup_gap) {
      sup_gap = d;
      worst_E = E;
    }
  }
  write_csv(out / "le_thouless.csv", {"E", "L", "nudged"}, rows);
  write_le_csv(out / "le_direct.csv", grid, direct);
  json c = {{"sup_gap", sup_gap},
            {"edge_exclusion", n.edge_exclusion},
            {"points_used", used},
            {"points_excluded", grid.size - used},
            {"nudged", th.nudged_count},
            {"bands", bands_to_json(bands)}};
  c["worst_E"] = std::isnan(worst_E) ? json(nullptr) : json(worst_E);
  write_json(out / "consistency.json", c);
  std::cout << "thouless: sup gap " << fmt(sup_gap) << " over " << used << " energies\n";
  return kExitOk;
}

void write_step(const fs::path& out, std::size_t k, const ComposedSampler& v, const StepCurves& c) {
  const std::string s = std::to_string(k);
  write_json(out / ("vn_step" + s + ".json"), sampler_to_json(v));
  write_measure_csv(out / ("dos_step" + s + ".csv"), c.dos);
  write_ids_csv(out / ("ids_step" + s + ".csv"), c.smoothed_dos.grid, c.smoothed_ids);
  std::vector<std::vector<double>> rows;
  for (std::size_t g = 0; g < c.smoothed_le.grid.size; ++g)
    rows.push_back({c.smoothed_le.grid.x(g), c.smoothed_le.values[g]});
  write_csv(out / ("le_step" + s + ".csv"), {"E", "L"}, rows);
}

int cmd_construct(const RunConfig& cfg, const fs::path& out) {
  if (cfg.system.kind != "rotation") throw ConfigError("system.kind", "construct needs a rotation");
  const RotationSystem sys(cfg.system.alpha, cfg.system.depth);
  if (!sys.irrational()) throw ConfigError("system.alpha", "construct needs an irrational rotation");
  const auto v = make_sampler(cfg);
  const auto& k = cfg.construction;
  const ConstructionResult res = run(v, k.eps, k.n_steps, sys, k.params);

  json summary;
  summary["status"] = res.status == RunStatus::ok ? "ok" : res.status == RunStatus::capped ? "capped" : "seed_failed";
  summary["message"] = res.message;
  summary["steps_requested"] = k.n_steps;
  if (res.status == RunStatus::seed_failed) {
    summary["seed_failure"] = {{"fractions", res.seed_failure.fractions}, {"floors", res.seed_failure.floors}};
    write_json(out / "summary.json", summary);
    std::cerr << "construct: seeding failed: " << res.message << "\n";
    return kExitCapped;
  }

  const ConstructionState& s = *res.state;
  for (std::size_t i = 0; i < res.samplers.size(); ++i) write_step(out, i, res.samplers[i], res.curves[i]);
  std::vector<LedgerRow> ledger = s.ledger;
  if (res.failed_row) ledger.push_back(*res.failed_row);
  write_ledger_csv(out / "ledger.csv", ledger);
  const BandSet& final_bands = res.curves.back().bands;
  write_json(out / "bands_final.json",
             {{"bands", bands_to_json(final_bands)}, {"count", final_bands.count()}, {"eps_smooth", s.curves.eps_smooth}});

  summary["steps_passed"] = s.ledger.size();
  summary["L0"] = s.budgets.L0;
  summary["seed_delta"] = s.seed_delta;
  summary["eps_seq"] = s.budgets.eps_seq;
  summary["ell_seq"] = s.budgets.ell_seq;
  summary["eps_smooth"] = s.budgets.eps_smooth;
  summary["cumulative_increment"] = s.cumulative_increment;
  summary["band_count"] = final_bands.count();
  json rows = json::array();
  for (const auto& r : s.ledger) rows.push_back(ledger_row_to_json(r));
  summary["ledger"] = rows;
  if (res.failed_row) summary["failed_row"] = ledger_row_to_json(*res.failed_row);
  write_json(out / "summary.json", summary);

  if (res.status != RunStatus::ok) {
    std::cerr << "construct: " << res.message << "\n";
    return kExitCapped;
  }
  std::cout << "construct: " << s.ledger.size() << " steps passed, " << final_bands.count() << " bands\n";
  return kExitOk;
}

struct ProbeTarget {
  double E;
  std::string role;
};

std::vector<ProbeTarget> probe_targets(const RunConfig& cfg, const ComposedSampler& v, const BaseSystem& sys) {
  std::vector<ProbeTarget> out;
  if (!cfg.walters.energies.empty()) {
    for (double E : cfg.walters.energies) out.push_back({E, "configured"});
    return out;
  }
  const auto& n = cfg.numerics;
  const EmpiricalMeasure nu = empirical_dos(v, sys, n.N, n.M, n.seed);
  const BandSet bands = support_bands(nu, n.gap_tol, n.weight_tol);
  const Grid grid = energy_grid(cfg, v);
  std::vector<double> inside;
  for (double E : grid.points())
    if (bands.contains(E)) inside.push_back(E);
  if (inside.empty()) inside.push_back(bands.bands.front().l);
  const auto le = lyapunov_curve(v, sys, inside, n.n, n.M_le, n.seed);
  std::size_t best = 0;
  for (std::size_t i = 1; i < le.size(); ++i)
    if (le[i].value < le[best].value) best = i;
  out.push_back({inside[best], "min_L"});
  out.push_back({bands.bands.back().r + cfg.walters.outside_offset, "outside"});
  return out;
}

int cmd_walters(const RunConfig& cfg, const fs::path& out) {
  const auto sys = make_system(cfg);
  const auto v = make_sampler(cfg);
  const auto omega = equispaced_omega_grid(cfg.walters.omega_grid);
  std::vector<CocycleStats> all;
  json energies = json::array();
  for (const auto& t : probe_targets(cfg, v, sys)) {
    const auto stats = uniformity_probe(v, sys, t.E, cfg.walters.n_list, omega);
    json per_n = json::array();
    for (const auto& s : stats) per_n.push_back(stats_to_json(s));
    energies.push_back({{"E", t.E}, {"role", t.role}, {"stats", per_n}});
    all.insert(all.end(), stats.begin(), stats.end());
    std::cout << "walters: E=" << fmt(t.E) << " (" << t.role << ") gap(n=" << stats.back().n
              << ")=" << fmt(stats.back().gap()) << "\n";
  }
  write_stats_csv(out / "probe.csv", all);
  write_json(out / "probe_summary.json",
             {{"energies", energies}, {"n_list", cfg.walters.n_list}, {"omega_grid", cfg.walters.omega_grid}});
  return kExitOk;
}

// Dotted overrides (--a.b value or --a.b=value) are taken out of argv before
// CLI11 sees the rest.
struct SplitArgs {
  std::vector<std::string> rest;
  std::vector<std::pair<std::string, std::string>> overrides;
};

SplitArgs split_overrides(int argc, char** argv) {
  SplitArgs out;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--", 0) == 0) {
      const auto eq = a.find('=');
      const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
      if (name.find('.') != std::string::npos) {
        if (eq != std::string::npos) {
          out.overrides.emplace_back(name, a.substr(eq + 1));
        } else {
          if (i + 1 >= argc) throw ConfigError(name, "missing value");
          out.overrides.emplace_back(name, argv[++i]);
        }
        continue;
      }
    }
    out.rest.push_back(a);
  }
  return out;
}

bool check_csv(const fs::path& p, const std::vector<std::string>& header, std::vector<std::string>& problems,
               CsvTable* table = nullptr) {
  try {
    CsvTable t = read_csv(p);
    if (t.header != header) {
      problems.push_back(p.filename().string() + ": unexpected header");
      return false;
    }
    for (const auto& row : t.rows)
      for (double x : row)
        if (!std::isfinite(x)) {
          problems.push_back(p.filename().string() + ": non-finite value");
          return false;
        }
    if (table) *table = std::move(t);
    return true;
  } catch (const std::exception& e) {
    problems.push_back(e.what());
    return false;
  }
}

void check_measure(const fs::path& p, std::vector<std::string>& problems) {
  CsvTable t;
  if (!check_csv(p, {"E", "weight"}, problems, &t)) return;
  double mass = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i][1] < 0.0) problems.push_back(p.filename().string() + ": negative weight");
    if (i && t.rows[i][0] < t.rows[i - 1][0]) problems.push_back(p.filename().string() + ": atoms not sorted");
    mass += t.rows[i][1];
  }
  if (std::abs(mass - 1.0) > 1e-9) problems.push_back(p.filename().string() + ": total weight is not 1");
}

void check_ids(const fs::path& p, std::vector<std::string>& problems) {
  CsvTable t;
  if (!check_csv(p, {"E", "N"}, problems, &t)) return;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double N = t.rows[i][1];
    if (N < -1e-12 || N > 1.0 + 1e-12) problems.push_back(p.filename().string() + ": value outside [0, 1]");
    if (i && N < t.rows[i - 1][1] - 1e-12) problems.push_back(p.filename().string() + ": not nondecreasing");
  }
}

void check_bands(const fs::path& p, std::vector<std::string>& problems) {
  try {
    const json j = read_json(p);
    const BandSet b = bands_from_json(j.at("bands"));
    if (j.at("count").get<std::size_t>() != b.count()) problems.push_back(p.filename().string() + ": count mismatch");
    for (std::size_t i = 0; i < b.count(); ++i)
      if (b.bands[i].l > b.bands[i].r || (i && b.bands[i].l <= b.bands[i - 1].r))
        problems.push_back(p.filename().string() + ": bands not sorted and disjoint");
  } catch (const std::exception& e) {
    problems.push_back(p.filename().string() + ": " + e.what());
  }
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  write_json(out / "config.json", to_json(cfg));
  if (command == "dos") return cmd_dos(cfg, out);
  if (command == "lyapunov") return cmd_lyapunov(cfg, out);
  if (command == "thouless") return cmd_thouless(cfg, out);
  if (command == "construct") return cmd_construct(cfg, out);
  if (command == "walters") return cmd_walters(cfg, out);
  throw std::invalid_argument("unknown command " + command);
}

std::vector<std::string> validate_run_dir(const fs::path& dir) {
  std::vector<std::string> problems;
  if (!fs::is_directory(dir)) return {dir.string() + ": not a directory"};
  if (!fs::exists(dir / "config.json")) problems.push_back("config.json: missing");

  static const std::regex step_re(R"((vn|dos|ids|le)_step(\d+)\.(json|csv))");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path p = entry.path();
    const std::string name = p.filename().string();
    std::smatch m;
    if (name == "config.json") {
      try {
        parse_config(read_json(p));
      } catch (const std::exception& e) {
        problems.push_back(name + ": " + e.what());
      }
    } else if (name == "dos.csv") {
      check_measure(p, problems);
    } else if (name == "ids.csv") {
      check_ids(p, problems);
    } else if (name == "bands.json" || name == "bands_final.json") {
      check_bands(p, problems);
    } else if (name == "le_direct.csv") {
      check_csv(p, {"E", "L", "stderr"}, problems);
    } else if (name == "le_thouless.csv") {
      check_csv(p, {"E", "L", "nudged"}, problems);
    } else if (name == "ledger.csv") {
      check_csv(p, ledger_columns(), problems);
    } else if (name == "probe.csv") {
      check_csv(p, stats_columns(), problems);
    } else if (std::regex_match(name, m, step_re)) {
      const std::string kind = m[1];
      if (kind == "vn") {
        try {
          sampler_from_json(read_json(p));
        } catch (const std::exception& e) {
          problems.push_back(name + ": " + e.what());
        }
      } else if (kind == "dos") {
        check_measure(p, problems);
      } else if (kind == "ids") {
        check_ids(p, problems);
      } else {
        check_csv(p, {"E", "L"}, problems);
      }
    } else if (p.extension() == ".json") {
      try {
        read_json(p);
      } catch (const std::exception& e) {
        problems.push_back(e.what());
      }
    }
  }
  return problems;
}

int run_cli(int argc, char** argv) {
  SplitArgs args;
  try {
    args = split_overrides(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  CLI::App app{"Ergodic Schroedinger operator laboratory", "spectral_lab"};
  std::string command, config_file, out_dir, validate_dir;
  std::optional<unsigned> threads;
  app.add_option("command", command, "dos | lyapunov | thouless | construct | walters")
      ->check(CLI::IsMember({"dos", "lyapunov", "thouless", "construct", "walters"}));
  app.add_option("--config", config_file, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "run directory (overrides output.dir)");
  app.add_option("--threads", threads, "worker cap")->envname("SPECTRAL_LAB_THREADS");
  app.add_option("--validate", validate_dir, "check every output file of a run directory and exit");
  app.footer("Any field can be overridden by its dotted path, e.g. --numerics.N 4000.");

  std::vector<std::string> rest = args.rest;
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (!validate_dir.empty()) {
    const auto problems = validate_run_dir(validate_dir);
    for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
    if (problems.empty()) std::cout << validate_dir << ": valid\n";
    return problems.empty() ? kExitOk : kExitFailure;
  }
  if (command.empty()) {
    std::cerr << "a command is required\n" << app.help();
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    json doc = config_file.empty() ? json::object() : read_json(config_file);
    for (const auto& [path, value] : args.overrides) apply_override(doc, path, value);
    if (!out_dir.empty()) apply_override(doc, "output.dir", json(out_dir).dump());
    if (threads) apply_override(doc, "threads", std::to_string(*threads));
    cfg = parse_config(doc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  set_thread_count(cfg.threads);
  try {
    return run_command(command, cfg, cfg.output_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace spectral_lab
