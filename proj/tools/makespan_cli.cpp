#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "makespan/makespan.hpp"

namespace fs = std::filesystem;
using namespace makespan;

namespace {

constexpr int kModuleFailure = 1;
constexpr int kUsageFailure = 2;

int fail(std::string_view code, const std::string& message, int status) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
  return status;
}

// Relative output paths land in $MAKESPAN_OUTPUT_DIR when it is set.
std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("MAKESPAN_OUTPUT_DIR");
  if (!dir || !*dir || fs::path(path).is_absolute()) return path;
  fs::create_directories(dir);
  return (fs::path(dir) / path).string();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_file(resolve_output(path), text);
  }
}

struct DiscretizationFlags {
  std::size_t sp = 50;
  double tail_mass = 1e-4;

  void attach(CLI::App* cmd) {
    cmd->add_option("--sp", sp, "Supporting points per distribution")->capture_default_str();
    cmd->add_option("--tail-mass", tail_mass, "Tail probability cut from unbounded families")
        ->capture_default_str();
  }
  DiscretizationConfig config() const {
    DiscretizationConfig c;
    c.sp = sp;
    c.tail_mass = tail_mass;
    c.validate();
    return c;
  }
};

std::string bounds_csv(const std::vector<std::pair<std::string, std::vector<std::pair<std::string, const DiscreteDistribution*>>>>& rows) {
  std::string out = "method,side,value,cumulative_probability\n";
  for (const auto& [method, sides] : rows) {
    for (const auto& [side, d] : sides) {
      for (std::size_t i = 0; i < d->size(); ++i) {
        out += method + "," + side + "," + detail::format_number(d->support()[i]) + "," +
               detail::format_number(d->cumulative()[i]) + "\n";
      }
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Makespan distribution bounds, point estimates and CPU-time benchmarks for "
               "stochastic activity-on-arc project networks.\n"
               "Relative output paths are placed under $MAKESPAN_OUTPUT_DIR when set."};
  app.require_subcommand(1);
  app.fallthrough(false);

  std::string output, format = "json";
  const auto add_output = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    if (with_format) {
      cmd->add_option("--format", format, "Output format")
          ->check(CLI::IsMember({"json", "csv"}))
          ->capture_default_str();
    }
  };

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Interval bounds on the makespan distribution");
  std::string net_path, method = "kleindorfer", spelde_mode = "expectation";
  std::size_t path_cap = kDefaultPathCap;
  DiscretizationFlags disc;
  bounds->add_option("network", net_path, "Network file (.json or .csv)")->required();
  bounds->add_option("--method", method, "Bound method")
      ->check(CLI::IsMember({"kleindorfer", "dodin", "spelde", "all"}))
      ->capture_default_str();
  bounds->add_option("--spelde-mode", spelde_mode, "Path-length model for Spelde")
      ->check(CLI::IsMember({"expectation", "normal-clt"}))
      ->capture_default_str();
  bounds->add_option("--path-cap", path_cap, "Maximum s-t paths enumerated for Spelde")
      ->capture_default_str();
  disc.attach(bounds);
  add_output(bounds, true);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo makespan simulation");
  std::size_t replications = kDefaultReplications;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  simulate->add_option("network", net_path, "Network file (.json or .csv)")->required();
  simulate->add_option("-n,--n", replications, "Replications")->capture_default_str();
  simulate->add_option("--seed", seed, "Random seed")->capture_default_str();
  simulate->add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  add_output(simulate, true);

  // pert
  auto* pert = app.add_subcommand("pert", "Classic PERT estimate from three-point durations");
  pert->add_option("network", net_path, "Network file (.json or .csv)")->required();
  add_output(pert, false);

  // exact
  auto* exact = app.add_subcommand("exact", "Exact makespan distribution by full enumeration");
  std::size_t limit = kDefaultOutcomeLimit;
  exact->add_option("network", net_path, "Network file (.json or .csv)")->required();
  exact->add_option("--limit", limit, "Maximum joint outcomes")->capture_default_str();
  add_output(exact, true);

  // bench
  auto* bench = app.add_subcommand("bench", "Time the bound methods on a grid and fit the model");
  std::vector<std::size_t> x1{300, 600, 900, 1200}, x2{50, 100, 200};
  std::vector<std::string> methods{"all"};
  std::size_t reps = 3, layers = 10, surface_steps = 30;
  std::string records_path = "bench_records.csv", report_path = "bench_report.json",
              surface_path;
  bench->add_option("--x1", x1, "Activity counts")->delimiter(',')->capture_default_str();
  bench->add_option("--x2", x2, "Supporting points")->delimiter(',')->capture_default_str();
  bench->add_option("--methods", methods,
                    "kleindorfer-upper, kleindorfer-lower, dodin, spelde or all")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--reps", reps, "Timed repetitions per cell")->capture_default_str();
  bench->add_option("--seed", seed, "Network generator seed")->capture_default_str();
  bench->add_option("--layers", layers, "Generator layers")->capture_default_str();
  bench->add_option("--records", records_path, "Records CSV")->capture_default_str();
  bench->add_option("--report", report_path, "Regression report JSON")->capture_default_str();
  bench->add_option("--surface", surface_path, "Fitted-surface CSV (optional)");
  bench->add_option("--surface-steps", surface_steps, "Surface samples per axis")
      ->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the CPU-time model to a records CSV");
  std::string records_in;
  fit->add_option("records", records_in, "Records CSV")->required();
  fit->add_option("--surface", surface_path, "Fitted-surface CSV (optional)");
  fit->add_option("--surface-steps", surface_steps, "Surface samples per axis")
      ->capture_default_str();
  add_output(fit, false);

  // wbs-stats
  auto* wbs = app.add_subcommand("wbs-stats", "Workpackage statistics and KDE density");
  std::string wbs_path, kde_path = "wbs_kde.csv";
  std::optional<double> bandwidth;
  std::size_t kde_points = kDefaultKdePoints;
  wbs->add_option("wbs", wbs_path, "WBS CSV")->required();
  wbs->add_option("--bandwidth", bandwidth, "KDE bandwidth (default: Silverman)");
  wbs->add_option("--points", kde_points, "KDE grid points")->capture_default_str();
  wbs->add_option("--kde", kde_path, "KDE CSV (count,density)")->capture_default_str();
  add_output(wbs, false);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random layered network");
  GeneratorParams gp;
  std::string family = "triangular";
  gen->add_option("--activities", gp.activity_count, "Activity count")->capture_default_str();
  gen->add_option("--layers", gp.layer_count, "Layer count")->capture_default_str();
  gen->add_option("--family", family, "Duration family")->capture_default_str();
  gen->add_option("--seed", gp.seed, "Random seed")->capture_default_str();
  gen->add_option("--support-points", gp.support_points,
                  "Atoms per explicit-discrete duration")
      ->capture_default_str();
  add_output(gen, true);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known |= sub->get_name() == argv[1];
    if (!known) {
      return fail("unknown-subcommand", std::string("unknown subcommand '") + argv[1] + "'",
                  kUsageFailure);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("invalid-flag", e.what(), kUsageFailure);
  }

  try {
    if (*bounds) {
      const auto net = load_network(net_path);
      const auto cfg = disc.config();
      const auto mode =
          spelde_mode == "expectation" ? SpeldeMode::expectation : SpeldeMode::normal_clt;
      json results = json::array();
      std::vector<MakespanBounds> kept;
      std::optional<DodinResult> dodin;
      if (method == "kleindorfer" || method == "all") kept.push_back(kleindorfer_bounds(net, cfg));
      if (method == "dodin" || method == "all") dodin = dodin_upper(net, cfg);
      if (method == "spelde" || method == "all") kept.push_back(spelde_bounds(net, cfg, mode, path_cap));
      for (const auto& b : kept) results.push_back(to_json(b));
      if (dodin) results.push_back(to_json(*dodin));

      if (format == "csv") {
        std::vector<std::pair<std::string, std::vector<std::pair<std::string, const DiscreteDistribution*>>>> rows;
        for (const auto& b : kept) {
          rows.push_back({b.method, {{"lower", &b.lower.distribution}, {"upper", &b.upper.distribution}}});
        }
        if (dodin) rows.push_back({"dodin", {{"upper", &dodin->distribution}}});
        emit(bounds_csv(rows), output);
      } else {
        json out;
        if (results.size() == 1) {
          out = results[0];
        } else {
          out = {{"results", results}};
        }
        out["sp"] = cfg.sp;
        out["tail_mass"] = cfg.tail_mass;
        emit(out.dump(2), output);
      }
    } else if (*simulate) {
      const auto net = load_network(net_path);
      const auto r = montecarlo(net, replications, seed, workers);
      emit(format == "csv" ? cdf_csv(r.empirical) : to_json(r, net).dump(2), output);
    } else if (*pert) {
      const auto net = load_network(net_path);
      emit(to_json(pert_estimate(net), net).dump(2), output);
    } else if (*exact) {
      const auto net = load_network(net_path);
      const auto d = exact_distribution(net, limit);
      json j{{"method", "exact"},
             {"distribution", to_json(d)},
             {"mean", d.mean()},
             {"variance", d.variance()}};
      emit(format == "csv" ? cdf_csv(d) : j.dump(2), output);
    } else if (*bench) {
      GridConfig grid;
      grid.methods.clear();
      for (const auto& m : methods) {
        if (m == "all") {
          grid.methods.assign(kAllBenchMethods.begin(), kAllBenchMethods.end());
        } else if (auto bm = parse_bench_method(m)) {
          grid.methods.push_back(*bm);
        } else {
          return fail("invalid-flag", "unknown benchmark method '" + m + "'", kUsageFailure);
        }
      }
      grid.x1 = x1;
      grid.x2 = x2;
      grid.repetitions = reps;
      grid.seed = seed;
      grid.layer_count = layers;
      const auto records = run_grid(grid);
      const auto report = analyze(records);
      emit(records_csv(records), records_path);
      emit(to_json(report).dump(2), report_path);
      if (!surface_path.empty()) {
        const double x1_hi = double(*std::max_element(x1.begin(), x1.end()));
        const double x2_hi = double(*std::max_element(x2.begin(), x2.end()));
        emit(surface_csv(report.models, 1, x1_hi, 1, x2_hi, surface_steps), surface_path);
      }
      std::size_t failed = 0;
      for (const auto& r : records) failed += !r.error.empty();
      json summary{{"records", resolve_output(records_path)},
                   {"report", resolve_output(report_path)},
                   {"rows", records.size()},
                   {"failed_cells", failed},
                   {"seed", seed}};
      if (!surface_path.empty()) summary["surface"] = resolve_output(surface_path);
      std::cout << summary.dump(2) << '\n';
    } else if (*fit) {
      const auto records = parse_records_csv(read_file(records_in));
      const auto report = analyze(records);
      emit(to_json(report).dump(2), output);
      if (!surface_path.empty()) {
        double x1_hi = 1, x2_hi = 1;
        for (const auto& r : records) {
          x1_hi = std::max(x1_hi, double(r.x1));
          x2_hi = std::max(x2_hi, double(r.x2));
        }
        emit(surface_csv(report.models, 1, x1_hi, 1, x2_hi, surface_steps), surface_path);
      }
    } else if (*wbs) {
      const auto records = parse_wbs(read_file(wbs_path));
      const auto stats = workpackage_stats(records);
      const auto curve = kde(counts_of(records), bandwidth ? bandwidth : std::optional<double>(),
                             kde_points);
      emit(kde_csv(curve), kde_path);
      json j = to_json(stats);
      j["kde"] = resolve_output(kde_path);
      j["kde_bandwidth"] = curve.bandwidth;
      emit(j.dump(2), output);
    } else if (*gen) {
      const auto f = parse_family(family);
      if (!f) return fail("invalid-flag", "unknown duration family '" + family + "'", kUsageFailure);
      gp.family = *f;
      const auto net = generate_random(gp);
      if (format == "csv") {
        emit("# generated: activities=" + std::to_string(gp.activity_count) +
                 " layers=" + std::to_string(gp.layer_count) + " family=" + family +
                 " seed=" + std::to_string(gp.seed) + "\n" + to_csv(net),
             output);
      } else {
        json j = to_json(net);
        j["generator"] = {{"activities", gp.activity_count},
                          {"layers", gp.layer_count},
                          {"family", family},
                          {"seed", gp.seed},
                          {"support_points", gp.support_points}};
        emit(j.dump(2), output);
      }
    }
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.detail(), kModuleFailure);
  } catch (const std::exception& e) {
    return fail("io-error", e.what(), kModuleFailure);
  }
  return 0;
}
