#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "fvcg/analysis.hpp"
#include "fvcg/config.hpp"
#include "fvcg/csv.hpp"
#include "fvcg/errors.hpp"
#include "fvcg/model.hpp"
#include "fvcg/trainer.hpp"

namespace fvcg::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string model_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

// Thrown for property-suite failures so that every command shares one exit
// path.
struct PropertyFailure {};

RunConfig load(const Options& o) {
  RunConfig c = o.config_path.empty() ? default_run_config() : load_run_config(o.config_path);
  if (o.seed) {
    c.training.seed = *o.seed;
    c.check.seed = *o.seed;
  }
  c.validate();
  return c;
}

std::vector<Scenario> scenarios_or_reference(const RunConfig& c) {
  if (!c.scenarios.empty()) return c.scenarios;
  auto all = equal_quality_scenarios();
  for (auto& s : equal_cost_type_scenarios()) all.push_back(std::move(s));
  return all;
}

AdjustmentModel load_checked_model(const Options& o, const RunConfig& c) {
  if (o.model_path.empty()) throw ConfigError("--model is required for this command");
  AdjustmentModel m = load_model(o.model_path);
  if (m.n != c.n) {
    throw ConfigError("model was trained for n=" + std::to_string(m.n) + " but the config has n=" +
                      std::to_string(c.n));
  }
  if (m.spec_hash != spec_hash(c.economy(), c.n)) {
    throw ConfigError("model was trained for a different economy (spec hash " + m.spec_hash + ")");
  }
  return m;
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

// With --out the table is written to DIR/name, otherwise to stdout.
void emit(const Options& o, const CsvTable& table, const std::string& name, std::ostream& out) {
  if (o.out_dir.empty()) {
    out << write_csv(table);
    return;
  }
  const fs::path path = out_dir(o) / name;
  save_csv(table, path);
  out << "wrote " << path.string() << "\n";
}

TrainingResult train_and_save(const RunConfig& c, const fs::path& model_path,
                              const fs::path& curve_path, std::ostream& out) {
  try {
    TrainingResult result = train(c.economy(), c.n, c.training);
    save_model(result.model, model_path);
    save_csv(loss_curve_table(result.curve), curve_path);
    out << "wrote " << model_path.string() << "\n" << "wrote " << curve_path.string() << "\n";
    return result;
  } catch (const TrainingAborted& e) {
    save_csv(loss_curve_table(e.curve()), curve_path);
    out << "wrote partial " << curve_path.string() << "\n";
    throw;
  }
}

void cmd_solve(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const EconomicSpec spec = c.economy();
  std::vector<ScenarioResult> results;
  for (const auto& s : scenarios_or_reference(c)) {
    results.push_back(solve_scenario(spec, c.training, s));
  }
  emit(o, scenario_table(results), "solve.csv", out);
}

void cmd_train(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const fs::path dir = out_dir(o);
  const fs::path model_path = o.model_path.empty() ? dir / "model.json" : fs::path(o.model_path);
  const auto result = train_and_save(c, model_path, dir / "loss_curve.csv", out);
  if (!result.curve.empty()) {
    const auto& last = result.curve.back();
    out << "final loss " << format_number(last.total) << " (loss1 " << format_number(last.loss1)
        << ", loss2 " << format_number(last.loss2) << ", loss3 " << format_number(last.loss3)
        << ")\n";
  }
}

void cmd_evaluate(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const AdjustmentModel m = load_checked_model(o, c);
  const EconomicSpec spec = c.economy();
  std::vector<ScenarioResult> results;
  for (const auto& s : scenarios_or_reference(c)) {
    results.push_back(evaluate_scenario(spec, c.training, m, s));
  }
  emit(o, scenario_table(results), "evaluate.csv", out);
}

void cmd_surface(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const AdjustmentModel m = load_checked_model(o, c);
  emit(o, payment_surface(c.economy(), m), "surface.csv", out);
}

void cmd_check(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  std::optional<AdjustmentModel> m;
  if (!o.model_path.empty()) m = load_checked_model(o, c);
  bool ok = true;
  for (const auto& r : run_check_suites(c, m ? &*m : nullptr)) {
    const char* verdict = !r.asserted ? "REPORT" : (r.passed() ? "PASS" : "FAIL");
    out << verdict << "  " << r.name << ": " << r.summary << "\n";
    for (const auto& e : r.examples) out << "        " << e << "\n";
    ok = ok && r.passed();
  }
  if (!ok) throw PropertyFailure{};
}

void cmd_reproduce(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const fs::path dir = out_dir(o);
  const EconomicSpec spec = c.economy();
  if (c.n != 10) throw ConfigError("reproduce needs the ten-owner economy (economy.n = 10)");

  AdjustmentModel m;
  if (o.model_path.empty()) {
    m = train_and_save(c, dir / "model.json", dir / "loss_curve.csv", out).model;
  } else {
    m = load_checked_model(o, c);
  }

  const auto table = [&](const std::vector<Scenario>& scenarios, const std::string& name) {
    std::vector<ScenarioResult> results;
    for (const auto& s : scenarios) results.push_back(evaluate_scenario(spec, c.training, m, s));
    save_csv(scenario_table(results), dir / name);
    out << "wrote " << (dir / name).string() << "\n";
  };
  table(equal_quality_scenarios(), "table1.csv");
  table(equal_cost_type_scenarios(), "table2.csv");
  save_csv(payment_surface(spec, m), dir / "surface.csv");
  out << "wrote " << (dir / "surface.csv").string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated data-owner payments: solve, train, evaluate and check"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "run configuration (JSON)");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides the training and check seeds");
  };

  auto* solve = app.add_subcommand("solve", "acceptance and mechanism payments per scenario");
  auto* train_cmd = app.add_subcommand("train", "train the adjustment networks");
  auto* evaluate = app.add_subcommand("evaluate", "full payments per scenario with a model");
  auto* surface = app.add_subcommand("surface", "owner 0's payment over a quality/cost grid");
  auto* check = app.add_subcommand("check", "sampled property suites");
  auto* reproduce = app.add_subcommand("reproduce", "reference tables, loss curve and surface");
  for (auto* sub : {solve, train_cmd, evaluate, surface, check, reproduce}) add_common(sub);
  train_cmd->add_option("--model", o.model_path, "model output path (default OUT/model.json)");
  for (auto* sub : {evaluate, surface, check, reproduce}) {
    sub->add_option("--model", o.model_path, "trained model (JSON)");
  }

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();  // program name
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  for (auto* sub : {solve, train_cmd, evaluate, surface, check, reproduce}) {
    if (sub->parsed() && sub->count("--seed") > 0) o.seed = seed;
  }

  try {
    if (solve->parsed()) cmd_solve(o, out);
    if (train_cmd->parsed()) cmd_train(o, out);
    if (evaluate->parsed()) cmd_evaluate(o, out);
    if (surface->parsed()) cmd_surface(o, out);
    if (check->parsed()) cmd_check(o, out);
    if (reproduce->parsed()) cmd_reproduce(o, out);
  } catch (const PropertyFailure&) {
    err << "error: property suite failed\n";
    return kPropertyFailure;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const DegenerateRatioError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kSuccess;
}

}  // namespace fvcg::cli
