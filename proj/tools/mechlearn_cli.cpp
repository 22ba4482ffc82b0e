// mechlearn: generate scenarios, run learners, drive adversaries and check
// mistake bounds from the command line.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mechlearn/harness.hpp"
#include "mechlearn/run_config.hpp"
#include "mechlearn/scenario_json.hpp"
#include "mechlearn/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mechlearn;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Round streams use a seed derived from the scenario seed so that both can
// be reproduced from one number.
constexpr std::uint64_t kRoundSeedSalt = 0x9e3779b97f4a7c15ULL;

struct CommonArgs {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& out_help) {
  cmd->add_option("--seed", args.seed, "Seed (overrides the config)");
  cmd->add_option("--out", args.out, out_help);
  cmd->add_option("--config", args.config, "JSON config file")->check(CLI::ExistingFile);
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig c = args.config.empty() ? RunConfig{} : parse_run_config(read_text(args.config));
  if (args.seed) c.seed = *args.seed;
  if (!args.out.empty()) c.out = args.out;
  return c;
}

std::string config_dir(const CommonArgs& args) {
  return args.config.empty() ? std::string{} : fs::path(args.config).parent_path().string();
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

LearnerKind learner_for(const RunConfig& c, const Scenario& s) {
  if (c.learner) return *c.learner;
  for (LearnerKind k : all_learner_kinds()) {
    if (compatible(k, s)) return k;
  }
  throw InputError("no learner handles this scenario");
}

void finish_summary(RunSummary& sum, BoundFormula formula) {
  sum.formula = formula;
  const BoundCheck check = verify_bound(formula, sum.n, sum.m, sum.value_cap, sum.total_mistakes);
  sum.bound = check.bound;
  sum.margin = check.margin;
  sum.pass = check.pass && sum.diagnostic.empty();
}

void print_summary(const RunSummary& sum) {
  std::cout << sum.learner << ": " << sum.total_mistakes << " mistakes in " << sum.rounds
            << " rounds, bound " << to_string(sum.formula) << " = " << sum.bound << " -> "
            << (sum.pass ? "PASS" : "FAIL") << "\n";
  if (!sum.diagnostic.empty()) std::cout << "  " << sum.diagnostic << "\n";
}

int cmd_gen_scenario(const CommonArgs& args) {
  const RunConfig c = load_config(args);
  const GeneratorParams params = c.generator.value_or(GeneratorParams{});
  const std::string text = scenario_to_json(gen_random_scenario(c.seed, params)) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
  }
  return 0;
}

int cmd_run(const CommonArgs& args) {
  const RunConfig c = load_config(args);
  const Scenario s = resolve_scenario(c, config_dir(args));
  const LearnerKind kind = learner_for(c, s);
  auto learner = make_learner(kind, s, c.seed, c.sampler);
  const auto rounds = random_rounds(s, c.rounds, c.seed ^ kRoundSeedSalt, c.arrival_prob);
  RunResult result = run_trace(s, *learner, rounds);
  finish_summary(result.summary, c.formula.value_or(default_bound(kind)));
  print_summary(result.summary);
  if (!c.out.empty()) {
    const fs::path dir = prepare_out_dir(c.out);
    write_csv(result.trace, dir / "trace.csv");
    write_text(dir / "summary.json", summary_to_json(result.summary));
    write_text(dir / "scenario.json", scenario_to_json(s) + "\n");
  }
  return result.summary.pass ? 0 : kExitFail;
}

int cmd_converge(const CommonArgs& args) {
  const RunConfig c = load_config(args);
  const Scenario s = resolve_scenario(c, config_dir(args));
  const LearnerKind kind = learner_for(c, s);
  auto learner = make_learner(kind, s, c.seed, c.sampler);
  const BoundFormula formula = c.formula.value_or(default_bound(kind));
  const ConvergeResult r =
      run_until_converged(s, *learner, formula, {c.clean_passes, c.max_passes});

  RunSummary sum;
  sum.learner = learner->name();
  sum.n = s.n;
  sum.m = s.m;
  sum.value_cap = s.value_cap;
  sum.rounds = static_cast<long>(r.passes) * static_cast<long>(convergence_pool(s).size());
  sum.total_mistakes = r.total_mistakes;
  sum.diagnostic = r.diagnostic;
  finish_summary(sum, formula);
  sum.pass = sum.pass && r.converged;
  print_summary(sum);
  std::cout << "  passes " << r.passes << (r.converged ? ", converged" : ", not converged")
            << "\n";
  if (!c.out.empty()) {
    const fs::path dir = prepare_out_dir(c.out);
    json j = json::parse(summary_to_json(sum));
    j["passes"] = r.passes;
    j["converged"] = r.converged;
    write_text(dir / "summary.json", j.dump(2) + "\n");
  }
  return sum.pass ? 0 : kExitFail;
}

int cmd_adversary(const CommonArgs& args) {
  const RunConfig c = load_config(args);
  if (!c.adversary) throw InputError("adversary: config needs an \"adversary\" object");
  auto adv = make_adversary(*c.adversary, c.seed);
  LearnerKind kind;
  if (c.learner) {
    kind = *c.learner;
  } else if (c.adversary->kind == "mergesort") {
    kind = LearnerKind::kSingleItem;
  } else if (c.adversary->kind == "pairs") {
    kind = LearnerKind::kWinners;
  } else {
    kind = LearnerKind::kUnitDemandPrime;
  }
  // Learners are sized from the scenario the adversary will eventually
  // extract; its shape is fixed before the first round.
  const Scenario shape = adv->extract_consistent_scenario();
  auto learner = make_learner(kind, shape, c.seed, c.sampler);
  RunResult result = run_adversary(*adv, *learner);
  const std::string replay = replay_mismatch(*adv);
  RunSummary& sum = result.summary;
  if (!replay.empty() && sum.diagnostic.empty()) sum.diagnostic = "replay: " + replay;
  finish_summary(sum, c.formula.value_or(default_bound(kind)));
  print_summary(sum);
  std::cout << "  " << adv->name() << " forced " << adv->forced_mistakes()
            << " mistakes; replay " << (replay.empty() ? "ok" : "MISMATCH") << "\n";
  if (!c.out.empty()) {
    const fs::path dir = prepare_out_dir(c.out);
    write_csv(result.trace, dir / "trace.csv");
    json j = json::parse(summary_to_json(sum));
    j["adversary"] = adv->name();
    j["forced_mistakes"] = adv->forced_mistakes();
    j["replay_ok"] = replay.empty();
    write_text(dir / "summary.json", j.dump(2) + "\n");
    write_text(dir / "scenario.json", scenario_to_json(adv->extract_consistent_scenario()) + "\n");
  }
  return sum.pass && replay.empty() ? 0 : kExitFail;
}

int cmd_verify(const CommonArgs& args, const std::string& summary_path,
               const std::string& formula_id) {
  const std::string path = !summary_path.empty() ? summary_path : args.config;
  if (path.empty()) throw InputError("verify: pass --summary or --config with a summary JSON");
  const RunSummary sum = summary_from_json(read_text(path));
  const BoundFormula formula = formula_id.empty() ? sum.formula : parse_bound_formula(formula_id);
  const BoundCheck check = verify_bound(formula, sum.n, sum.m, sum.value_cap, sum.total_mistakes);
  const bool pass = check.pass && sum.diagnostic.empty();
  std::cout << to_string(formula) << ": observed " << check.observed << ", bound " << check.bound
            << ", margin " << check.margin << " -> " << (pass ? "PASS" : "FAIL") << "\n";
  if (!args.out.empty()) {
    const json j = {{"formula", to_string(formula)}, {"bound", check.bound},
                    {"observed", check.observed},    {"margin", check.margin},
                    {"pass", pass}};
    write_text(args.out, j.dump(2) + "\n");
  }
  return pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mistake-bound learners for ordered-arrival mechanisms"};
  app.require_subcommand(1);

  CommonArgs gen_args, run_args, conv_args, adv_args, ver_args;
  auto* gen = app.add_subcommand("gen-scenario", "Generate a random scenario JSON");
  add_common(gen, gen_args, "Scenario file (stdout when omitted)");
  auto* run = app.add_subcommand("run", "Run a learner on a random round stream");
  add_common(run, run_args, "Output directory for trace.csv and summary.json");
  auto* conv = app.add_subcommand("converge", "Enumerate rounds until a clean pass");
  add_common(conv, conv_args, "Output directory for summary.json");
  auto* adv = app.add_subcommand("adversary", "Run a learner against a lower-bound adversary");
  add_common(adv, adv_args, "Output directory for trace.csv, summary.json and scenario.json");
  auto* ver = app.add_subcommand("verify", "Check a summary JSON against a bound formula");
  add_common(ver, ver_args, "Verification result JSON");
  std::string summary_path, formula_id;
  ver->add_option("--summary", summary_path, "Summary JSON (defaults to --config)");
  ver->add_option("--formula", formula_id, "Bound formula id, e.g. 2n^2");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_scenario(gen_args);
    if (*run) return cmd_run(run_args);
    if (*conv) return cmd_converge(conv_args);
    if (*adv) return cmd_adversary(adv_args);
    if (*ver) return cmd_verify(ver_args, summary_path, formula_id);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
