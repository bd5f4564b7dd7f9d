// Copyright 2026 The Fragalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <optional>

#include "CLI11.hpp"
#include "fragalloc/cost_model.h"
#include "fragalloc/error.h"
#include "fragalloc/policy.h"
#include "fragalloc/rules/engine.h"
#include "fragalloc/rules/parser.h"
#include "fragalloc/scenario.h"
#include "fragalloc/simulator.h"

namespace fragalloc::cli {
namespace {

struct PolicyFlags {
  std::string name;
  std::string file;

  void Attach(CLI::App* cmd) {
    auto* by_name =
        cmd->add_option("--policy", name, "builtin policy (threshold, nna)");
    auto* by_file =
        cmd->add_option("--policy-file", file, "rule file defining move/3");
    by_name->excludes(by_file);
  }

  policy::PolicyRuleSet Resolve(const sim::Scenario& scenario) const {
    if (!file.empty()) return policy::LoadPolicyFile(file);
    if (!name.empty()) return policy::BuiltinPolicy(name);
    return sim::ResolvePolicy(scenario.policy);
  }
};

struct RunFlags {
  std::string scenario;
  PolicyFlags policy;
  std::optional<int64_t> rounds;
  std::string metrics;
  std::string csv;
  bool trace = false;
};

int Run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  sim::Scenario scenario = sim::LoadScenario(flags.scenario);
  policy::PolicyRuleSet rule_set = flags.policy.Resolve(scenario);
  sim::RunOptions options;
  options.rounds = flags.rounds;
  if (flags.trace) options.trace = &err;
  sim::MetricsTimeline timeline = sim::Run(scenario, rule_set, options);
  if (flags.metrics.empty()) {
    sim::WriteJsonLines(timeline, out);
  } else {
    sim::WriteJsonLinesFile(timeline, flags.metrics);
  }
  if (!flags.csv.empty()) sim::WriteCsvFile(timeline, flags.csv);
  if (timeline.failed) {
    err << "error: " << timeline.error << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

int Validate(const std::string& path, std::ostream& out) {
  sim::Scenario scenario = sim::LoadScenario(path);
  policy::CompiledPolicy compiled(sim::ResolvePolicy(scenario.policy));
  out << "ok: " << scenario.model.nodes.size() << " sites, "
      << scenario.model.fragments.size() << " fragments, " << scenario.rounds
      << " rounds, policy " << compiled.rule_set().name << "\n";
  return kExitOk;
}

rules::FactBase InitialFacts(const sim::Scenario& scenario) {
  return cost::EmitNetworkFacts(scenario.model, scenario.initial_stats,
                                scenario.placement);
}

int EmitFacts(const std::string& path, std::ostream& out) {
  out << InitialFacts(sim::LoadScenario(path)).Serialize();
  return kExitOk;
}

int Query(const std::string& path, const std::string& goal_text,
          const PolicyFlags& flags, std::ostream& out, std::ostream& err) {
  sim::Scenario scenario = sim::LoadScenario(path);
  rules::Atom goal = rules::ParseAtom(goal_text);
  policy::CompiledPolicy compiled(flags.Resolve(scenario));
  rules::QueryResult result =
      rules::Query(compiled.program(), InitialFacts(scenario), goal);
  if (result.unknown_predicate) {
    err << "warning: unknown predicate " << goal.predicate << "/"
        << goal.args.size() << "\n";
  }
  for (const rules::Bindings& answer : result.answers) {
    out << rules::Instantiate(goal, answer).ToString() << "\n";
  }
  return kExitOk;
}

int ExportPolicy(const std::string& name, std::ostream& out) {
  out << policy::ExportPolicy(policy::BuiltinPolicy(name));
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Rule-driven fragment allocation simulator", "fragalloc");
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario");
  run_cmd->add_option("scenario", run.scenario, "scenario JSON file")
      ->required();
  run.policy.Attach(run_cmd);
  run_cmd->add_option("--rounds", run.rounds, "override the round count")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--metrics", run.metrics,
                      "JSON-lines output file (default: stdout)");
  run_cmd->add_option("--csv", run.csv, "CSV output file");
  run_cmd->add_flag("--trace", run.trace, "node trace on stderr");

  std::string validate_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a scenario document");
  validate_cmd->add_option("scenario", validate_path)->required();

  std::string emit_path;
  CLI::App* emit_cmd =
      app.add_subcommand("emit-facts", "print the initial fact base");
  emit_cmd->add_option("scenario", emit_path)->required();

  std::string query_path;
  std::string query_goal;
  PolicyFlags query_policy;
  CLI::App* query_cmd = app.add_subcommand(
      "query", "evaluate the policy over the initial facts and match a goal");
  query_cmd->add_option("scenario", query_path)->required();
  query_cmd->add_option("goal", query_goal, "goal atom, e.g. move(X,Y,Z)")
      ->required();
  query_policy.Attach(query_cmd);

  std::string export_name;
  CLI::App* export_cmd =
      app.add_subcommand("export-policy", "print a builtin policy's rules");
  export_cmd->add_option("name", export_name)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitInputError;
  }

  try {
    if (run_cmd->parsed()) return Run(run, out, err);
    if (validate_cmd->parsed()) return Validate(validate_path, out);
    if (emit_cmd->parsed()) return EmitFacts(emit_path, out);
    if (query_cmd->parsed()) {
      return Query(query_path, query_goal, query_policy, out, err);
    }
    if (export_cmd->parsed()) return ExportPolicy(export_name, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitInputError;
}

}  // namespace fragalloc::cli
