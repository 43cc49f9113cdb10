// Command-line front end: validate flows, run scenarios, render reports.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "selfheal/core/flow_graph.hpp"
#include "selfheal/nodes/registry.hpp"
#include "selfheal/report/marble.hpp"
#include "selfheal/report/metrics.hpp"
#include "selfheal/sim/world.hpp"

namespace {

using namespace selfheal;

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kIo = 3;

struct ExitError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ExitError{kValidation, "cannot read " + path};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  out << text;
  if (!out) {
    throw ExitError{kIo, "cannot write " + *path};
  }
}

FlowGraph load_flow(const std::string& path) {
  const auto& registry = nodes::builtin_registry();
  FlowGraph g;
  try {
    g = parse_flow(read_file(path), registry);
  } catch (const FlowError& e) {
    throw ExitError{kValidation, path + ": " + e.what()};
  }
  auto diags = validate_graph(g, registry);
  if (!diags.empty()) {
    std::string msg = path + ": invalid flow";
    for (const auto& d : diags) {
      msg += "\n  " + to_string(d);
    }
    throw ExitError{kValidation, msg};
  }
  return g;
}

sim::ScenarioScript load_scenario(const std::string& path) {
  try {
    return sim::parse_scenario(read_file(path));
  } catch (const sim::ScenarioError& e) {
    throw ExitError{kValidation, path + ": " + e.what()};
  }
}

/// Smallest configured period over flows and devices, divided by four.
TimeMs default_bucket(const std::vector<FlowGraph>& flows, const sim::ScenarioScript* script) {
  std::optional<TimeMs> smallest;
  auto consider = [&](TimeMs v) {
    if (v > 0) {
      smallest = smallest ? std::min(*smallest, v) : v;
    }
  };
  for (const auto& g : flows) {
    for (const auto& n : g.nodes) {
      for (const char* key : {"period", "interval", "expected"}) {
        if (n.config.contains(key) && n.config[key].is_number_integer()) {
          consider(n.config[key].get<TimeMs>());
        }
      }
    }
  }
  if (script) {
    for (const auto& d : script->world.devices) {
      if (d.kind == sim::DeviceKind::PeriodicSensor) {
        consider(d.period);
      }
    }
  }
  return smallest ? std::max<TimeMs>(1, *smallest / 4) : 1000;
}

report::EgressNamer namer_for(const std::vector<FlowGraph>& flows) {
  return [&flows](const std::string&, const std::string& node, int port) -> std::string {
    for (const auto& g : flows) {
      if (const auto* def = g.find(node)) {
        const auto* spec = nodes::builtin_registry().find(def->kind);
        if (spec && spec->egress_count(with_defaults(*spec, def->config)) > 1) {
          return spec->egress_name(def->config, port);
        }
        return {};
      }
    }
    return {};
  };
}

TimelineLog load_timeline(const std::string& path) {
  try {
    return TimelineLog::from_csv(read_file(path));
  } catch (const std::runtime_error& e) {
    throw ExitError{kValidation, path + ": " + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-healing dataflow runtime and fault-injection simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run flows against a scenario");
  std::vector<std::string> flow_paths;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::string format = "csv";
  std::optional<TimeMs> bucket;
  std::optional<std::string> report_path;
  std::optional<std::string> state_dir;
  run->add_option("--flow", flow_paths, "Flow document per instance, or one shared by all")->required();
  run->add_option("--scenario", scenario_path, "Scenario document")->required();
  run->add_option("--seed", seed, "Run seed (overrides the scenario's)");
  run->add_option("--out", out_path, "Output file (default stdout)");
  run->add_option("--format", format, "csv or marble")->check(CLI::IsMember({"csv", "marble"}));
  run->add_option("--bucket-ms", bucket, "Marble bucket width")->check(CLI::PositiveNumber);
  run->add_option("--report", report_path, "Also write a run summary here");
  run->add_option("--state-dir", state_dir, "Keep instance stores in this directory");

  auto* validate = app.add_subcommand("validate", "Check flow documents");
  std::vector<std::string> validate_paths;
  validate->add_option("--flow", validate_paths, "Flow document")->required();

  auto* rep = app.add_subcommand("report", "Compute metrics from a timeline");
  std::string timeline_path;
  std::string metric;
  rep->add_option("--timeline", timeline_path, "Timeline CSV")->required();
  rep->add_option("--metric", metric, "mttr, loss or summary")
      ->required()
      ->check(CLI::IsMember({"mttr", "loss", "summary"}));

  auto* marble = app.add_subcommand("marble", "Render a marble diagram from a timeline");
  std::string marble_timeline;
  std::vector<std::string> marble_nodes;
  std::optional<TimeMs> marble_bucket;
  std::vector<std::string> marble_flows;
  std::optional<std::string> marble_scenario;
  marble->add_option("--timeline", marble_timeline, "Timeline CSV")->required();
  marble->add_option("--nodes", marble_nodes, "Only these nodes")->delimiter(',');
  marble->add_option("--bucket-ms", marble_bucket, "Bucket width")->check(CLI::PositiveNumber);
  marble->add_option("--flow", marble_flows, "Flow documents, for egress names and the default bucket");
  marble->add_option("--scenario", marble_scenario, "Scenario document, for the default bucket");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      std::vector<FlowGraph> flows;
      for (const auto& p : flow_paths) {
        flows.push_back(load_flow(p));
      }
      auto script = load_scenario(scenario_path);
      if (seed) {
        script.seed = *seed;
      }
      sim::World::Options opts;
      if (state_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*state_dir, ec);
        if (ec) {
          throw ExitError{kIo, "cannot create " + *state_dir + ": " + ec.message()};
        }
        opts.state_dir = *state_dir;
      }
      TimelineLog log;
      try {
        log = sim::run_scenario(flows, script, nodes::builtin_registry(), opts);
      } catch (const sim::ScenarioError& e) {
        throw ExitError{kValidation, e.what()};
      } catch (const FlowError& e) {
        throw ExitError{kValidation, e.what()};
      } catch (const persistence::StoreError& e) {
        throw ExitError{kIo, e.what()};
      }
      if (format == "marble") {
        const TimeMs width = bucket.value_or(default_bucket(flows, &script));
        write_output(out_path, report::build_marble(log, width, {}, namer_for(flows)).render());
      } else {
        write_output(out_path, log.to_csv());
      }
      if (report_path) {
        write_output(*report_path, report::format_summary(report::build_report(log, script.duration)));
      }
      return kOk;
    }
    if (*validate) {
      int code = kOk;
      for (const auto& p : validate_paths) {
        try {
          load_flow(p);
          std::cout << p << ": ok\n";
        } catch (const ExitError& e) {
          std::cerr << e.message << "\n";
          code = e.code;
        }
      }
      return code;
    }
    if (*rep) {
      const auto log = load_timeline(timeline_path);
      if (metric == "mttr") {
        std::cout << report::format_mttr(log);
      } else if (metric == "loss") {
        std::cout << report::format_loss(log);
      } else {
        std::cout << report::format_summary(report::build_report(log));
      }
      return kOk;
    }
    if (*marble) {
      const auto log = load_timeline(marble_timeline);
      std::vector<FlowGraph> flows;
      for (const auto& p : marble_flows) {
        flows.push_back(load_flow(p));
      }
      std::optional<sim::ScenarioScript> script;
      if (marble_scenario) {
        script = load_scenario(*marble_scenario);
      }
      const TimeMs width = marble_bucket.value_or(default_bucket(flows, script ? &*script : nullptr));
      try {
        std::cout << report::build_marble(log, width, marble_nodes, namer_for(flows)).render();
      } catch (const std::invalid_argument& e) {
        throw ExitError{kValidation, e.what()};
      }
      return kOk;
    }
  } catch (const ExitError& e) {
    std::cerr << "selfheal: " << e.message << "\n";
    return e.code;
  }
  return kOk;
}
