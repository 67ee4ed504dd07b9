#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cft/config.hpp"
#include "cft/harness.hpp"

namespace fs = std::filesystem;
using namespace cft;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

/// Writes through a temporary file and renames it into place.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kConfigInvalid, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kConfigInvalid, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void apply_seed(ScenarioConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.adversary_seed = seed;
  c.probes.seed = seed;
  if (c.graph.kind != GraphKind::kEdges) c.graph.seed = seed;
}

std::optional<CheckMode> parse_checks(const std::string& s) {
  if (s == "full") return CheckMode::kFull;
  if (s == "sampled") return CheckMode::kSampled;
  return std::nullopt;
}

/// "1,2,5" or "0..4" or a mix; an empty string is an empty list.
std::vector<std::uint64_t> parse_range(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      auto dots = item.find("..");
      if (dots == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dots));
        const auto hi = std::stoull(item.substr(dots + 2));
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigInvalid, std::string(what) + ": bad range item '" + item + "'");
    }
  }
  return out;
}

struct RunOptions {
  std::string config;
  std::string out;
  bool trace = false;
  std::size_t dot_every = 0;
  std::string checks;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
};

int cmd_run(const RunOptions& o) {
  ScenarioConfig c = load_config(o.config);
  if (o.seed) apply_seed(c, *o.seed);
  if (!o.checks.empty()) {
    auto m = parse_checks(o.checks);
    if (!m) throw Error(ErrorCode::kConfigInvalid, "--checks: expected full or sampled");
    c.checks = *m;
  }
  if (o.print_config) {
    std::cout << dump_config(c);
    return kExitOk;
  }
  if (o.out.empty()) throw Error(ErrorCode::kConfigInvalid, "output directory required");
  const fs::path out = o.out;
  std::ostringstream trace;
  RunHooks hooks;
  if (o.trace) {
    hooks.on_phase = [&](std::size_t t, NodeId x, const HealingPhase& ph) {
      trace << "# t=" << t << " deleted=" << x << '\n';
      write_trace(trace, ph);
    };
  }
  std::vector<std::pair<std::size_t, std::string>> dots;
  if (o.dot_every > 0) {
    hooks.on_checkpoint = [&](std::size_t t, const Topology& topo) {
      if (t % o.dot_every != 0) return;
      std::ostringstream d;
      write_dot(d, topo);
      dots.emplace_back(t, d.str());
    };
  }
  const Metrics m = run_scenario(c, hooks);
  std::ostringstream js, rows, probes;
  write_metrics_json(js, m);
  write_rows_csv(rows, m);
  write_probes_csv(probes, m);
  write_atomic(out / "metrics.json", js.str());
  write_atomic(out / "deletions.csv", rows.str());
  write_atomic(out / "probes.csv", probes.str());
  if (o.trace) write_atomic(out / "trace.tsv", trace.str());
  for (const auto& [t, text] : dots) {
    write_atomic(out / "dot" / ("t" + std::to_string(t) + ".dot"), text);
  }
  std::cout << "deletions " << m.rows.size() << ", probes " << m.probes << ", violations "
            << m.violations.size() << '\n';
  for (const auto& v : m.violations) {
    std::cerr << "violation t=" << v.t << " " << to_string(v.check) << ": " << v.counterexample
              << '\n';
  }
  return m.violations.empty() ? kExitOk : kExitViolation;
}

struct SweepOptions {
  std::string config;
  std::string out;
  std::optional<std::string> n, b, seeds, adversary;
};

int cmd_sweep(const SweepOptions& o) {
  const ScenarioConfig base = load_config(o.config);
  auto list_or = [](const std::optional<std::string>& text, std::uint64_t dflt, const char* what) {
    return text ? parse_range(*text, what) : std::vector<std::uint64_t>{dflt};
  };
  const auto ns = list_or(o.n, base.graph.n, "--n");
  const auto bs = list_or(o.b, base.b, "--b");
  const auto seeds = list_or(o.seeds, base.seed, "--seeds");
  std::vector<StrategyKind> advs;
  if (o.adversary) {
    std::stringstream ss(*o.adversary);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto k = strategy_from_string(item);
      if (!k) throw Error(ErrorCode::kConfigInvalid, "--adversary: unknown strategy " + item);
      advs.push_back(*k);
    }
  } else {
    advs.push_back(base.adversary);
  }
  const fs::path out = o.out;
  std::ostringstream csv;
  csv << "n,b,seed,adversary,exit,deletions,maxDegreeIncrease,diameterStretch,worstSlack,"
         "violations,maxRounds,maxMsgs,maxRefs,maxHeavyChildren\n";
  bool any_violation = false;
  for (auto n : ns) {
    for (auto b : bs) {
      for (auto seed : seeds) {
        for (auto adv : advs) {
          ScenarioConfig c = base;
          if (c.graph.kind != GraphKind::kEdges) c.graph.n = n;
          c.b = static_cast<unsigned>(b);
          c.adversary = adv;
          apply_seed(c, seed);
          const std::string cell = "n" + std::to_string(n) + "_b" + std::to_string(b) + "_s" +
                                   std::to_string(seed) + "_" + to_string(adv);
          csv << n << ',' << b << ',' << seed << ',' << to_string(adv) << ',';
          try {
            const Metrics m = run_scenario(c);
            std::ostringstream js;
            write_metrics_json(js, m);
            write_atomic(out / "cells" / cell / "metrics.json", js.str());
            const double stretch =
                m.diameter_t0 == 0 ? 1.0 : static_cast<double>(m.max_diameter) / m.diameter_t0;
            const int code = m.violations.empty() ? kExitOk : kExitViolation;
            any_violation = any_violation || code != kExitOk;
            csv << code << ',' << m.rows.size() << ',' << m.max_degree_increase << ','
                << stretch << ',' << m.worst_slack << ',' << m.violations.size() << ','
                << m.max_rounds << ',' << m.max_msgs << ',' << m.max_refs << ','
                << m.max_heavy_children << '\n';
          } catch (const Error& e) {
            any_violation = true;
            const int code = e.code() == ErrorCode::kConfigInvalid ? kExitConfig : kExitInternal;
            csv << code << ",,,,,,,,,\n";
            std::cerr << cell << ": " << e.what() << '\n';
          }
        }
      }
    }
  }
  write_atomic(out / "sweep.csv", csv.str());
  return any_violation ? kExitViolation : kExitOk;
}

int cmd_dot(const std::string& config, std::size_t after, const std::string& out) {
  ScenarioConfig c = load_config(config);
  if (c.deletions && after > *c.deletions) {
    throw Error(ErrorCode::kConfigInvalid, "--after exceeds the deletion budget");
  }
  c.deletions = after;
  c.probes.kind = ProbeKind::kNone;
  c.checks = CheckMode::kSampled;
  c.probe_every = after + 1;
  std::string text;
  RunHooks hooks;
  hooks.on_checkpoint = [&](std::size_t, const Topology& topo) {
    std::ostringstream d;
    write_dot(d, topo);
    text = d.str();
  };
  const Metrics m = run_scenario(c, hooks);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_atomic(out, text);
  }
  return m.violations.empty() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-healing compact routing simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario");
  run_cmd->add_option("config", run.config, "Scenario JSON")->required();
  run_cmd->add_option("outdir", run.out, "Output directory");
  run_cmd->add_flag("--trace", run.trace, "Write the message trace");
  run_cmd->add_option("--dot-every", run.dot_every, "Write DOT every K deletions");
  run_cmd->add_option("--checks", run.checks, "full or sampled");
  run_cmd->add_option("--seed", run.seed, "Override every seed");
  run_cmd->add_flag("--print-config", run.print_config, "Print the effective config and exit");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("config", sweep.config, "Template scenario JSON")->required();
  sweep_cmd->add_option("outdir", sweep.out, "Output directory")->required();
  sweep_cmd->add_option("--n", sweep.n, "Node counts, e.g. 20,50,100");
  sweep_cmd->add_option("--b", sweep.b, "Values of b, e.g. 2..4");
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds, e.g. 0..4");
  sweep_cmd->add_option("--adversary", sweep.adversary, "Strategies, comma-separated");

  std::string dot_config, dot_out;
  std::size_t dot_after = 0;
  auto* dot_cmd = app.add_subcommand("dot", "Render T_t after K deletions");
  dot_cmd->add_option("config", dot_config, "Scenario JSON")->required();
  dot_cmd->add_option("--after", dot_after, "Number of deletions K");
  dot_cmd->add_option("-o,--output", dot_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*dot_cmd) return cmd_dot(dot_config, dot_after, dot_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kConfigInvalid ? kExitConfig : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
