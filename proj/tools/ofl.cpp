// Command-line front end: instance generation, pipeline runs with optional
// invariant auditing, the exhaustive offline optimum, and ratio sweeps.
//
// Exit codes: 0 success, 2 parse/config error, 3 audit failure under
// --strict, 4 oracle size guard, 1 anything else.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ofl/doubling.hpp"
#include "ofl/error.hpp"
#include "ofl/generator.hpp"
#include "ofl/instance.hpp"
#include "ofl/log.hpp"
#include "ofl/oracle.hpp"
#include "ofl/report.hpp"

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ofl::Error(ofl::ErrorKind::kParse, "cannot write output file: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ofl::Error(ofl::ErrorKind::kParse, "cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json solution_json(const ofl::OfflineSolution& solution) {
  json doc;
  doc["open_facilities"] = solution.open_facilities;
  doc["connections"] = json::array();
  for (const auto& [client, facility] : solution.connections) {
    doc["connections"].push_back({{"client", client}, {"facility", facility}});
  }
  doc["cost"] = solution.cost.str();
  return doc;
}

int exit_code_for(const ofl::Error& error) {
  switch (error.kind()) {
    case ofl::ErrorKind::kParse:
    case ofl::ErrorKind::kInvalid:
      return 2;
    case ofl::ErrorKind::kInvariant:
      return 3;
    case ofl::ErrorKind::kSizeGuard:
      return 4;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online non-metric facility location solver"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded instance");
  ofl::GeneratorSpec gen_spec;
  std::string gen_out;
  gen->add_option("--family", gen_spec.family,
                  "uniform-random | layered-distance | star | set-cover-like");
  gen->add_option("--nf", gen_spec.facilities, "Number of facilities")->required();
  gen->add_option("--nc", gen_spec.clients, "Number of clients")->required();
  gen->add_option("--na", gen_spec.active, "Number of requested clients")->required();
  gen->add_option("--seed", gen_spec.seed, "Seed");
  gen->add_option("--cost-min", gen_spec.cost_min, "Smallest generated cost");
  gen->add_option("--cost-max", gen_spec.cost_max, "Largest generated cost");
  gen->add_option("--out", gen_out, "Output instance file")->required();

  // run
  auto* run = app.add_subcommand("run", "Run a pipeline over an instance");
  ofl::RunOptions run_options;
  std::string run_instance;
  std::string run_out;
  std::string run_audits;
  run->add_option("--mode", run_options.mode, "frac | int | det")->required();
  run->add_option("--instance", run_instance, "Instance file")->required();
  run->add_flag("--audit", run_options.audit, "Record every invariant check");
  run->add_flag("--strict", run_options.strict, "Fail on the first audit violation");
  run->add_option("--q", run_options.q, "Budget multiplier for det mode");
  run->add_option("--audits", run_audits, "Comma-separated audit names (default: all)");
  bool no_duals = false;
  run->add_flag("--no-duals", no_duals, "Skip dual bookkeeping");
  run->add_option("--oracle-limit", run_options.oracle_limit,
                  "Attach the offline optimum up to this many facilities");
  run->add_option("--out", run_out, "Output report file")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive offline optimum");
  std::string oracle_instance;
  std::string oracle_out;
  bool oracle_worst = false;
  double oracle_q = 64.0;
  oracle->add_option("--instance", oracle_instance, "Instance file")->required();
  oracle->add_flag("--worst-order", oracle_worst,
                   "Also search the costliest request order for det");
  oracle->add_option("--q", oracle_q, "Budget multiplier for --worst-order");
  oracle->add_option("--out", oracle_out, "Output file")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Ratio table over a generator grid");
  std::string sweep_grid;
  std::string sweep_out;
  sweep->add_option("--grid", sweep_grid, "Grid JSON file")->required();
  sweep->add_option("--out", sweep_out, "Output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      ofl::InstanceFile instance = ofl::generate(gen_spec);
      ofl::save_instance(instance, gen_out);
      ofl::log_line(ofl::LogLevel::kInfo, "wrote " + gen_out);
    } else if (run->parsed()) {
      if (!run_audits.empty()) {
        std::stringstream names(run_audits);
        std::string name;
        while (std::getline(names, name, ',')) {
          if (!name.empty()) run_options.audit_filter.insert(name);
        }
        run_options.audit = true;
      }
      run_options.track_duals = !no_duals;
      ofl::InstanceFile instance = ofl::load_instance(run_instance);
      ofl::RunReport report = ofl::run_pipeline(instance, run_options);
      write_file(run_out, report.to_json());
      ofl::log_line(ofl::LogLevel::kInfo,
                    "mode " + report.mode + ": " + std::to_string(report.audit_violations) +
                        " audit violations");
    } else if (oracle->parsed()) {
      ofl::InstanceFile instance = ofl::load_instance(oracle_instance);
      json doc;
      doc["schema"] = "ofl-oracle/1";
      doc["instance_digest"] = ofl::instance_digest(instance);
      doc["original"] = solution_json(ofl::optimal_offline(instance.graph, instance.requests));
      ofl::PreprocessResult pre = ofl::preprocess(instance.graph);
      doc["normalized"] = solution_json(ofl::optimal_offline(pre.graph, instance.requests));
      doc["normalized"]["divisor"] = pre.divisor.str();
      if (oracle_worst) {
        ofl::DetConfig config;
        config.q = oracle_q;
        ofl::WorstOrder worst = ofl::worst_request_order(pre.graph, instance.requests, config);
        doc["worst_order"] = {{"order", worst.order}, {"det_cost", worst.det_cost}};
      }
      write_file(oracle_out, doc.dump(2) + "\n");
    } else if (sweep->parsed()) {
      ofl::SweepSpec spec = ofl::parse_grid(read_file(sweep_grid));
      write_file(sweep_out, ofl::sweep_csv(spec));
    }
  } catch (const ofl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
