#include "ofl/report.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ofl/doubling.hpp"
#include "ofl/error.hpp"
#include "ofl/generator.hpp"
#include "ofl/log.hpp"
#include "ofl/numeric.hpp"
#include "ofl/oracle.hpp"
#include "ofl/session.hpp"

namespace ofl {

namespace {

using nlohmann::json;

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string RunReport::to_json() const {
  json doc;
  doc["schema"] = schema;
  doc["mode"] = mode;
  doc["instance_digest"] = digest;
  doc["preprocess"] = {{"divisor", preprocess_divisor}};
  doc["sizes"] = {{"facilities", facilities},
                  {"clients", clients},
                  {"requests", requests},
                  {"distances", distances}};
  doc["costs"] = {{"frac_primal", opt_json(frac_primal)},
                  {"frac_dual", opt_json(frac_dual)},
                  {"frac_connection", opt_json(frac_connection)},
                  {"int_opening", opt_json(int_opening)},
                  {"int_connection", opt_json(int_connection)},
                  {"int_total", opt_json(int_total)},
                  {"det_total", opt_json(det_total)},
                  {"opt_normalized", opt_json(opt_normalized)},
                  {"opt_original", opt_json(opt_original)}};
  doc["counters"] = {{"updates", updates},
                     {"augmentations", augmentations},
                     {"phi_evaluations", phi_evaluations},
                     {"phases", opt_json(phases)},
                     {"det_R", opt_json(det_R)}};
  doc["audits"] = json::array();
  for (const auto& entry : audits) {
    doc["audits"].push_back({{"name", entry.name},
                             {"checks", entry.checks},
                             {"violations", entry.violations},
                             {"first_failure",
                              entry.first_failure.empty() ? json(nullptr)
                                                          : json(entry.first_failure)}});
  }
  doc["audit_violations"] = audit_violations;
  doc["ratios"] = {{"frac_over_opt", opt_json(frac_over_opt)},
                   {"int_over_opt", opt_json(int_over_opt)},
                   {"det_over_opt", opt_json(det_over_opt)},
                   {"primal_over_dual", opt_json(primal_over_dual)}};
  doc["purchases"] = {{"openings", json::array()},
                      {"connections", json::array()},
                      {"ledger_facilities", ledger_facilities},
                      {"ledger_edges", json::array()}};
  for (const auto& opening : openings_log) {
    doc["purchases"]["openings"].push_back(
        {{"facility", opening.facility}, {"event", opening.event}});
  }
  for (const auto& conn : connections_log) {
    doc["purchases"]["connections"].push_back(
        {{"client", conn.client}, {"facility", conn.facility}, {"cost", conn.cost}});
  }
  for (const auto& [f, c] : ledger_edges) {
    doc["purchases"]["ledger_edges"].push_back({{"facility", f}, {"client", c}});
  }
  return doc.dump(2) + "\n";
}

RunReport run_pipeline(const InstanceFile& instance, const RunOptions& options) {
  if (options.mode != "frac" && options.mode != "int" && options.mode != "det") {
    throw Error(ErrorKind::kParse, "unknown mode: " + options.mode);
  }

  RunReport report;
  report.mode = options.mode;
  report.digest = instance_digest(instance);

  PreprocessResult pre = preprocess(instance.graph);
  report.preprocess_divisor = pre.divisor.str();
  const DistanceScale scale = distance_scale(pre.graph);
  const ClusterIndex ix = clusters(pre.graph, scale);
  report.facilities = ix.facility_count();
  report.clients = ix.client_count();
  report.requests = static_cast<std::int64_t>(instance.requests.size());
  report.distances = ix.distance_count();

  std::optional<AuditContext> audit;
  if (options.audit) audit.emplace(options.strict, options.audit_filter);
  AuditContext* audit_ptr = audit ? &*audit : nullptr;

  if (options.mode == "det") {
    DetConfig config;
    config.q = options.q;
    config.track_duals = options.track_duals;
    DetResult det = run_det(pre.graph, instance.requests, config, audit_ptr);
    report.det_total = det.total_cost;
    report.phases = det.phases;
    report.det_R = det.R;
    report.updates = det.total_updates;
    report.augmentations = det.total_augmentations;
    report.phi_evaluations = det.phi_evaluations;
    report.ledger_facilities.assign(det.purchased_facilities.begin(),
                                    det.purchased_facilities.end());
    report.ledger_edges.assign(det.purchased_edges.begin(), det.purchased_edges.end());
  } else {
    const PipelineMode mode =
        options.mode == "frac" ? PipelineMode::kFractional : PipelineMode::kIntegral;
    Session session(ix, mode, audit_ptr, FracConfig{options.track_duals});
    for (const auto& id : instance.requests) {
      auto pos = ix.client_pos(id);
      if (!pos) throw Error(ErrorKind::kParse, "request references unknown client: " + id);
      session.serve(*pos);
    }
    session.finish();
    report.frac_primal = session.frac().primal_value();
    report.frac_dual = session.frac().dual_value();
    report.frac_connection = session.frac().total_connection_value();
    report.updates = session.frac().total_updates();
    report.augmentations = session.frac().total_augmentations();
    if (const RoundEngine* round = session.round()) {
      report.int_opening = round->opening_cost();
      report.int_connection = round->connection_cost();
      report.int_total = round->total_cost();
      report.phi_evaluations = round->phi_evaluations();
      for (const auto& opening : round->openings()) {
        report.openings_log.push_back({ix.facility_ids[opening.facility], opening.event});
      }
      for (const auto& conn : round->connections()) {
        report.connections_log.push_back(
            {ix.client_ids[conn.client], ix.facility_ids[conn.facility], conn.cost});
      }
    }
  }

  if (report.facilities <= options.oracle_limit) {
    OfflineSolution norm = optimal_offline(pre.graph, instance.requests);
    report.opt_normalized = norm.cost.num();
    OfflineSolution orig = optimal_offline(instance.graph, instance.requests);
    report.opt_original = orig.cost.str();
    if (norm.cost.num() > 0) {
      const double opt = static_cast<double>(norm.cost.num());
      if (report.frac_primal) report.frac_over_opt = *report.frac_primal / opt;
      if (report.int_total) {
        report.int_over_opt = static_cast<double>(*report.int_total) / opt;
      }
      if (report.det_total) {
        report.det_over_opt = static_cast<double>(*report.det_total) / opt;
      }
    }
  }
  if (report.frac_primal && report.frac_dual && *report.frac_dual > 0) {
    report.primal_over_dual = *report.frac_primal / static_cast<double>(*report.frac_dual);
  }

  if (audit) {
    for (const auto& [name, entry] : audit->entries()) {
      report.audits.push_back({name, entry.checks, entry.violations, entry.first_failure});
    }
    report.audit_violations = audit->total_violations();
  }
  return report;
}

SweepSpec parse_grid(const std::string& json_text) {
  SweepSpec spec;
  try {
    json doc = json::parse(json_text);
    if (!doc.is_object()) throw Error(ErrorKind::kParse, "grid must be a JSON object");
    spec.families = doc.value("families", std::vector<std::string>{"uniform-random"});
    spec.facilities = doc.value("nf", std::vector<int>{4});
    spec.clients = doc.value("nc", std::vector<int>{4});
    spec.active = doc.value("na", std::vector<int>{2});
    spec.seeds = doc.value("seeds", std::vector<std::uint64_t>{0});
    spec.cost_min = doc.value("cost_min", std::int64_t{1});
    spec.cost_max = doc.value("cost_max", std::int64_t{64});
    spec.q = doc.value("q", 64.0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid grid JSON: ") + e.what());
  }
  if (spec.families.empty() || spec.facilities.empty() || spec.clients.empty() ||
      spec.active.empty() || spec.seeds.empty()) {
    throw Error(ErrorKind::kParse, "grid axes must be non-empty");
  }
  return spec;
}

namespace {

struct SweepRow {
  std::string digest;
  std::string text;
};

SweepRow sweep_one(const GeneratorSpec& gen, double q) {
  InstanceFile instance = generate(gen);

  PreprocessResult pre = preprocess(instance.graph);
  const ClusterIndex ix = clusters(pre.graph, distance_scale(pre.graph));
  Session session(ix, PipelineMode::kIntegral, nullptr, FracConfig{false});
  for (const auto& id : instance.requests) {
    session.serve(*ix.client_pos(id));
  }
  DetConfig det_config;
  det_config.q = q;
  det_config.track_duals = false;
  DetResult det = run_det(pre.graph, instance.requests, det_config, nullptr);
  OfflineSolution opt = optimal_offline(pre.graph, instance.requests);

  const double frac = session.frac().primal_value();
  const std::int64_t opt_cost = opt.cost.num();

  std::ostringstream line;
  line << gen.family << ',' << gen.facilities << ',' << gen.clients << ',' << gen.active << ','
       << gen.seed << ',' << format_double(frac) << ',' << session.frac().dual_value() << ','
       << session.int_total_cost() << ',' << det.total_cost << ',' << opt_cost << ',';
  if (opt_cost > 0) line << format_double(frac / static_cast<double>(opt_cost));
  line << ',';
  if (opt_cost > 0) {
    line << format_double(static_cast<double>(det.total_cost) / static_cast<double>(opt_cost));
  }
  line << ',' << format_double(compute_R(gen.facilities, gen.clients));

  SweepRow row;
  row.digest = instance_digest(instance);
  row.text = line.str();
  log_line(LogLevel::kInfo, "sweep: " + row.digest + " " + gen.family);
  return row;
}

}  // namespace

std::string sweep_csv(const SweepSpec& spec) {
  std::vector<GeneratorSpec> grid;
  for (const auto& family : spec.families) {
    for (int nf : spec.facilities) {
      for (int nc : spec.clients) {
        for (int na : spec.active) {
          for (std::uint64_t seed : spec.seeds) {
            if (na > nc) {
              throw Error(ErrorKind::kParse, "grid asks for more active clients than clients");
            }
            GeneratorSpec gen;
            gen.family = family;
            gen.facilities = nf;
            gen.clients = nc;
            gen.active = na;
            gen.cost_min = spec.cost_min;
            gen.cost_max = spec.cost_max;
            gen.seed = seed;
            grid.push_back(gen);
          }
        }
      }
    }
  }

  // Instances are independent, so workers just pull the next index; rows are
  // sorted by digest afterwards, which keeps the file order-independent.
  std::vector<SweepRow> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      try {
        rows[i] = sweep_one(grid[i], spec.q);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(grid.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.digest < b.digest; });
  std::string csv =
      "schema,family,nf,nc,na,seed,frac,dual,int,det,opt,frac_over_opt,det_over_opt,bound_R\n";
  for (const auto& row : rows) {
    csv += "ofl-sweep/1," + row.text + "\n";
  }
  return csv;
}

}  // namespace ofl
