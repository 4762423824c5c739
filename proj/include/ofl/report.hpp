#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ofl/audit.hpp"
#include "ofl/instance.hpp"

namespace ofl {

struct RunOptions {
  std::string mode = "int";  // frac | int | det
  bool audit = false;
  bool strict = false;
  std::set<std::string> audit_filter;  // empty = all audits
  double q = 64.0;
  bool track_duals = true;
  // Offline optimum is attached automatically up to this many facilities.
  int oracle_limit = 20;
};

struct AuditReportEntry {
  std::string name;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::string first_failure;
};

struct RunReport {
  std::string schema = "ofl-report/1";
  std::string mode;
  std::string digest;
  std::string preprocess_divisor;
  std::int64_t facilities = 0;
  std::int64_t clients = 0;
  std::int64_t requests = 0;
  std::int64_t distances = 0;

  std::optional<double> frac_primal;
  std::optional<std::int64_t> frac_dual;
  std::optional<std::int64_t> frac_connection;
  std::optional<std::int64_t> int_opening;
  std::optional<std::int64_t> int_connection;
  std::optional<std::int64_t> int_total;
  std::optional<std::int64_t> det_total;
  std::optional<std::int64_t> opt_normalized;
  std::optional<std::string> opt_original;

  std::int64_t updates = 0;
  std::int64_t augmentations = 0;
  std::int64_t phi_evaluations = 0;
  std::optional<int> phases;
  std::optional<double> det_R;

  std::vector<AuditReportEntry> audits;
  std::int64_t audit_violations = 0;

  std::optional<double> frac_over_opt;
  std::optional<double> int_over_opt;
  std::optional<double> det_over_opt;
  std::optional<double> primal_over_dual;

  // Purchase log. Int mode fills openings (with the event index that
  // triggered each) and per-client connections; det mode fills the ledger.
  struct OpeningLog {
    std::string facility;
    std::int64_t event;
  };
  struct ConnectionLog {
    std::string client;
    std::string facility;
    std::int64_t cost;
  };
  std::vector<OpeningLog> openings_log;
  std::vector<ConnectionLog> connections_log;
  std::vector<std::string> ledger_facilities;
  std::vector<std::pair<std::string, std::string>> ledger_edges;

  std::string to_json() const;
};

// Runs the selected pipeline (preprocessing included) over the instance's
// request order.
RunReport run_pipeline(const InstanceFile& instance, const RunOptions& options);

// Cross product of the grid; one CSV row per instance, sorted by digest.
struct SweepSpec {
  std::vector<std::string> families;
  std::vector<int> facilities;
  std::vector<int> clients;
  std::vector<int> active;
  std::vector<std::uint64_t> seeds;
  std::int64_t cost_min = 1;
  std::int64_t cost_max = 64;
  double q = 64.0;
};

SweepSpec parse_grid(const std::string& json_text);
std::string sweep_csv(const SweepSpec& spec);

}  // namespace ofl
