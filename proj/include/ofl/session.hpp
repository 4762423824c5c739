#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ofl/audit.hpp"
#include "ofl/frac.hpp"
#include "ofl/rounding.hpp"

namespace ofl {

enum class PipelineMode { kFractional, kIntegral };

struct ClientOutcome {
  std::int64_t updates = 0;
  std::int64_t tau = 0;
  std::vector<std::int32_t> opened_now;  // facilities opened while serving this client
  std::optional<Connection> connection;
};

// Drives the fractional engine over one request sequence and, in integral
// mode, feeds its opening increments to the rounding engine and connects each
// served client. All named audits hook in here.
class Session {
 public:
  Session(const ClusterIndex& ix, PipelineMode mode, AuditContext* audit = nullptr,
          FracConfig frac_cfg = {});

  ClientOutcome serve(std::int32_t client);
  // Run-level audits (dual near-feasibility, opening and connection bounds,
  // feasibility of the integral solution).
  void finish();

  FracEngine& frac() { return frac_; }
  const FracEngine& frac() const { return frac_; }
  RoundEngine* round() { return round_ ? round_.get() : nullptr; }
  const RoundEngine* round() const { return round_ ? round_.get() : nullptr; }
  PipelineMode mode() const { return mode_; }

  std::int64_t int_total_cost() const;

 private:
  void audit_update(const UpdateDelta& delta);

  const ClusterIndex& ix_;
  PipelineMode mode_;
  AuditContext* audit_;
  FracEngine frac_;
  std::unique_ptr<RoundEngine> round_;

  AuditChannel primal_growth_;
  AuditChannel dual_growth_;
  AuditChannel saturation_;
  AuditChannel monotone_;
  AuditChannel dual_split_;
  AuditChannel alpha_bound_;
  AuditChannel good_distance_;
  AuditChannel beta_sum_;
  AuditChannel augment_bound_;
  AuditChannel zero_cost_;
  AuditChannel primal_dual_;
  AuditChannel half_coverage_;
  AuditChannel opening_bound_;
  AuditChannel connection_tau_;
  AuditChannel connection_total_;
  AuditChannel feasible_;
};

}  // namespace ofl
