#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "ofl/error.hpp"

namespace ofl {

// Every runtime guarantee the engines expose for auditing, by name. Audits are
// individually toggleable from the CLI.
inline constexpr const char* kAuditNames[] = {
    "frac.primal_growth_le_3",
    "frac.dual_growth_eq_1",
    "frac.primal_le_3x_dual",
    "frac.saturation_prefix",
    "frac.monotone_updates",
    "frac.dual_split",
    "frac.alpha_lt_2t",
    "frac.beta_sum_le_augments",
    "frac.augment_count_bound",
    "frac.zero_cost_never_augmented",
    "frac.good_distance",
    "round.phi_initial_2ell",
    "round.phi_monotone",
    "round.phi_branch_exists",
    "round.half_coverage",
    "round.opening_cost_bound",
    "round.connection_le_tau",
    "round.connection_total_2x",
    "int.feasible",
    "det.phase_budget",
    "det.phase_spend_bound",
    "det.feasible",
};

struct AuditEntry {
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::string first_failure;
};

class AuditContext;

// Cheap per-check handle; inactive channels cost a branch.
class AuditChannel {
 public:
  AuditChannel() = default;
  bool active() const { return entry_ != nullptr; }
  void check(bool ok, const std::function<std::string()>& context = {}) const;

 private:
  friend class AuditContext;
  AuditChannel(std::string name, AuditEntry* entry, bool strict)
      : name_(std::move(name)), entry_(entry), strict_(strict) {}
  std::string name_;
  AuditEntry* entry_ = nullptr;
  bool strict_ = false;
};

// Collects per-invariant pass/fail tallies. In strict mode the first
// violation throws kInvariant instead of being recorded.
class AuditContext {
 public:
  explicit AuditContext(bool strict = false, std::set<std::string> enabled = {})
      : strict_(strict), enabled_(std::move(enabled)) {}

  bool enabled(std::string_view name) const {
    return enabled_.empty() || enabled_.count(std::string(name)) > 0;
  }

  AuditChannel channel(const std::string& name) {
    if (!enabled(name)) return {};
    return AuditChannel(name, &entries_[name], strict_);
  }

  const std::map<std::string, AuditEntry>& entries() const { return entries_; }

  std::int64_t total_violations() const {
    std::int64_t total = 0;
    for (const auto& [name, entry] : entries_) total += entry.violations;
    return total;
  }

  bool strict() const { return strict_; }

 private:
  bool strict_;
  std::set<std::string> enabled_;
  std::map<std::string, AuditEntry> entries_;
};

inline void AuditChannel::check(bool ok, const std::function<std::string()>& context) const {
  if (entry_ == nullptr) return;
  ++entry_->checks;
  if (ok) return;
  ++entry_->violations;
  std::string detail = context ? context() : std::string("(no context)");
  if (entry_->first_failure.empty()) entry_->first_failure = detail;
  if (strict_) throw Error(ErrorKind::kInvariant, name_ + ": " + detail);
}

}  // namespace ofl
