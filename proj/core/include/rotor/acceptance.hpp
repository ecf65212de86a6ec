#pragma once

// End-to-end acceptance checks shared by `rotorpulse validate` and the
// acceptance test binary. Each check reports what it measured next to what
// it expected, so a failing line is self-explanatory.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rotor {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string expected;
};

struct AcceptanceOptions {
  /// Sweep workers; 0 selects the hardware concurrency.
  unsigned workers = 0;
  /// Seed of the random points of the method cross-check.
  std::uint64_t seed = 20240611;
};

inline constexpr int kCriterionCount = 11;

/// Runs criteria on demand and caches the P = 1.5 drop sweep that several
/// of them share.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(AcceptanceOptions options = {});
  ~AcceptanceSuite();
  AcceptanceSuite(const AcceptanceSuite&) = delete;
  AcceptanceSuite& operator=(const AcceptanceSuite&) = delete;

  /// id in 1..kCriterionCount; throws DomainError otherwise.
  CriterionResult run(int id);
  /// Empty `ids` runs every criterion.
  std::vector<CriterionResult> run_all(std::span<const int> ids = {});

 private:
  struct Cache;
  AcceptanceOptions options_;
  std::unique_ptr<Cache> cache_;
};

std::vector<CriterionResult> run_acceptance(std::span<const int> ids = {},
                                            const AcceptanceOptions& options = {});

/// "PASS  [ 1] name  measured=...  expected=..."
std::string format_criterion(const CriterionResult& result);
std::string format_report(std::span<const CriterionResult> results);
bool all_passed(std::span<const CriterionResult> results);

}  // namespace rotor
