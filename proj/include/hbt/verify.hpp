#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hbt::verify {

enum class Suite { fock, closed_form, coulomb, all };

/// "fock", "closed-form", "coulomb", "all". Throws std::invalid_argument otherwise.
Suite parse_suite(std::string_view name);
std::string_view to_string(Suite suite);

struct Options {
  /// Runs the fock suite against an algebra that ignores the fermionic
  /// exchange sign. Every sign-sensitive check should then fail.
  bool mutate_exchange_sign = false;
  unsigned threads = 1;
};

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Report {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string text() const;
  nlohmann::ordered_json json() const;
};

/// Runs every check of `suite` (all three for Suite::all). `progress`, if set,
/// is called after each check.
Report run(Suite suite, const Options& options,
           const std::function<void(const CheckResult&)>& progress = {});

}  // namespace hbt::verify
