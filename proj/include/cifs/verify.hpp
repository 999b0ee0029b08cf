#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cifs::verify {

enum class Status { kPass, kFail, kNotApplicable, kError };

std::string_view to_string(Status status);

struct ClaimResult {
  std::string id;
  std::string anchor;  // the mathematical statement being checked
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json measured = nlohmann::json::object();
  nlohmann::json tolerance = nlohmann::json::object();
  Status status = Status::kError;
  std::string message;
  double seconds = 0;

  nlohmann::json to_json() const;
};

struct Options {
  // Overrides the family of claims that take one (nondecreasing,
  // example2-unbounded); builtin name.
  std::optional<std::string> family;
  std::uint64_t imax = 1000;
  std::uint64_t seed = 42;
  std::uint64_t samples = 1'000'000;
};

struct ClaimInfo {
  std::string id;
  std::string anchor;
};

const std::vector<ClaimInfo>& catalog();

// Unknown ids throw kInvalidArgument. Check failures and library errors
// become report entries.
ClaimResult run_claim(std::string_view id, const Options& options = {});
std::vector<ClaimResult> run_all(const Options& options = {});

// True when no entry failed or errored; not-applicable entries do not count.
bool no_failures(const std::vector<ClaimResult>& results);

}  // namespace cifs::verify
