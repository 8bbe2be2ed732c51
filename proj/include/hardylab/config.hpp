#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hardylab/mesh.hpp"

namespace hardylab {

/// One validation problem; line is 0 for a missing key.
struct ConfigIssue {
  int line = 0;
  std::string message;
};

/// Thrown by parse_config with every violation found in the text.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<ConfigIssue> list);
  std::vector<ConfigIssue> issues;
};

/// Validated run configuration. Text format: one `key = value` per line,
/// `#` starts a comment, lists are comma separated.
struct RunConfig {
  std::string command;  ///< hardy | elliptic | wave | schrodinger | hum | semilinear | study
  DomainKind domain = DomainKind::interval;
  double size = 1.0;
  double h = 0.0;
  std::vector<double> h_list;  ///< study levels
  int levels = 3;              ///< hardy: coarse mesh plus levels - 1 nested refinements
  double grading = 0.0;        ///< 0 is off
  int quad_order = 4;
  double lambda = 0.0;
  std::vector<double> lambda_list;  ///< trace battery couplings
  double T = 0.0;
  double dt = 0.0;
  double dt_ratio = 0.5;  ///< study: dt = dt_ratio * h when dt is not given
  double alpha = 0.0;
  double rho = 0.3;
  double tol = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = 1;
  int samples = 64;
  std::vector<double> T_list;
  std::vector<double> eps_list;
  std::string constant = "hardy";  ///< hardy | improved | tu8 | tuu8
  double eps = 1.0;                ///< tuu8 exponent
  std::string load = "one";        ///< one | xN | sin
  std::string task;                ///< elliptic: pohozaev | trace | continuation; hum: control | scan | gramian
  std::string system = "wave";     ///< wave | schrodinger
  std::string check;               ///< study: pohozaev | trace | multiplier | hardy | improved | tu8 | semilinear
  std::string output = "out";

  /// Sorted key = value lines of every key that was set except output, used for hashing.
  std::string canonical;
  [[nodiscard]] std::uint64_t hash() const;
  [[nodiscard]] int dim() const { return domain == DomainKind::interval ? 1 : 2; }
};

/// Parses and validates; throws ConfigError listing all violations.
RunConfig parse_config(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

}  // namespace hardylab
