#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "nsode/problem.hpp"

namespace nsode {

using ParamMap = std::map<std::string, double>;

/// A registry problem together with its documented initial state and horizon.
struct BuiltinProblem {
  std::string name;
  std::variant<PiecewiseProblem, std::shared_ptr<const SppProblem>> problem;
  Vector default_x0;
  double default_t_end = 1.0;

  bool is_spp() const noexcept { return problem.index() == 1; }
  /// Null for plain piecewise problems.
  std::shared_ptr<const SppProblem> spp() const;
  /// The integrable form: the problem itself, or the flattened SPP.
  PiecewiseProblem piecewise() const;
};

struct BuiltinParam {
  std::string name;
  double default_value;
};

struct BuiltinInfo {
  std::string name;
  std::string description;
  std::vector<BuiltinParam> params;
};

const std::vector<BuiltinInfo>& builtin_catalog();

/// Registry lookup. Unknown names, unknown parameter keys and eps <= 0 raise
/// InvalidArgument. Missing parameters take their catalog defaults.
///
///   najafi               x' = x sqrt(1 - t) for t <= 1, 0 after; time-augmented (x, t)
///   kowalczyk            x' = -sign(theta x + (1 - theta) y), eps y' = x - y
///   teixeira             y1' = -sign(2z - y1), y2' = -y1 - y2, eps z' = y1 - z
///   ostermann_modified   y1' = z, y2' = -sign(y1) y1, eps z' = y2 - z - eps y1
///   linear_test          x' = lambda x, h = -1 (no events)
///   tent                 (x, t)' = (1, 1) before t = 0.5, (-1, 1) after
BuiltinProblem builtin(const std::string& name, const ParamMap& params = {});

}  // namespace nsode
