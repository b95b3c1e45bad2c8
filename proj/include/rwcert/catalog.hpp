#pragma once

// Built-in charts. The documents are the same JSON format users write and are
// mirrored verbatim under charts/ in the source tree.

#include <algorithm>
#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "rwcert/chart.hpp"
#include "rwcert/isotropy.hpp"

namespace rwcert {

struct CatalogEntry {
  std::string_view id;
  Classification expected;
  std::string_view notes;
  std::string_view document;

  ChartSpec load() const { return load_chart(document); }
};

namespace detail {

inline constexpr std::string_view kMinkowski = R"chart({
  "name": "minkowski",
  "dim": 4,
  "coords": ["t", "x", "y", "z"],
  "metric": [
    ["-1", "0", "0", "0"],
    ["0", "1", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "1"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]
}
)chart";

inline constexpr std::string_view kFlrwFlatLinear = R"chart({
  "name": "flrw_flat_linear",
  "dim": 4,
  "coords": ["t", "x", "y", "z"],
  "metric": [
    ["-1", "0", "0", "0"],
    ["0", "t^2", "0", "0"],
    ["0", "0", "t^2", "0"],
    ["0", "0", "0", "t^2"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[1, 3], [-1, 1], [-1, 1], [-1, 1]]
}
)chart";

inline constexpr std::string_view kFlrwClosedOsc = R"chart({
  "name": "flrw_closed_osc",
  "dim": 4,
  "coords": ["t", "chi", "theta", "phi"],
  "params": {"A0": 2, "A1": 0.5},
  "metric": [
    ["-1", "0", "0", "0"],
    ["0", "(A0 + A1*cos(t))^2", "0", "0"],
    ["0", "0", "(A0 + A1*cos(t))^2 * sin(chi)^2", "0"],
    ["0", "0", "0", "(A0 + A1*cos(t))^2 * sin(chi)^2 * sin(theta)^2"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[0, 6], [0.4, 2.7], [0.4, 2.7], [0, 6]]
}
)chart";

inline constexpr std::string_view kFlrwOpen = R"chart({
  "name": "flrw_open",
  "dim": 4,
  "coords": ["t", "chi", "theta", "phi"],
  "metric": [
    ["-1", "0", "0", "0"],
    ["0", "t^4", "0", "0"],
    ["0", "0", "t^4 * sinh(chi)^2", "0"],
    ["0", "0", "0", "t^4 * sinh(chi)^2 * sin(theta)^2"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[1, 2], [0.2, 1.5], [0.4, 2.7], [0, 6]]
}
)chart";

inline constexpr std::string_view kEinsteinStatic = R"chart({
  "name": "einstein_static",
  "dim": 4,
  "coords": ["t", "chi", "theta", "phi"],
  "params": {"a": 2},
  "metric": [
    ["-1", "0", "0", "0"],
    ["0", "a^2", "0", "0"],
    ["0", "0", "a^2 * sin(chi)^2", "0"],
    ["0", "0", "0", "a^2 * sin(chi)^2 * sin(theta)^2"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[-5, 5], [0.1, 3.0], [0.1, 3.0], [0, 6.2]]
}
)chart";

inline constexpr std::string_view kDesitterFlat = R"chart({
  "name": "desitter_flat",
  "dim": 4,
  "coords": ["t", "x", "y", "z"],
  "metric": [
    ["-1", "0", "0", "0"],
    ["0", "exp(2*t)", "0", "0"],
    ["0", "0", "exp(2*t)", "0"],
    ["0", "0", "0", "exp(2*t)"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]
}
)chart";

inline constexpr std::string_view kSchwarzschild = R"chart({
  "name": "schwarzschild_static_observer",
  "dim": 4,
  "coords": ["t", "r", "theta", "phi"],
  "params": {"M": 1},
  "metric": [
    ["-(1 - 2*M/r)", "0", "0", "0"],
    ["0", "1/(1 - 2*M/r)", "0", "0"],
    ["0", "0", "r^2", "0"],
    ["0", "0", "0", "r^2 * sin(theta)^2"]
  ],
  "u": ["1/sqrt(1 - 2*M/r)", "0", "0", "0"],
  "domain": [[-1, 1], [8, 12], [0.5, 2.6], [0, 6]]
}
)chart";

inline constexpr std::string_view kGoedel = R"chart({
  "name": "goedel",
  "dim": 4,
  "coords": ["t", "x", "y", "z"],
  "params": {"A": 1},
  "metric": [
    ["-A^2", "0", "0", "-A^2 * exp(x)"],
    ["0", "A^2", "0", "0"],
    ["0", "0", "A^2", "0"],
    [null, "0", "0", "-0.5 * A^2 * exp(2*x)"]
  ],
  "u": ["1/A", "0", "0", "0"],
  "domain": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]
}
)chart";

inline constexpr std::string_view kRiemannianGrw = R"chart({
  "name": "riemannian_grw",
  "dim": 4,
  "coords": ["r", "x", "y", "z"],
  "metric": [
    ["1", "0", "0", "0"],
    ["0", "(1 + r^2)^2", "0", "0"],
    ["0", "0", "(1 + r^2)^2", "0"],
    ["0", "0", "0", "(1 + r^2)^2"]
  ],
  "u": ["1", "0", "0", "0"],
  "domain": [[1.5, 3], [-1, 1], [-1, 1], [-1, 1]]
}
)chart";

}  // namespace detail

/// Sorted by id.
inline const std::array<CatalogEntry, 9>& catalog() {
  static const std::array<CatalogEntry, 9> entries = {{
      {"desitter_flat", Classification::ConstantCurvature, "a = e^t, k = 0; f = -1, h = 1", detail::kDesitterFlat},
      {"einstein_static", Classification::LocallyRW, "a = 2, k = 1; f = 0, h = 1/4", detail::kEinsteinStatic},
      {"flrw_closed_osc", Classification::LocallyRW, "a = 2 + 0.5 cos t, k = 1", detail::kFlrwClosedOsc},
      {"flrw_flat_linear", Classification::LocallyRW, "a = t, k = 0; f = 0, h = 1/t^2", detail::kFlrwFlatLinear},
      {"flrw_open", Classification::LocallyRW, "a = t^2, k = -1", detail::kFlrwOpen},
      {"goedel", Classification::NotIsotropic, "rotating dust, u = d/dt / A", detail::kGoedel},
      {"minkowski", Classification::ConstantCurvature, "flat, f = h = 0", detail::kMinkowski},
      {"riemannian_grw", Classification::LocallyRW, "eps = +1, a = 1 + r^2, k = 0", detail::kRiemannianGrw},
      {"schwarzschild_static_observer", Classification::NotIsotropic, "M = 1, static observer",
       detail::kSchwarzschild},
  }};
  return entries;
}

inline std::optional<CatalogEntry> find_catalog_entry(std::string_view id) {
  const auto& all = catalog();
  auto it = std::find_if(all.begin(), all.end(), [&](const CatalogEntry& e) { return e.id == id; });
  if (it == all.end()) return std::nullopt;
  return *it;
}

}  // namespace rwcert
