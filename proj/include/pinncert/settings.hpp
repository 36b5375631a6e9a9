#pragma once

#include <cstddef>

namespace pinncert {

/// Numeric knobs shared by the linear algebra and estimation routines.
struct NumericSettings {
  // relative to max |a_ij|
  double symmetry_tol = 1e-12;
  int jacobi_max_sweeps = 100;
  // sigma_min / sigma_max below this is treated as rank deficient
  double rank_tol = 1e-10;
  double quad_abs_tol = 1e-12;
  int quad_max_depth = 64;
  int schur_max_iter_per_eig = 60;
  // relative slack applied when comparing ||e^{At}|| against M e^{wt}
  double growth_check_slack = 1e-8;
  double golden_tol = 1e-12;
  double golden_safety = 1e-9;
};

inline const NumericSettings& default_settings() {
  static const NumericSettings s{};
  return s;
}

}  // namespace pinncert
