#pragma once

#include <cstdint>
#include <functional>

namespace cgmodel {

struct QuadratureOptions {
  double abs_floor = 1e-12;
  double rel_target = 1e-9;
  int max_depth = 60;
  int min_depth = 4;
};

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  std::uint64_t evaluations = 0;
  bool depth_capped = false;
};

/// Adaptive Simpson with tolerance max(abs_floor, rel_target * |I|), where
/// |I| is first estimated by a 64-panel composite Simpson rule.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& options = {});

/// Integral of dt / (log t)^k over [a, b], 1 < a <= b.
double log_power_integral(double a, double b, unsigned k);

/// Integral of dt / (log t * log(N - t)) over [2, N - 2], split at N/2.
double goldbach_integral(double N);

}  // namespace cgmodel
