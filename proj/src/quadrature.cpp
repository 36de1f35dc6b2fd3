#include "cgmodel/quadrature.hpp"

#include <cmath>

#include "cgmodel/error.hpp"

namespace cgmodel {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  const QuadratureOptions& options;
  QuadratureResult& result;

  double eval(double t) {
    ++result.evaluations;
    return f(t);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= options.max_depth) {
      result.depth_capped = true;
      result.error_estimate += std::fabs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= options.min_depth && std::fabs(delta) <= 15.0 * eps) {
      result.error_estimate += std::fabs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& options) {
  QuadratureResult result;
  if (a == b) return result;
  Simpson s{f, options, result};

  constexpr int panels = 64;
  const double h = (b - a) / panels;
  double coarse = s.eval(a) + s.eval(b);
  for (int i = 1; i < panels; ++i) coarse += (i % 2 == 1 ? 4.0 : 2.0) * s.eval(a + i * h);
  coarse *= h / 3.0;
  const double eps = std::max(options.abs_floor, options.rel_target * std::fabs(coarse));

  const double fa = s.eval(a), fb = s.eval(b), fm = s.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  result.value = s.recurse(a, b, fa, fm, fb, whole, eps, 0);
  return result;
}

double log_power_integral(double a, double b, unsigned k) {
  if (!(a > 1) || !(b >= a)) throw DomainError("log_power_integral needs 1 < a <= b");
  const double kk = static_cast<double>(k);
  return adaptive_simpson([kk](double t) { return std::pow(std::log(t), -kk); }, a, b).value;
}

double goldbach_integral(double N) {
  if (!(N >= 8)) throw DomainError("goldbach_integral needs N >= 8");
  const auto g = [N](double t) { return 1.0 / (std::log(t) * std::log(N - t)); };
  const double mid = 0.5 * N;
  return adaptive_simpson(g, 2.0, mid).value + adaptive_simpson(g, mid, N - 2.0).value;
}

}  // namespace cgmodel
