#include "msmsf/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "msmsf/errors.hpp"

namespace msmsf {

Tensor64 finite_diff_gradient(const ScalarFn& f, Tensor64 at, double eps) {
  NoGradGuard no_grad;
  Tensor64 grad(at.shape());
  auto x = at.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double plus = f(at);
    x[i] = saved - eps;
    const double minus = f(at);
    x[i] = saved;
    grad.values()[i] = (plus - minus) / (2.0 * eps);
  }
  return grad;
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) {
    throw ConfigError("max_relative_error: length mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace msmsf
