#pragma once

#include <functional>

#include "msmsf/tensor.hpp"

namespace msmsf {

using ScalarFn = std::function<double(const Tensor64&)>;

/// Central differences (f(x+eps e_i) - f(x-eps e_i)) / 2eps for every
/// coordinate of `at`, evaluated in double precision. `f` must be
/// deterministic; `at` is restored before returning.
Tensor64 finite_diff_gradient(const ScalarFn& f, Tensor64 at, double eps = 1e-3);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps coordinates
/// whose true gradient is ~0 from dominating.
double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-2);

}  // namespace msmsf
