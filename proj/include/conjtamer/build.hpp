#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "conjtamer/diffeo.hpp"
#include "conjtamer/expr.hpp"

namespace conjtamer {

/// Samples a closed-form map (a lift on the circle) and its analytic
/// derivative at the grid nodes.
Diffeo build_diffeo(const Expression& f, Space space);
Diffeo build_diffeo(std::string_view expression, Space space);

/// h o f o h^{-1}, sampled with analytic derivatives of both expressions.
Diffeo build_conjugated(const Expression& f, const Expression& h, Space space);

/// Piecewise-linear homeomorphism through the given knots (x, y); the
/// log-derivative comes from central differences at half a grid step.
Diffeo build_from_knots(const std::vector<std::pair<double, double>>& knots, Space space);

/// Solves h(x) = y for an increasing closed-form h (a lift on the circle).
double invert_expression(const Expression& h, double y, bool circle);

}  // namespace conjtamer
