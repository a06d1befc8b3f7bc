#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stathedge::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point Gauss-Legendre rule (Newton iteration on the Legendre recurrence).
const GaussRule& gauss_legendre(int n);

double integrate(const std::function<double(double)>& f, double a, double b, int n = 16);

/// Panel-wise Gauss-Legendre on [a, b]. Panels break at every point of `breaks` inside (a, b)
/// and are further split so no panel is wider than max_width.
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, double max_width, int n = 8);

/// Nodes and weights of the same panel rule, for callers that reuse one node set many times.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
};
NodeSet piecewise_nodes(double a, double b, std::span<const double> breaks, double max_width,
                        int n = 8);

/// Composite Simpson weights on a uniform grid. An even number of intervals uses plain Simpson;
/// odd uses Simpson with a 3/8 rule on the last three intervals.
std::vector<double> simpson_weights(std::size_t points, double h);

double simpson(std::span<const double> values, double h);

/// Second derivative on a uniform grid: 5-point central stencil inside, one-sided fourth-order
/// stencils on the two outermost points at each end. Needs at least 6 points.
std::vector<double> second_derivative(std::span<const double> values, double h);

/// Integration weights on a uniform grid K for integrands with a jump at `split`. Nodes below the
/// split carry the left branch, nodes at or above it the right branch. Each branch is integrated
/// with Simpson on its own nodes; the gap to the split point uses the cubic through the nearest
/// four nodes of that branch. A nonempty branch needs at least 4 nodes.
std::vector<double> split_weights(std::span<const double> K, double split);

/// Index of the first grid node at or above `split`.
std::size_t split_index(std::span<const double> K, double split);

/// second_derivative applied separately to [0, m) and [m, n).
std::vector<double> second_derivative_split(std::span<const double> values, double h,
                                            std::size_t m);

std::vector<double> linspace(double a, double b, std::size_t n);

double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace stathedge::quad
