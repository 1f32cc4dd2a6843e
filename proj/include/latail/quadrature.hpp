#pragma once

#include <functional>
#include <vector>

namespace latail::quadrature {

/// Gauss-Legendre rule on [-1, 1]; nodes ascending. Cached per order.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussLegendre& gauss_legendre(int n);

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    long evaluations = 0;
    bool converged = false;
};

/// Globally adaptive bisection quadrature (GL-15 against GL-31 per interval,
/// worst interval refined first).
QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol = 0.0, int max_intervals = 4000);

/// adaptive() that throws latail::numerical_error when not converged.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol = 0.0);

struct LogQuadResult {
    double log_value = 0.0; // -inf for a zero integral
    double rel_error = 0.0;
    long evaluations = 0;
    bool converged = false;
};

/// Adaptive quadrature of exp(g) over [a, b] carried out entirely in the log
/// domain, for integrands whose scale is far outside double range.  g may
/// return -inf.
LogQuadResult log_adaptive(const std::function<double(double)>& g, double a,
                           double b, double rel_tol, int max_intervals = 4000);

/// Flattened 2D node set with weights.
struct Grid2D {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;
    size_t size() const { return w.size(); }
};

/// Polar grid centered at the origin: GL in radius on [0, r_max], trapezoid in
/// angle (n_theta equispaced nodes); weights include the r Jacobian.
Grid2D polar_grid(double r_max, int n_radial, int n_theta);

/// Tensor Gauss-Legendre panels over [x0,x1] x [y0,y1], square panels of the
/// given size (last row/column shrunk to fit), GL order per axis per panel.
Grid2D tensor_panels(double x0, double x1, double y0, double y1,
                     double panel, int order);

} // namespace latail::quadrature
