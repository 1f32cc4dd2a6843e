#include "latail/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "latail/errors.hpp"
#include "latail/specfun.hpp"

namespace latail::quadrature {

namespace {

GaussLegendre compute_gl(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    GaussLegendre r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton on P_n with the Chebyshev-like initial guess
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p0 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

const GaussLegendre& cached_gl(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
    return it->second;
}

double gl_apply(const std::function<double(double)>& f, double a, double b,
                const GaussLegendre& gl) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    latail::neumaier_sum s;
    for (size_t i = 0; i < gl.x.size(); ++i) s.add(gl.w[i] * f(c + h * gl.x[i]));
    return h * s.result();
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

} // namespace

const GaussLegendre& gauss_legendre(int n) { return cached_gl(n); }

QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol, int max_intervals) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    const GaussLegendre& lo = cached_gl(15);
    const GaussLegendre& hi = cached_gl(31);

    auto make = [&](double x0, double x1) {
        Interval iv;
        iv.a = x0;
        iv.b = x1;
        const double v15 = gl_apply(f, x0, x1, lo);
        iv.value = gl_apply(f, x0, x1, hi);
        iv.error = std::fabs(iv.value - v15);
        res.evaluations += 46;
        return iv;
    };

    std::priority_queue<Interval> q;
    q.push(make(a, b));
    double total = q.top().value, err = q.top().error;

    int n = 1;
    while (n < max_intervals) {
        const double tol = std::max(abs_tol, rel_tol * std::fabs(total));
        if (err <= tol) break;
        Interval worst = q.top();
        q.pop();
        total -= worst.value;
        err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        for (Interval iv : {make(worst.a, mid), make(mid, worst.b)}) {
            total += iv.value;
            err += iv.error;
            q.push(iv);
        }
        ++n;
    }
    res.value = total;
    res.abs_error = err;
    res.converged = err <= std::max(abs_tol, rel_tol * std::fabs(total));
    return res;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    QuadResult r = adaptive(f, a, b, rel_tol, abs_tol);
    if (!r.converged) {
        const double achieved =
            r.value != 0.0 ? r.abs_error / std::fabs(r.value) : r.abs_error;
        throw numerical_error("adaptive quadrature did not converge", achieved);
    }
    return r.value;
}

namespace {

// log of sum(exp(l_i)), two-pass
double lse2(double la, double lb) {
    if (std::isinf(la) && la < 0) return lb;
    if (std::isinf(lb) && lb < 0) return la;
    const double m = std::max(la, lb);
    return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

struct LogInterval {
    double a, b, log_value, log_error;
    bool operator<(const LogInterval& o) const { return log_error < o.log_error; }
};

double gl_apply_log(const std::function<double(double)>& g, double a, double b,
                    const GaussLegendre& gl) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(gl.x.size());
    for (size_t i = 0; i < gl.x.size(); ++i) {
        vals[i] = g(c + h * gl.x[i]);
        m = std::max(m, vals[i]);
    }
    if (std::isinf(m) && m < 0) return m;
    latail::neumaier_sum s;
    for (size_t i = 0; i < gl.x.size(); ++i)
        s.add(gl.w[i] * std::exp(vals[i] - m));
    return m + std::log(h * s.result());
}

} // namespace

LogQuadResult log_adaptive(const std::function<double(double)>& g, double a,
                           double b, double rel_tol, int max_intervals) {
    LogQuadResult res;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (a == b) {
        res.log_value = neg_inf;
        res.converged = true;
        return res;
    }
    const GaussLegendre& lo = cached_gl(15);
    const GaussLegendre& hi = cached_gl(31);

    auto make = [&](double x0, double x1) {
        LogInterval iv;
        iv.a = x0;
        iv.b = x1;
        const double l15 = gl_apply_log(g, x0, x1, lo);
        iv.log_value = gl_apply_log(g, x0, x1, hi);
        res.evaluations += 46;
        if (std::isinf(iv.log_value) && iv.log_value < 0) {
            iv.log_error = std::isinf(l15) ? neg_inf : l15;
        } else {
            iv.log_error =
                iv.log_value + std::log(std::fabs(std::expm1(l15 - iv.log_value)));
        }
        return iv;
    };

    std::vector<LogInterval> ivs;
    ivs.push_back(make(a, b));

    while (true) {
        double log_total = neg_inf, log_err = neg_inf;
        size_t worst = 0;
        for (size_t i = 0; i < ivs.size(); ++i) {
            log_total = lse2(log_total, ivs[i].log_value);
            log_err = lse2(log_err, ivs[i].log_error);
            if (ivs[i].log_error > ivs[worst].log_error) worst = i;
        }
        res.log_value = log_total;
        res.rel_error = std::exp(log_err - log_total);
        if (std::isinf(log_total) && log_total < 0) {
            res.converged = true;
            return res;
        }
        if (log_err <= log_total + std::log(rel_tol)) {
            res.converged = true;
            return res;
        }
        if (static_cast<int>(ivs.size()) >= max_intervals) {
            res.converged = false;
            return res;
        }
        const LogInterval w = ivs[worst];
        const double mid = 0.5 * (w.a + w.b);
        ivs[worst] = make(w.a, mid);
        ivs.push_back(make(mid, w.b));
    }
}

Grid2D polar_grid(double r_max, int n_radial, int n_theta) {
    if (!(r_max > 0.0) || n_radial < 1 || n_theta < 3)
        throw std::invalid_argument("polar_grid: bad parameters");
    const GaussLegendre& gl = cached_gl(n_radial);
    Grid2D grid;
    grid.x.reserve(static_cast<size_t>(n_radial) * n_theta);
    grid.y.reserve(static_cast<size_t>(n_radial) * n_theta);
    grid.w.reserve(static_cast<size_t>(n_radial) * n_theta);
    const double dtheta = 2.0 * std::numbers::pi / n_theta;
    for (int i = 0; i < n_radial; ++i) {
        const double r = 0.5 * r_max * (gl.x[i] + 1.0);
        const double wr = 0.5 * r_max * gl.w[i] * r * dtheta;
        for (int j = 0; j < n_theta; ++j) {
            const double th = j * dtheta;
            grid.x.push_back(r * std::cos(th));
            grid.y.push_back(r * std::sin(th));
            grid.w.push_back(wr);
        }
    }
    return grid;
}

Grid2D tensor_panels(double x0, double x1, double y0, double y1, double panel,
                     int order) {
    if (!(x1 > x0) || !(y1 > y0) || !(panel > 0.0) || order < 1)
        throw std::invalid_argument("tensor_panels: bad parameters");
    const GaussLegendre& gl = cached_gl(order);
    const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / panel)));
    const int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / panel)));

    std::vector<double> px, pw;
    auto axis = [&](double lo, double hi, int n, std::vector<double>& p,
                    std::vector<double>& w) {
        const double h = (hi - lo) / n;
        for (int i = 0; i < n; ++i) {
            const double a = lo + i * h, c = a + 0.5 * h;
            for (int j = 0; j < order; ++j) {
                p.push_back(c + 0.5 * h * gl.x[j]);
                w.push_back(0.5 * h * gl.w[j]);
            }
        }
    };
    std::vector<double> xs, xw, ys, yw;
    axis(x0, x1, nx, xs, xw);
    axis(y0, y1, ny, ys, yw);

    Grid2D grid;
    grid.x.reserve(xs.size() * ys.size());
    grid.y.reserve(xs.size() * ys.size());
    grid.w.reserve(xs.size() * ys.size());
    for (size_t iy = 0; iy < ys.size(); ++iy)
        for (size_t ix = 0; ix < xs.size(); ++ix) {
            grid.x.push_back(xs[ix]);
            grid.y.push_back(ys[iy]);
            grid.w.push_back(xw[ix] * yw[iy]);
        }
    return grid;
}

} // namespace latail::quadrature
