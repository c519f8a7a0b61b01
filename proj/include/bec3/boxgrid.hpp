#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <sstream>
#include <vector>

#include "bec3/util.hpp"

namespace bec3::grid {

/// Uniform Dirichlet box [-half, half]^D with one layer of zero guard cells.
/// Interior node i (0-based) along an axis sits at -half + (i+1) h with
/// h = 2 half / (n+1); the walls carry the boundary condition.
template <int D>
struct BoxGrid {
    int n = 0;
    double half = 0.0;
    double h = 0.0;
    std::array<std::size_t, D> stride{};
    std::size_t padded = 0;

    BoxGrid() = default;
    BoxGrid(int n_, double half_) : n(n_), half(half_) {
        h = 2.0 * half / (n + 1);
        std::size_t s = 1;
        for (int a = D - 1; a >= 0; --a) {
            stride[std::size_t(a)] = s;
            s *= std::size_t(n) + 2;
        }
        padded = s;
    }

    double coord(int i) const { return -half + (i + 1) * h; }

    std::size_t interior_count() const {
        std::size_t c = 1;
        for (int a = 0; a < D; ++a) c *= std::size_t(n);
        return c;
    }

    /// Visit interior points: f(flat_padded_index, coords).
    template <typename F>
    void for_each_interior(F&& f) const {
        std::array<int, D> idx{};
        idx.fill(0);
        std::array<double, D> x{};
        for (;;) {
            std::size_t flat = 0;
            for (int a = 0; a < D; ++a) {
                flat += stride[std::size_t(a)] * std::size_t(idx[std::size_t(a)] + 1);
                x[std::size_t(a)] = coord(idx[std::size_t(a)]);
            }
            f(flat, x);
            int a = D - 1;
            while (a >= 0 && ++idx[std::size_t(a)] == n) {
                idx[std::size_t(a)] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }
};

/// Result of the box CG minimization of
///   F(phi) = sum h^D [ 2 <grad phi, C grad phi> + V (1-phi)^2 ],
/// with C = I + cross on the three paired axes (alpha, alpha+3).
struct BoxSolveResult {
    double functional = 0.0;        // F at the minimizer
    double integral_vf = 0.0;       // sum V (1-phi) h^D
    double integral_v = 0.0;        // sum V h^D  (= F at phi = 0)
    double rel_residual = 0.0;
    long iterations = 0;
    double phi_min = 0.0, phi_max = 0.0;
    std::vector<double> phi;        // padded layout, only if keep_phi
};

template <int D>
class BoxOperator {
public:
    /// cross = off-diagonal metric coefficient between axes a and a+3 (D == 6).
    BoxOperator(const BoxGrid<D>& g, std::vector<double> v_padded, double cross)
        : g_(g), v_(std::move(v_padded)), cross_(cross) {}

    const std::vector<double>& v() const { return v_; }

    /// out = 2 L phi + V phi  (L from the symmetrized forward/backward form).
    void apply(const std::vector<double>& phi, std::vector<double>& out) const {
        const double inv_h2 = 1.0 / (g_.h * g_.h);
        const double k = 2.0 * inv_h2;
        const int n = g_.n;
        // flatten the first D-1 axes into one parallel loop; innermost axis is contiguous
        std::size_t outer = 1;
        for (int a = 0; a < D - 1; ++a) outer *= std::size_t(n);
        const auto& stride = g_.stride;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t oc = 0; oc < std::ptrdiff_t(outer); ++oc) {
            std::size_t rem = std::size_t(oc);
            std::size_t base = 0;
            for (int a = D - 2; a >= 0; --a) {
                const std::size_t ia = rem % std::size_t(n);
                rem /= std::size_t(n);
                base += stride[std::size_t(a)] * (ia + 1);
            }
            base += stride[D - 1];  // first interior along the last axis
            const double* p = phi.data();
            double* q = out.data();
            for (int iL = 0; iL < n; ++iL) {
                const std::size_t j = base + std::size_t(iL);
                double nb[2 * D];
                for (int a = 0; a < D; ++a) {
                    nb[2 * a] = p[j + stride[std::size_t(a)]];
                    nb[2 * a + 1] = p[j - stride[std::size_t(a)]];
                }
                double s = 2.0 * D * p[j];
                for (int a = 0; a < 2 * D; ++a) s -= nb[a];
                if constexpr (D == 6) {
                    if (cross_ != 0.0) {
                        for (int al = 0; al < 3; ++al) {
                            const std::ptrdiff_t dd = std::ptrdiff_t(stride[std::size_t(al)]) -
                                                      std::ptrdiff_t(stride[std::size_t(al + 3)]);
                            s += cross_ * (2.0 * p[j] + p[std::size_t(std::ptrdiff_t(j) + dd)] +
                                           p[std::size_t(std::ptrdiff_t(j) - dd)] - nb[2 * al] -
                                           nb[2 * al + 1] - nb[2 * (al + 3)] - nb[2 * (al + 3) + 1]);
                        }
                    }
                }
                q[j] = k * s + v_[j] * p[j];
            }
        }
    }

    /// Conjugate gradient for (2L + V) phi = V, with the quadratic-form value
    /// of the original functional evaluated at the solution.
    BoxSolveResult solve(double tol, long max_iter, bool keep_phi) const {
        const std::size_t N = g_.padded;
        std::vector<double> phi(N, 0.0), r(v_), p(v_), ap(N, 0.0);
        const double bnorm2 = deterministic_dot(r, r);
        BoxSolveResult res;
        res.integral_v = deterministic_sum(v_) * std::pow(g_.h, D);
        if (bnorm2 == 0.0) {
            finalize(phi, res, keep_phi);
            return res;
        }
        double rr = bnorm2;
        double best = rr;
        long since_best = 0;
        std::vector<double> trace;
        long it = 0;
        for (; it < max_iter; ++it) {
            apply(p, ap);
            const double pap = deterministic_dot(p, ap);
            if (pap <= 0.0) throw SolverError("grid CG: operator lost positive definiteness");
            const double alpha = rr / pap;
            axpy(phi, alpha, p);
            axpy(r, -alpha, ap);
            const double rr_new = deterministic_dot(r, r);
            trace.push_back(std::sqrt(rr_new / bnorm2));
            if (rr_new <= tol * tol * bnorm2) {
                rr = rr_new;
                ++it;
                break;
            }
            if (rr_new < 0.99 * best) {
                best = rr_new;
                since_best = 0;
            } else if (++since_best > 200) {
                std::ostringstream os;
                os << "grid CG stagnated after " << it << " iterations; recent relative residuals:";
                for (std::size_t t = trace.size() > 8 ? trace.size() - 8 : 0; t < trace.size(); ++t)
                    os << " " << trace[t];
                throw SolverError(os.str());
            }
            const double beta = rr_new / rr;
            rr = rr_new;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(N); ++i)
                p[std::size_t(i)] = r[std::size_t(i)] + beta * p[std::size_t(i)];
        }
        res.rel_residual = std::sqrt(rr / bnorm2);
        res.iterations = it;
        if (res.rel_residual > tol)
            throw SolverError("grid CG: no convergence within max_iterations (relative residual " +
                              std::to_string(res.rel_residual) + ")");
        finalize(phi, res, keep_phi);
        return res;
    }

private:
    void axpy(std::vector<double>& y, double a, const std::vector<double>& x) const {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(y.size()); ++i)
            y[std::size_t(i)] += a * x[std::size_t(i)];
    }

    void finalize(std::vector<double>& phi, BoxSolveResult& res, bool keep_phi) const {
        const double hD = std::pow(g_.h, D);
        std::vector<double> aphi(g_.padded, 0.0);
        apply(phi, aphi);
        const double quad = deterministic_dot(phi, aphi);
        const double vphi = deterministic_dot(v_, phi);
        res.functional = (quad - 2.0 * vphi) * hD + res.integral_v;
        res.integral_vf = res.integral_v - vphi * hD;
        double lo = 0.0, hi = 0.0;
        for (double x : phi) {
            if (x < lo) lo = x;
            if (x > hi) hi = x;
        }
        res.phi_min = lo;
        res.phi_max = hi;
        if (keep_phi) res.phi = std::move(phi);
    }

    BoxGrid<D> g_;
    std::vector<double> v_;
    double cross_;
};

}  // namespace bec3::grid
