#include "bec3/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bec3/boxgrid.hpp"

namespace bec3::scattering {

using potentials::Family6D;
using potentials::Vec3;

double hard_sphere_b(int d, double a) {
    if (d < 3) throw PreconditionError("hard_sphere_b: dimension must be >= 3");
    if (a < 0.0) throw PreconditionError("hard_sphere_b: radius must be >= 0");
    return 2.0 * (d - 2) * sphere_surface(d) * std::pow(a, d - 2);
}

ScatteringSolution solve_radial(const RadialPotential& v, double r_inf, long nodes) {
    const int d = v.dimension;
    if (d < 3) throw PreconditionError("solve_radial: dimension must be >= 3");
    if (r_inf <= v.support_radius)
        throw PreconditionError("solve_radial: truncation radius must exceed the support radius");
    if (nodes < 8) throw PreconditionError("solve_radial: need at least 8 nodes");

    const double h = r_inf / double(nodes);
    const long N = nodes;  // unknowns f_0..f_{N-1}; f_N = 1 at the wall
    std::vector<double> lower(N, 0.0), diag(N, 0.0), upper(N, 0.0), rhs(N, 0.0);
    std::vector<double> vv(N + 1, 0.0), rpow(N + 1, 0.0);
    for (long i = 0; i <= N; ++i) {
        const double r = i * h;
        vv[std::size_t(i)] = v(r);
        rpow[std::size_t(i)] = std::pow(r, d - 1);
    }
    // origin row: 2 d f''(0) = v f with f''(0) ~ 2 (f1 - f0) / h^2
    diag[0] = 4.0 * d + h * h * vv[0];
    upper[0] = -4.0 * d;
    auto face = [&](long i) { return std::pow((i + 0.5) * h, d - 1); };
    for (long i = 1; i < N; ++i) {
        const double am = face(i - 1), ap = face(i);
        lower[std::size_t(i)] = -am;
        upper[std::size_t(i)] = -ap;
        diag[std::size_t(i)] = am + ap + 0.5 * h * h * rpow[std::size_t(i)] * vv[std::size_t(i)];
    }
    rhs[std::size_t(N - 1)] = face(N - 1);  // wall value f = 1

    // Thomas
    std::vector<double> c(N, 0.0), dzz(N, 0.0);
    c[0] = upper[0] / diag[0];
    dzz[0] = rhs[0] / diag[0];
    for (long i = 1; i < N; ++i) {
        const double m = diag[std::size_t(i)] - lower[std::size_t(i)] * c[std::size_t(i - 1)];
        c[std::size_t(i)] = upper[std::size_t(i)] / m;
        dzz[std::size_t(i)] =
            (rhs[std::size_t(i)] - lower[std::size_t(i)] * dzz[std::size_t(i - 1)]) / m;
    }
    std::vector<double> f(N + 1, 1.0);
    f[std::size_t(N - 1)] = dzz[std::size_t(N - 1)];
    for (long i = N - 2; i >= 0; --i)
        f[std::size_t(i)] = dzz[std::size_t(i)] - c[std::size_t(i)] * f[std::size_t(i + 1)];
    for (double x : f)
        if (!std::isfinite(x)) throw SolverError("solve_radial: non-finite solution values");

    // residual of 2 (flux form) = v f on interior nodes, max norm
    double resid = 0.0;
    for (long i = 1; i < N; ++i) {
        const double lap = 2.0 *
                           (face(i) * (f[std::size_t(i + 1)] - f[std::size_t(i)]) -
                            face(i - 1) * (f[std::size_t(i)] - f[std::size_t(i - 1)])) /
                           (h * h * rpow[std::size_t(i)]);
        resid = std::max(resid, std::abs(lap - vv[std::size_t(i)] * f[std::size_t(i)]));
    }

    const double surf = sphere_surface(d);
    double quad_vf = 0.0, quad_v = 0.0;
    for (long i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 0.5 : 1.0;
        quad_vf += w * vv[std::size_t(i)] * f[std::size_t(i)] * rpow[std::size_t(i)];
        quad_v += w * vv[std::size_t(i)] * rpow[std::size_t(i)];
    }
    quad_vf *= surf * h;
    quad_v *= surf * h;

    ScatteringSolution sol;
    sol.dimension = d;
    sol.method = "radial";
    sol.b = quad_vf;
    sol.b_profile_integral = quad_vf;
    sol.potential_integral = quad_v;
    sol.residual = resid;
    sol.truncation_radius = r_inf;
    sol.nodes = nodes;
    sol.a_nominal = quad_vf > 0.0 ? std::pow(quad_vf, 1.0 / (d - 2)) : 0.0;
    sol.mesh.resize(std::size_t(N + 1));
    for (long i = 0; i <= N; ++i) sol.mesh[std::size_t(i)] = i * h;
    double pmin = 0.0, pmax = 0.0;
    for (double x : f) {
        pmin = std::min(pmin, 1.0 - x);
        pmax = std::max(pmax, 1.0 - x);
    }
    sol.phi_min = pmin;
    sol.phi_max = pmax;
    sol.f = std::move(f);
    return sol;
}

Extrapolation extrapolate_truncation(const std::vector<std::pair<double, double>>& samples, int d) {
    if (samples.size() < 3)
        throw PreconditionError("extrapolate_truncation: need at least 3 samples");
    std::vector<double> x, y;
    double prev = 0.0;
    for (const auto& [R, bR] : samples) {
        if (R <= prev)
            throw PreconditionError("extrapolate_truncation: radii must be distinct increasing");
        prev = R;
        x.push_back(std::pow(R, -(d - 2)));
        y.push_back(bR);
    }
    const auto fit = fit_line(x, y);
    return {fit.intercept, fit.slope, fit.residual};
}

ScatteringSolution solve_radial_extrapolated(const RadialPotential& v,
                                             const std::vector<double>& r_inf_list,
                                             long nodes_at_first) {
    if (r_inf_list.size() < 3)
        throw PreconditionError("solve_radial_extrapolated: need at least 3 truncation radii");
    const double h = r_inf_list.front() / double(nodes_at_first);
    std::vector<std::pair<double, double>> samples;
    ScatteringSolution last;
    for (double R : r_inf_list) {
        const long n = std::lround(R / h);
        last = solve_radial(v, R, n);
        samples.emplace_back(R, last.b);
    }
    const auto ex = extrapolate_truncation(samples, v.dimension);
    last.b_extrapolated = ex.b_inf;
    last.fit_residual = ex.fit_residual;
    return last;
}

namespace {

/// Node value of a radial potential with cell-average smoothing across the
/// support edge, so indicator-type wells stay second order on coarse grids.
double sampled_radial_3d(const RadialPotential& v, const Vec3& x, double h) {
    const double r = potentials::norm3(x);
    const bool edgy = v.family == potentials::RadialFamily::SquareWell;
    if (!edgy) return v(r);
    const double R = v.support_radius;
    const double reach = 0.5 * std::sqrt(3.0) * h;
    if (std::abs(r - R) > reach) return v(r);
    const int m = 5;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const Vec3 y{x[0] + (i - (m - 1) * 0.5) * h / m,
                             x[1] + (j - (m - 1) * 0.5) * h / m,
                             x[2] + (k - (m - 1) * 0.5) * h / m};
                s += v(potentials::norm3(y));
            }
    return s / double(m * m * m);
}

template <int D>
void check_memory(const grid::BoxGrid<D>& g, const GridOptions& opts) {
    const double bytes = 6.0 * double(g.padded) * 8.0;
    if (bytes > opts.memory_cap_gb * (1ull << 30)) {
        std::ostringstream os;
        os << "grid solve refused before allocation: estimated " << bytes / double(1ull << 30)
           << " GiB exceeds the configured cap of " << opts.memory_cap_gb << " GiB";
        throw SolverError(os.str());
    }
}

template <int D>
ScatteringSolution finish(const grid::BoxGrid<D>& g, const grid::BoxSolveResult& r,
                          const GridOptions& opts, double support, const std::string& method) {
    ScatteringSolution sol;
    sol.dimension = D;
    sol.method = method;
    sol.b = r.functional;
    sol.b_profile_integral = r.integral_vf;
    sol.potential_integral = r.integral_v;
    sol.residual = r.rel_residual;
    sol.truncation_radius = g.half;
    sol.nodes = opts.points;
    sol.iterations = r.iterations;
    sol.a_nominal = r.functional > 0.0 ? std::pow(r.functional, 1.0 / (D - 2)) : 0.0;
    sol.phi_min = r.phi_min;
    sol.phi_max = r.phi_max;
    sol.spacing_warning = g.h > support / 8.0;
    if (!r.phi.empty()) {
        // store f = 1 - phi along the first axis through the center, as a profile
        sol.mesh.reserve(std::size_t(g.n));
        sol.f.reserve(std::size_t(g.n));
        std::array<int, D> mid{};
        mid.fill(g.n / 2);
        for (int i = 0; i < g.n; ++i) {
            std::size_t flat = 0;
            for (int a = 0; a < D; ++a) {
                const int ia = (a == 0) ? i : mid[std::size_t(a)];
                flat += g.stride[std::size_t(a)] * std::size_t(ia + 1);
            }
            sol.mesh.push_back(g.coord(i));
            sol.f.push_back(1.0 - r.phi[flat]);
        }
    }
    return sol;
}

template <int D>
double resolve_half_width(double support, const GridOptions& opts) {
    double H = opts.half_width > 0.0 ? opts.half_width : opts.margin * support;
    if (H <= support)
        throw PreconditionError("grid solve: potential support must lie strictly inside the box");
    return H;
}

}  // namespace

ScatteringSolution solve_grid_3d(const RadialPotential& v, const GridOptions& opts) {
    if (opts.points < 8) throw PreconditionError("grid solve: need at least 8 points per axis");
    const double support = v.support_radius > 0.0 ? v.support_radius : 1.0;
    const double H = resolve_half_width<3>(support, opts);
    grid::BoxGrid<3> g(opts.points, H);
    if (g.h > support / 2.0)
        throw PreconditionError("grid solve: spacing coarser than half the support radius");
    check_memory(g, opts);
    std::vector<double> vp(g.padded, 0.0);
    g.for_each_interior([&](std::size_t flat, const std::array<double, 3>& x) {
        vp[flat] = sampled_radial_3d(v, {x[0], x[1], x[2]}, g.h);
    });
    grid::BoxOperator<3> op(g, std::move(vp), 0.0);
    const auto r = op.solve(opts.cg_tol, opts.max_iterations, opts.store_profile);
    return finish(g, r, opts, support, "grid3d");
}

ScatteringSolution solve_grid_6d(const Potential6D& v, const MetricM& metric,
                                 const GridOptions& opts) {
    if (opts.points < 8) throw PreconditionError("grid solve: need at least 8 points per axis");
    const double support = v.support_radius > 0.0 ? v.support_radius : 1.0;
    const double H = resolve_half_width<6>(support, opts);
    grid::BoxGrid<6> g(opts.points, H);
    if (g.h > support / 2.0)
        throw PreconditionError("grid solve: spacing coarser than half the support radius");
    check_memory(g, opts);
    std::vector<double> vp(g.padded, 0.0);
    g.for_each_interior([&](std::size_t flat, const std::array<double, 6>& x) {
        const Vec3 a{x[0], x[1], x[2]}, b{x[3], x[4], x[5]};
        const double val = v(a, b);
        if (val < 0.0) throw PreconditionError("grid solve: potential evaluated negative");
        vp[flat] = val;
    });
    // kinetic form <grad, M^2 grad>: the stencil assumes unit diagonal blocks
    const double c_diag = metric.diag * metric.diag + metric.off * metric.off;  // (M^2)_{11}
    const double c_off = 2.0 * metric.diag * metric.off;                        // (M^2)_{12}
    if (std::abs(c_diag - 1.0) > 1e-12)
        throw PreconditionError("grid solve: metric must have unit diagonal in M^2 form");
    grid::BoxOperator<6> op(g, std::move(vp), c_off);
    const auto r = op.solve(opts.cg_tol, opts.max_iterations, opts.store_profile);
    return finish(g, r, opts, support, metric.is_identity() ? "grid6d" : "grid6d_metric");
}

ScatteringSolution b_modified(const Potential6D& v, ModifiedMethod method, const MetricM& metric,
                              const GridOptions& opts) {
    if (method == ModifiedMethod::Direct) {
        auto sol = solve_grid_6d(v, metric, opts);
        sol.method = "modified_direct";
        return sol;
    }
    const auto vt = potentials::transform_by_metric(v, metric);
    GridOptions o = opts;
    if (o.half_width > 0.0 && !metric.is_identity()) o.half_width /= metric.eig_min();
    auto sol = solve_grid_6d(vt, potentials::identity_metric(), o);
    const double det = metric.det6();
    sol.b *= det;
    sol.b_profile_integral *= det;
    sol.potential_integral *= det;
    sol.a_nominal = sol.b > 0.0 ? std::pow(sol.b, 0.25) : 0.0;
    sol.method = "modified_cov";
    return sol;
}

ScatteringSolution b_modified_radial(const Potential6D& v, const MetricM& metric, double r_inf,
                                     long nodes) {
    if (v.family != Family6D::IsotropicAfterM)
        throw PreconditionError("b_modified_radial: potential must be isotropic after the metric");
    if (std::abs(v.iso_metric.diag - metric.diag) > 1e-15 ||
        std::abs(v.iso_metric.off - metric.off) > 1e-15)
        throw PreconditionError("b_modified_radial: metric does not match the potential family");
    RadialPotential w = v.profile;
    w.dimension = 6;
    auto sol = solve_radial(w, r_inf, nodes);
    const double det = metric.det6();
    sol.b *= det;
    sol.b_profile_integral *= det;
    sol.potential_integral *= det;
    sol.a_nominal = sol.b > 0.0 ? std::pow(sol.b, 0.25) : 0.0;
    sol.method = "modified_radial_cov";
    return sol;
}

}  // namespace bec3::scattering
