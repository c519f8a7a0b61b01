#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bec3/potentials.hpp"

namespace bec3::scattering {

using potentials::MetricM;
using potentials::Potential6D;
using potentials::RadialPotential;

struct ScatteringSolution {
    int dimension = 3;
    double b = 0.0;                    // value of the scattering functional at the minimizer
    double b_profile_integral = 0.0;   // quadrature of v*f on the same mesh
    double residual = 0.0;             // radial: max-norm equation residual; grid: relative CG residual
    double truncation_radius = 0.0;
    long nodes = 0;                    // radial node count or grid points per axis
    double a_nominal = 0.0;            // b^{1/(d-2)}
    double potential_integral = 0.0;   // same-mesh quadrature of v (the functional at phi = 0)
    double phi_min = 0.0, phi_max = 0.0;
    bool spacing_warning = false;      // grid spacing coarser than support/8
    long iterations = 0;               // CG iterations (grid paths)
    std::string method;

    // profile f = 1 - phi; populated on radial meshes and on small grids
    std::vector<double> mesh;
    std::vector<double> f;

    std::optional<double> b_extrapolated;
    std::optional<double> fit_residual;
};

/// Hard-sphere closed form 2 (d-2) surface(d) a^{d-2}.
double hard_sphere_b(int d, double a);

/// Radial zero-scattering solve: 2 (f'' + (d-1)/r f') = v f with f(R_inf) = 1,
/// by a tridiagonal finite-difference solve; b from trapezoidal quadrature of v f.
ScatteringSolution solve_radial(const RadialPotential& v, double r_inf, long nodes);

struct Extrapolation {
    double b_inf = 0.0;
    double coefficient = 0.0;  // of R^{-(d-2)}
    double fit_residual = 0.0;
};

/// Least-squares fit b_R = b_inf + c R^{-(d-2)} over (R, b_R) samples.
Extrapolation extrapolate_truncation(const std::vector<std::pair<double, double>>& samples, int d);

/// Radial solve repeated over a truncation ladder (fixed spacing), with the
/// extrapolated value attached to the last solution.
ScatteringSolution solve_radial_extrapolated(const RadialPotential& v,
                                             const std::vector<double>& r_inf_list, long nodes_at_first);

struct GridOptions {
    int points = 16;              // interior points per axis
    double half_width = 0.0;      // box half-width; 0 = margin * support radius
    double margin = 1.0625;
    double cg_tol = 1e-10;
    long max_iterations = 20000;
    double memory_cap_gb = 6.0;
    bool store_profile = false;   // keep full phi (small grids only)
};

/// Dirichlet box minimization of the scattering functional in 3D (identity metric).
ScatteringSolution solve_grid_3d(const RadialPotential& v, const GridOptions& opts);

/// Same in 6D with kinetic form 2 |M grad phi|^2 (anisotropic stencil).
ScatteringSolution solve_grid_6d(const Potential6D& v, const MetricM& metric, const GridOptions& opts);

enum class ModifiedMethod { ChangeOfVariables, Direct };

/// Modified scattering energy b_M(V): either the direct anisotropic solve or
/// b(V(M.)) det M via the change of variables.
ScatteringSolution b_modified(const Potential6D& v, ModifiedMethod method, const MetricM& metric,
                              const GridOptions& opts);

/// Fast change-of-variables path for the isotropic-after-M family, where
/// V(M.) is radial and the 6D problem reduces to a radial one.
ScatteringSolution b_modified_radial(const Potential6D& v, const MetricM& metric, double r_inf,
                                     long nodes);

}  // namespace bec3::scattering
