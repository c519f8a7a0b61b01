#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bec3/util.hpp"

namespace bec3::potentials {

using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}
inline Vec3 sub3(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// ---------------------------------------------------------------------------
// Radial potentials v(r) >= 0 with compact support, any dimension d >= 3.
// Also used as the scalar profile of the 6D families below.
// ---------------------------------------------------------------------------

enum class RadialFamily { Zero, SquareWell, Gaussian, Tabulated };

struct RadialPotential {
    int dimension = 3;
    RadialFamily family = RadialFamily::Zero;
    double height = 0.0;      // square well v0
    double radius = 0.0;      // square well R
    double amplitude = 0.0;   // gaussian peak value
    double width = 1.0;       // gaussian width
    double truncation_widths = 6.0;
    std::vector<double> radii;   // tabulated
    std::vector<double> values;  // tabulated
    double support_radius = 0.0;

    /// Pointwise value. Square wells evaluate to height/2 exactly at the edge
    /// so that node-aligned trapezoidal quadrature stays second order.
    double operator()(double r) const;

    /// Integral over R^d (closed form for square wells, fine trapezoid otherwise).
    double integral() const;

    std::string family_name() const;
    std::string params_string() const;
};

RadialPotential make_zero(int d);
RadialPotential make_square_well(int d, double v0, double R);
RadialPotential make_gaussian(int d, double amplitude, double width, double truncation_widths = 6.0);
RadialPotential make_tabulated(int d, std::vector<double> radii, std::vector<double> values);

/// Uniform rescaling v -> s^2 v(s r); in dimension d this sends b to s^{2-d} b.
RadialPotential scaled(const RadialPotential& v, double s);

// ---------------------------------------------------------------------------
// The block metric of the three-body relative-coordinate kinetic form.
// Acts on R^3 x R^3 as (x,y) -> (diag*x + off*y, off*x + diag*y).
// ---------------------------------------------------------------------------

struct MetricM {
    double diag = 1.0;
    double off = 0.0;

    std::pair<Vec3, Vec3> apply(const Vec3& x, const Vec3& y) const {
        return {{diag * x[0] + off * y[0], diag * x[1] + off * y[1], diag * x[2] + off * y[2]},
                {off * x[0] + diag * y[0], off * x[1] + diag * y[1], off * x[2] + diag * y[2]}};
    }
    MetricM inverse() const {
        const double det = det2();
        return {diag / det, -off / det};
    }
    double det2() const { return diag * diag - off * off; }
    double det6() const { const double d = det2(); return d * d * d; }
    double eig_max() const { return diag + off; }   // eigenvector (1,1)/sqrt(2) per block
    double eig_min() const { return diag - off; }   // eigenvector (1,-1)/sqrt(2)
    bool is_identity() const { return diag == 1.0 && off == 0.0; }
};

/// The constant metric with block entries (sqrt(3) +- 1) / (2 sqrt(2)),
/// the positive square root of (1/2) [[2,1],[1,2]].
MetricM make_metric_M();

inline MetricM identity_metric() { return {1.0, 0.0}; }

// ---------------------------------------------------------------------------
// Potentials on R^3 x R^3.
// ---------------------------------------------------------------------------

enum class SymmetryCertificate { Checked, Asserted, Violated };
enum class Family6D { ProductTriplet, IsotropicAfterM, TabulatedGrid, Transformed, Custom };

/// Values on a uniform 6D grid over [-half,half]^6, multilinear interpolation,
/// zero outside. Kept small; mainly a round-trip target.
struct TabulatedGrid6D {
    int points_per_axis = 0;
    double half_width = 0.0;
    std::vector<double> values;  // points^6, row-major
};

struct Potential6D {
    Family6D family = Family6D::Custom;
    SymmetryCertificate certificate = SymmetryCertificate::Asserted;
    double support_radius = 0.0;
    RadialPotential profile;  // h (product-triplet) or w (isotropic-after-M)
    MetricM iso_metric;       // the metric of the isotropic-after-M family
    std::shared_ptr<TabulatedGrid6D> table;
    std::function<double(const Vec3&, const Vec3&)> custom;

    double operator()(const Vec3& x, const Vec3& y) const;
    std::string family_name() const;
};

/// V(x,y) = h(|x|) h(|y|) h(|x-y|); satisfies the three-body symmetry identically.
Potential6D make_product_triplet(const RadialPotential& h);

/// V(x,y) = w(|M^{-1}(x,y)|); the permutation action is orthogonal in the
/// M^{-1} coordinates, so the three-body symmetry holds as well.
Potential6D make_isotropic_after_M(const RadialPotential& w, const MetricM& m);

Potential6D make_tabulated_grid(std::shared_ptr<TabulatedGrid6D> table);

/// Arbitrary evaluator, for tests and adapters. Certificate starts Asserted.
Potential6D make_custom(std::function<double(const Vec3&, const Vec3&)> f, double support_radius);

/// Evaluator (x,y) -> V(M(x,y)); support radius grows by the largest
/// eigenvalue of M^{-1}.
Potential6D transform_by_metric(const Potential6D& v, const MetricM& m);

struct SymmetryReport {
    double max_violation = 0.0;
    bool passed = false;
    long first_violation = -1;  // sample index, -1 if none
    long samples = 0;
};

/// Checks V(x,y)=V(y,x) and the three-point permutation identity on seeded
/// samples inside the support ball. Throws if the evaluator goes negative.
SymmetryReport check_three_body_symmetry(const Potential6D& v, long sample_count,
                                         double tolerance, std::uint64_t seed = 12345);

/// Runs the symmetry check and stamps the certificate.
Potential6D with_symmetry_certificate(Potential6D v, long sample_count, double tolerance,
                                      std::uint64_t seed = 12345);

}  // namespace bec3::potentials
