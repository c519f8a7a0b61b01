#include "bec3/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bec3::potentials {

double RadialPotential::operator()(double r) const {
    switch (family) {
        case RadialFamily::Zero:
            return 0.0;
        case RadialFamily::SquareWell:
            if (r < radius) return height;
            if (r == radius) return 0.5 * height;
            return 0.0;
        case RadialFamily::Gaussian: {
            if (r > support_radius) return 0.0;
            const double t = r / width;
            return amplitude * std::exp(-0.5 * t * t);
        }
        case RadialFamily::Tabulated: {
            if (radii.empty() || r > radii.back()) return 0.0;
            if (r <= radii.front()) return values.front();
            auto it = std::upper_bound(radii.begin(), radii.end(), r);
            const std::size_t j = std::size_t(it - radii.begin());
            const double t = (r - radii[j - 1]) / (radii[j] - radii[j - 1]);
            return values[j - 1] + t * (values[j] - values[j - 1]);
        }
    }
    return 0.0;
}

double RadialPotential::integral() const {
    const double surf = sphere_surface(dimension);
    if (family == RadialFamily::Zero) return 0.0;
    if (family == RadialFamily::SquareWell)
        return height * surf * std::pow(radius, dimension) / dimension;
    // fine trapezoid; integrand is smooth on [0, R0]
    const int n = 20000;
    const double h = support_radius / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double r = i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        s += w * (*this)(r)*std::pow(r, dimension - 1);
    }
    return surf * s * h;
}

std::string RadialPotential::family_name() const {
    switch (family) {
        case RadialFamily::Zero: return "zero";
        case RadialFamily::SquareWell: return "square_well";
        case RadialFamily::Gaussian: return "gaussian";
        case RadialFamily::Tabulated: return "tabulated";
    }
    return "?";
}

std::string RadialPotential::params_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (family) {
        case RadialFamily::Zero: break;
        case RadialFamily::SquareWell: os << "v0=" << height << ",R=" << radius; break;
        case RadialFamily::Gaussian:
            os << "amplitude=" << amplitude << ",width=" << width
               << ",truncation_widths=" << truncation_widths;
            break;
        case RadialFamily::Tabulated: os << "points=" << radii.size(); break;
    }
    return os.str();
}

RadialPotential make_zero(int d) {
    if (d < 3) throw PreconditionError("radial potential: dimension must be >= 3");
    RadialPotential v;
    v.dimension = d;
    v.family = RadialFamily::Zero;
    v.support_radius = 0.0;
    return v;
}

RadialPotential make_square_well(int d, double v0, double R) {
    if (d < 3) throw PreconditionError("radial potential: dimension must be >= 3");
    if (v0 < 0.0) throw ConfigError("square well: v0 must be >= 0");
    if (R <= 0.0) throw ConfigError("square well: radius must be > 0");
    RadialPotential v;
    v.dimension = d;
    v.family = RadialFamily::SquareWell;
    v.height = v0;
    v.radius = R;
    v.support_radius = R;
    return v;
}

RadialPotential make_gaussian(int d, double amplitude, double width, double truncation_widths) {
    if (d < 3) throw PreconditionError("radial potential: dimension must be >= 3");
    if (amplitude < 0.0) throw ConfigError("gaussian: amplitude must be >= 0");
    if (width <= 0.0) throw ConfigError("gaussian: width must be > 0");
    if (truncation_widths <= 0.0) throw ConfigError("gaussian: truncation_widths must be > 0");
    RadialPotential v;
    v.dimension = d;
    v.family = RadialFamily::Gaussian;
    v.amplitude = amplitude;
    v.width = width;
    v.truncation_widths = truncation_widths;
    v.support_radius = width * truncation_widths;
    return v;
}

RadialPotential make_tabulated(int d, std::vector<double> radii, std::vector<double> values) {
    if (d < 3) throw PreconditionError("radial potential: dimension must be >= 3");
    if (radii.size() != values.size() || radii.size() < 2)
        throw ConfigError("tabulated potential: need >= 2 (radius, value) rows");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (i > 0 && radii[i] <= radii[i - 1])
            throw ConfigError("tabulated potential: radii must be strictly increasing");
        if (values[i] < 0.0) throw ConfigError("tabulated potential: values must be >= 0");
    }
    if (radii.front() < 0.0) throw ConfigError("tabulated potential: radii must be >= 0");
    RadialPotential v;
    v.dimension = d;
    v.family = RadialFamily::Tabulated;
    v.radii = std::move(radii);
    v.values = std::move(values);
    v.support_radius = v.radii.back();
    return v;
}

RadialPotential scaled(const RadialPotential& v, double s) {
    if (s <= 0.0) throw PreconditionError("scaled potential: scale must be > 0");
    RadialPotential w = v;
    const double s2 = s * s;
    switch (v.family) {
        case RadialFamily::Zero: break;
        case RadialFamily::SquareWell:
            w.height = s2 * v.height;
            w.radius = v.radius / s;
            break;
        case RadialFamily::Gaussian:
            w.amplitude = s2 * v.amplitude;
            w.width = v.width / s;
            break;
        case RadialFamily::Tabulated:
            for (auto& r : w.radii) r /= s;
            for (auto& val : w.values) val *= s2;
            break;
    }
    w.support_radius = v.support_radius / s;
    return w;
}

MetricM make_metric_M() {
    const double s3 = std::sqrt(3.0);
    const double s8 = 2.0 * std::sqrt(2.0);
    return {(s3 + 1.0) / s8, (s3 - 1.0) / s8};
}

double Potential6D::operator()(const Vec3& x, const Vec3& y) const {
    switch (family) {
        case Family6D::ProductTriplet:
            return profile(norm3(x)) * profile(norm3(y)) * profile(norm3(sub3(x, y)));
        case Family6D::IsotropicAfterM: {
            const MetricM inv = iso_metric.inverse();
            const auto [zx, zy] = inv.apply(x, y);
            const double r = std::sqrt(zx[0] * zx[0] + zx[1] * zx[1] + zx[2] * zx[2] +
                                       zy[0] * zy[0] + zy[1] * zy[1] + zy[2] * zy[2]);
            return profile(r);
        }
        case Family6D::TabulatedGrid: {
            const auto& t = *table;
            const int n = t.points_per_axis;
            const double h = 2.0 * t.half_width / (n - 1);
            double c[6] = {x[0], x[1], x[2], y[0], y[1], y[2]};
            int i0[6];
            double fr[6];
            for (int a = 0; a < 6; ++a) {
                const double s = (c[a] + t.half_width) / h;
                if (s < 0.0 || s > n - 1) return 0.0;
                int i = int(s);
                if (i > n - 2) i = n - 2;
                i0[a] = i;
                fr[a] = s - i;
            }
            double val = 0.0;
            for (int corner = 0; corner < 64; ++corner) {
                double w = 1.0;
                std::size_t idx = 0;
                for (int a = 0; a < 6; ++a) {
                    const int bit = (corner >> a) & 1;
                    w *= bit ? fr[a] : 1.0 - fr[a];
                    idx = idx * std::size_t(n) + std::size_t(i0[a] + bit);
                }
                val += w * t.values[idx];
            }
            return val;
        }
        case Family6D::Transformed:
        case Family6D::Custom:
            return custom(x, y);
    }
    return 0.0;
}

std::string Potential6D::family_name() const {
    switch (family) {
        case Family6D::ProductTriplet: return "product_triplet";
        case Family6D::IsotropicAfterM: return "isotropic_after_m";
        case Family6D::TabulatedGrid: return "tabulated_grid";
        case Family6D::Transformed: return "transformed";
        case Family6D::Custom: return "custom";
    }
    return "?";
}

Potential6D make_product_triplet(const RadialPotential& h) {
    Potential6D v;
    v.family = Family6D::ProductTriplet;
    v.certificate = SymmetryCertificate::Checked;  // holds identically for this family
    v.profile = h;
    v.support_radius = std::sqrt(2.0) * h.support_radius;
    return v;
}

Potential6D make_isotropic_after_M(const RadialPotential& w, const MetricM& m) {
    Potential6D v;
    v.family = Family6D::IsotropicAfterM;
    v.certificate = SymmetryCertificate::Asserted;
    v.profile = w;
    v.iso_metric = m;
    v.support_radius = m.eig_max() * w.support_radius;
    return v;
}

Potential6D make_tabulated_grid(std::shared_ptr<TabulatedGrid6D> table) {
    if (!table || table->points_per_axis < 2)
        throw ConfigError("tabulated 6D grid: need >= 2 points per axis");
    const std::size_t n = std::size_t(table->points_per_axis);
    std::size_t expect = 1;
    for (int a = 0; a < 6; ++a) expect *= n;
    if (table->values.size() != expect)
        throw ConfigError("tabulated 6D grid: value count does not match points^6");
    for (double x : table->values)
        if (x < 0.0) throw ConfigError("tabulated 6D grid: values must be >= 0");
    Potential6D v;
    v.family = Family6D::TabulatedGrid;
    v.certificate = SymmetryCertificate::Asserted;
    v.table = std::move(table);
    v.support_radius = std::sqrt(6.0) * v.table->half_width;
    return v;
}

Potential6D make_custom(std::function<double(const Vec3&, const Vec3&)> f, double support_radius) {
    Potential6D v;
    v.family = Family6D::Custom;
    v.certificate = SymmetryCertificate::Asserted;
    v.custom = std::move(f);
    v.support_radius = support_radius;
    return v;
}

Potential6D transform_by_metric(const Potential6D& v, const MetricM& m) {
    if (m.is_identity()) {
        Potential6D w = v;
        return w;
    }
    if (v.family == Family6D::IsotropicAfterM && std::abs(v.iso_metric.diag - m.diag) < 1e-15 &&
        std::abs(v.iso_metric.off - m.off) < 1e-15) {
        // V(M z) = w(|z|): exactly radial, with the profile's own support
        Potential6D w;
        w.family = Family6D::IsotropicAfterM;
        w.certificate = v.certificate;
        w.profile = v.profile;
        w.iso_metric = identity_metric();
        w.support_radius = v.profile.support_radius;
        return w;
    }
    Potential6D w;
    w.family = Family6D::Transformed;
    w.certificate = SymmetryCertificate::Asserted;
    w.support_radius = v.support_radius * (1.0 / m.eig_min());  // largest eigenvalue of M^{-1}
    w.custom = [v, m](const Vec3& x, const Vec3& y) {
        const auto [mx, my] = m.apply(x, y);
        return v(mx, my);
    };
    return w;
}

SymmetryReport check_three_body_symmetry(const Potential6D& v, long sample_count,
                                         double tolerance, std::uint64_t seed) {
    if (sample_count < 1) throw PreconditionError("symmetry check: sample_count must be >= 1");
    Rng rng(seed);
    SymmetryReport rep;
    rep.samples = sample_count;
    const double R = v.support_radius > 0.0 ? 0.97 * v.support_radius : 1.0;
    for (long s = 0; s < sample_count; ++s) {
        double g[6];
        double nrm = 0.0;
        for (double& gi : g) {
            gi = rng.normal();
            nrm += gi * gi;
        }
        nrm = std::sqrt(nrm);
        const double rad = R * std::pow(rng.uniform(), 1.0 / 6.0);
        for (double& gi : g) gi *= rad / nrm;
        const Vec3 a{g[0], g[1], g[2]};
        const Vec3 b{g[3], g[4], g[5]};
        // with particle positions x=0, y=-a, z=-b the permutation identity reads
        // V(a,b) = V(-a, b-a) = V(a-b, -b); the pair swap adds V(b,a)
        const double vals[4] = {v(a, b), v(b, a), v({-a[0], -a[1], -a[2]}, sub3(b, a)),
                                v(sub3(a, b), {-b[0], -b[1], -b[2]})};
        double lo = vals[0], hi = vals[0];
        for (double x : vals) {
            if (x < 0.0) throw PreconditionError("symmetry check: evaluator returned a negative value");
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double viol = (hi - lo) / std::max(hi, 1e-300);
        if (viol > rep.max_violation) rep.max_violation = viol;
        if (viol > tolerance && rep.first_violation < 0) rep.first_violation = s;
    }
    rep.passed = rep.max_violation <= tolerance;
    return rep;
}

Potential6D with_symmetry_certificate(Potential6D v, long sample_count, double tolerance,
                                      std::uint64_t seed) {
    const auto rep = check_three_body_symmetry(v, sample_count, tolerance, seed);
    v.certificate = rep.passed ? SymmetryCertificate::Checked : SymmetryCertificate::Violated;
    return v;
}

}  // namespace bec3::potentials
