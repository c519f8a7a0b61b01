// Independent reference computations for the test suites. Everything here is
// deliberately decoupled from the production solvers: closed forms, a shooting
// integrator for the radial scattering problem, and a dense 1D diagonalization
// for the harmonic oscillator.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

constexpr double kPi = 3.14159265358979323846;

/// d=3 square well: b = 8 pi (R - tanh(kappa R)/kappa), kappa = sqrt(v0/2).
inline double square_well_b3(double v0, double R) {
    const double k = std::sqrt(0.5 * v0);
    return 8.0 * kPi * (R - std::tanh(k * R) / k);
}

/// d=3 square well scattering length a = R - tanh(kappa R)/kappa.
inline double square_well_a3(double v0, double R) {
    const double k = std::sqrt(0.5 * v0);
    return R - std::tanh(k * R) / k;
}

/// Exact value of the Dirichlet-truncated problem: b_R = b / (1 - a/R).
inline double square_well_b3_truncated(double v0, double R, double r_inf) {
    return square_well_b3(v0, R) / (1.0 - square_well_a3(v0, R) / r_inf);
}

/// High-resolution RK4 shooting for 2 (f'' + (d-1)/r f') = v f with regularity
/// at the origin and f(r_inf) = 1; returns b = surface(d) int v f r^{d-1} dr.
inline double shooting_b(int d, const std::function<double(double)>& v, double r_inf,
                         long steps = 400000) {
    const double h = r_inf / double(steps);
    double r = 1e-8 * r_inf;
    double f = 1.0;
    double fp = v(0.0) * r / (2.0 * d);
    std::vector<double> rs, fs;
    rs.reserve(std::size_t(steps) + 1);
    fs.reserve(std::size_t(steps) + 1);
    rs.push_back(0.0);
    fs.push_back(1.0);
    auto acc = [&](double rr, double ff, double fderiv) {
        return 0.5 * v(rr) * ff - (d - 1) / rr * fderiv;
    };
    for (long i = 0; i < steps; ++i) {
        const double k1f = fp, k1p = acc(r, f, fp);
        const double k2f = fp + 0.5 * h * k1p, k2p = acc(r + 0.5 * h, f + 0.5 * h * k1f, fp + 0.5 * h * k1p);
        const double k3f = fp + 0.5 * h * k2p, k3p = acc(r + 0.5 * h, f + 0.5 * h * k2f, fp + 0.5 * h * k2p);
        const double k4f = fp + h * k3p, k4p = acc(r + h, f + h * k3f, fp + h * k3p);
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        fp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += h;
        rs.push_back(r);
        fs.push_back(f);
    }
    const double fend = f;
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
        const double ra = rs[i], rb = rs[i + 1];
        const double ga = v(ra) * fs[i] * std::pow(ra, d - 1);
        const double gb = v(rb) * fs[i + 1] * std::pow(rb, d - 1);
        integral += 0.5 * (ga + gb) * (rb - ra);
    }
    const double surface = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
    return surface * integral / fend;
}

/// Ground eigenvalue of -u'' + x^2 u on (-L/2, L/2), Dirichlet walls, n interior
/// points: the separable oracle for the 3D harmonic trap (energy 3 E_1d... the
/// 3D discrete ground energy is exactly 3 times this value).
inline double harmonic_1d_ground(int n, double L) {
    const double h = L / (n + 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double x = -0.5 * L + (i + 1) * h;
        A(i, i) = 2.0 / (h * h) + x * x;
        if (i + 1 < n) {
            A(i, i + 1) = -1.0 / (h * h);
            A(i + 1, i) = -1.0 / (h * h);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    return es.eigenvalues()(0);
}

}  // namespace oracles
