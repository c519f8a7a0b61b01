#include "bec3/bogoliubov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace bec3::bogoliubov {

using gp::GPEngine;
using gp::GPProblem;
using gp::GPSolution;

HessianOperators::HessianOperators(const GPSolution& sol, const GPProblem& p)
    : eng_(std::make_shared<GPEngine>(p)), u0_(sol.u), b1_(p.b1), b2_(p.b2) {
    if (!sol.converged)
        throw PreconditionError("build_hessian: solution is not converged");
    if (u0_.size() != p.size())
        throw PreconditionError("build_hessian: field size does not match the grid");
    mu_ = sol.mu;
    const auto& trap = eng_->trap_values();
    const std::size_t N = u0_.size();
    w_minus_.resize(N);
    w_plus_extra_.resize(N);
    w_true_extra_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double u2 = u0_[i] * u0_[i];
        const double u4 = u2 * u2;
        w_minus_[i] = trap[i] + b1_ * u2 + 0.5 * b2_ * u4 - mu_;
        w_plus_extra_[i] = 2.0 * b1_ * u2 + b2_ * u4;
        w_true_extra_[i] = 2.0 * b1_ * u2 + 2.0 * b2_ * u4;
    }
}

bool HessianOperators::homogeneous() const {
    if (eng_->problem().boundary != gp::Boundary::Periodic) return false;
    if (eng_->problem().trap.kind != gp::TrapKind::None) return false;
    double lo = u0_[0], hi = u0_[0];
    for (double x : u0_) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi - lo <= 1e-10 * std::max(std::abs(hi), 1e-300);
}

double HessianOperators::u0_const() const {
    return deterministic_sum(u0_) / double(u0_.size());
}

void HessianOperators::project(std::vector<double>& phi) const {
    const double c = eng_->dot(u0_, phi);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(phi.size()); ++i)
        phi[std::size_t(i)] -= c * u0_[std::size_t(i)];
}

void HessianOperators::apply_weighted(const std::vector<double>& phi, const std::vector<double>& w,
                                      std::vector<double>& out) const {
    std::vector<double> q = phi;
    project(q);
    eng_->apply_minus_laplacian(q, out);
    for (std::size_t i = 0; i < q.size(); ++i) out[i] += w[i] * q[i];
    project(out);
}

void HessianOperators::apply_D(const std::vector<double>& phi, std::vector<double>& out) const {
    apply_weighted(phi, w_minus_, out);
}

void HessianOperators::apply_Dplus(const std::vector<double>& phi, std::vector<double>& out) const {
    std::vector<double> w(w_minus_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = w_minus_[i] + w_plus_extra_[i];
    apply_weighted(phi, w, out);
}

double HessianOperators::quadratic_form_true(const std::vector<double>& phi) const {
    std::vector<double> out(phi.size());
    apply_D(phi, out);
    double q = eng_->dot(phi, out);
    std::vector<double> wphi(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) wphi[i] = w_true_extra_[i] * phi[i];
    q += eng_->dot(phi, wphi);
    return q;
}

HessianOperators build_hessian(const GPSolution& sol, const GPProblem& p) {
    return HessianOperators(sol, p);
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Orthonormal basis of the complement of u0hat (unit Euclidean norm) as the
/// trailing columns of the Householder reflector mapping e0 to u0hat.
Mat complement_basis(const Vec& u0hat) {
    const Eigen::Index N = u0hat.size();
    Vec v = u0hat;
    v(0) -= (u0hat(0) >= 0.0 ? -1.0 : 1.0);  // v = u0hat + sign(u0hat_0) e0... keep stable form
    // Householder H = I - 2 v v^T / (v^T v) maps -sign * e0 to u0hat; any sign works,
    // the trailing columns always span the complement.
    const double vv = v.squaredNorm();
    Mat Q(N, N - 1);
    for (Eigen::Index j = 1; j < N; ++j) {
        Vec col = Vec::Zero(N);
        col(j) = 1.0;
        col -= (2.0 * v(j) / vv) * v;
        Q.col(j - 1) = col;
    }
    return Q;
}

struct DenseOps {
    Mat D, Dp;  // projected, (N-1) x (N-1)
};

DenseOps assemble_dense(const HessianOperators& h) {
    const std::size_t N = h.dim();
    const auto& eng = h.engine();
    Vec u0hat = Vec::Zero(Eigen::Index(N));
    for (std::size_t i = 0; i < N; ++i) u0hat(Eigen::Index(i)) = h.u0()[i];
    u0hat.normalize();
    Mat Q = complement_basis(u0hat);

    Mat Dfull = Mat::Zero(Eigen::Index(N), Eigen::Index(N));
    Mat Dpfull = Mat::Zero(Eigen::Index(N), Eigen::Index(N));
    std::vector<double> e(N, 0.0), out(N);
    for (std::size_t j = 0; j < N; ++j) {
        e[j] = 1.0;
        h.apply_D(e, out);
        for (std::size_t i = 0; i < N; ++i) Dfull(Eigen::Index(i), Eigen::Index(j)) = out[i];
        h.apply_Dplus(e, out);
        for (std::size_t i = 0; i < N; ++i) Dpfull(Eigen::Index(i), Eigen::Index(j)) = out[i];
        e[j] = 0.0;
    }
    DenseOps ops;
    ops.D = Q.transpose() * Dfull * Q;
    ops.Dp = Q.transpose() * Dpfull * Q;
    ops.D = 0.5 * (ops.D + ops.D.transpose());
    ops.Dp = 0.5 * (ops.Dp + ops.Dp.transpose());
    return ops;
}

void group_multiplicities(BogoliubovSpectrum& spec) {
    const auto& ev = spec.eigenvalues;
    spec.multiplicities.assign(ev.size(), 1);
    const double scale = ev.empty() ? 1.0 : std::max(std::abs(ev.back()), 1e-300);
    std::size_t start = 0;
    for (std::size_t i = 1; i <= ev.size(); ++i) {
        if (i == ev.size() || std::abs(ev[i] - ev[start]) > 1e-6 * scale) {
            for (std::size_t j = start; j < i; ++j) spec.multiplicities[j] = int(i - start);
            start = i;
        }
    }
}

BogoliubovSpectrum spectrum_dense(const HessianOperators& h, int k) {
    DenseOps ops = assemble_dense(h);
    Eigen::SelfAdjointEigenSolver<Mat> esD(ops.D);
    const Vec lam = esD.eigenvalues();
    const double scale = std::max(std::abs(lam(lam.size() - 1)), 1e-300);
    if (lam(0) < -1e-8 * scale) {
        std::ostringstream os;
        os << "excitation_spectrum: D indefinite beyond tolerance (smallest eigenvalue " << lam(0)
           << "); the reference state is not a minimizer";
        throw SolverError(os.str());
    }
    Vec sq = lam.cwiseMax(0.0).cwiseSqrt();
    Mat Dhalf = esD.eigenvectors() * sq.asDiagonal() * esD.eigenvectors().transpose();
    Mat S = Dhalf * ops.Dp * Dhalf;
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> esS(S);
    const Vec ev2 = esS.eigenvalues();
    const double s2 = std::max(std::abs(ev2(ev2.size() - 1)), 1e-300);
    BogoliubovSpectrum spec;
    spec.method = "dense";
    spec.projector_rank = h.projector_rank();
    for (int i = 0; i < k; ++i) {
        const double x = ev2(i);
        if (x < -1e-8 * s2)
            throw SolverError("excitation_spectrum: negative squared excitation energy");
        spec.eigenvalues.push_back(std::sqrt(std::max(x, 0.0)));
    }
    group_multiplicities(spec);
    return spec;
}

BogoliubovSpectrum spectrum_analytic(const HessianOperators& h, int k) {
    const auto& p = h.engine().problem();
    const int n = p.points;
    const double dk = 2.0 * 3.14159265358979323846 / p.box_side;
    const double u0c = h.u0_const();
    const double u2 = u0c * u0c;
    const double u4 = u2 * u2;
    const double plus_extra = 2.0 * h.coupling_b1() * u2 + h.coupling_b2() * u4;
    std::vector<std::pair<double, double>> modes;  // (e, |p|^2)
    auto freq = [&](int m) { return m <= n / 2 ? m : m - n; };
    for (int mx = 0; mx < n; ++mx)
        for (int my = 0; my < n; ++my)
            for (int mz = 0; mz < n; ++mz) {
                if (mx == 0 && my == 0 && mz == 0) continue;
                const double kx = dk * freq(mx), ky = dk * freq(my), kz = dk * freq(mz);
                const double q = kx * kx + ky * ky + kz * kz;
                modes.emplace_back(std::sqrt(std::max(q * (q + plus_extra), 0.0)), q);
            }
    std::sort(modes.begin(), modes.end());
    BogoliubovSpectrum spec;
    spec.method = "analytic";
    spec.projector_rank = h.projector_rank();
    for (int i = 0; i < k; ++i) {
        spec.eigenvalues.push_back(modes[std::size_t(i)].first);
        spec.p_squared.push_back(modes[std::size_t(i)].second);
    }
    group_multiplicities(spec);
    return spec;
}

/// Projected CG for one of the Hessian blocks.
void cg_solve(const HessianOperators& h, bool plus, const std::vector<double>& rhs,
              std::vector<double>& x, double tol, long max_iter) {
    const std::size_t N = rhs.size();
    const auto& eng = h.engine();
    x.assign(N, 0.0);
    std::vector<double> r = rhs, p = rhs, ap(N);
    double rr = eng.dot(r, r);
    const double b2n = rr;
    if (b2n == 0.0) return;
    for (long it = 0; it < max_iter; ++it) {
        if (plus)
            h.apply_Dplus(p, ap);
        else
            h.apply_D(p, ap);
        const double pap = eng.dot(p, ap);
        if (pap <= 0.0) throw SolverError("bogoliubov CG: operator not positive definite");
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < N; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < N; ++i) r[i] -= alpha * ap[i];
        const double rr2 = eng.dot(r, r);
        if (rr2 <= tol * tol * b2n) return;
        const double beta = rr2 / rr;
        rr = rr2;
        for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * p[i];
    }
    throw SolverError("bogoliubov CG: no convergence");
}

/// Subspace iteration on (D_plus D)^{-1}; Ritz values of D D_plus give the
/// squared excitation energies.
BogoliubovSpectrum spectrum_iterative(const HessianOperators& h, int k, std::uint64_t seed) {
    const std::size_t N = h.dim();
    const auto& eng = h.engine();
    const int block = std::min<int>(int(h.projector_rank()), k + 8);
    Rng rng(seed);
    auto V = std::vector<std::vector<double>>(std::size_t(block), std::vector<double>(N));
    for (auto& v : V) {
        for (auto& x : v) x = rng.normal();
        h.project(v);
    }
    auto orthonormalize = [&](std::vector<std::vector<double>>& B) {
        for (std::size_t j = 0; j < B.size(); ++j) {
            for (std::size_t l = 0; l < j; ++l) {
                const double c = eng.dot(B[l], B[j]);
                for (std::size_t i = 0; i < N; ++i) B[j][i] -= c * B[l][i];
            }
            const double nn = std::sqrt(eng.dot(B[j], B[j]));
            if (nn <= 1e-14) throw SolverError("bogoliubov iterative: subspace collapsed");
            for (auto& x : B[j]) x /= nn;
        }
    };
    orthonormalize(V);
    std::vector<double> prev(std::size_t(k), -1.0);
    std::vector<double> tmp(N), tmp2(N);
    Eigen::VectorXcd ritz;
    for (int sweep = 0; sweep < 400; ++sweep) {
        for (auto& v : V) {
            cg_solve(h, false, v, tmp, 1e-12, 5000);   // tmp = D^{-1} v
            cg_solve(h, true, tmp, tmp2, 1e-12, 5000); // tmp2 = D_plus^{-1} tmp
            v = tmp2;
            h.project(v);
        }
        orthonormalize(V);
        // Ritz extraction for G = D D_plus on span(V)
        Mat M = Mat::Zero(block, block);
        for (int j = 0; j < block; ++j) {
            h.apply_Dplus(V[std::size_t(j)], tmp);
            h.apply_D(tmp, tmp2);
            for (int i = 0; i < block; ++i) M(i, j) = eng.dot(V[std::size_t(i)], tmp2);
        }
        Eigen::EigenSolver<Mat> es(M);
        ritz = es.eigenvalues();
        std::vector<double> lam;
        for (Eigen::Index i = 0; i < ritz.size(); ++i) lam.push_back(ritz(i).real());
        std::sort(lam.begin(), lam.end());
        bool done = true;
        for (int i = 0; i < k; ++i) {
            const double ref = std::max(std::abs(lam[std::size_t(i)]), 1e-300);
            if (std::abs(lam[std::size_t(i)] - prev[std::size_t(i)]) > 1e-13 * ref) done = false;
            prev[std::size_t(i)] = lam[std::size_t(i)];
        }
        if (done && sweep >= 3) break;
    }
    BogoliubovSpectrum spec;
    spec.method = "iterative";
    spec.projector_rank = h.projector_rank();
    const double scale = std::max(std::abs(prev[std::size_t(k - 1)]), 1e-300);
    for (int i = 0; i < k; ++i) {
        if (prev[std::size_t(i)] < -1e-8 * scale)
            throw SolverError("excitation_spectrum: negative squared excitation energy");
        spec.eigenvalues.push_back(std::sqrt(std::max(prev[std::size_t(i)], 0.0)));
    }
    group_multiplicities(spec);
    return spec;
}

}  // namespace

BogoliubovSpectrum excitation_spectrum(const HessianOperators& hess, int k, SpectrumMethod method,
                                       std::uint64_t seed) {
    if (k < 1) throw PreconditionError("excitation_spectrum: k must be >= 1");
    if (std::size_t(k) >= hess.projector_rank())
        throw PreconditionError("excitation_spectrum: k must be below the projected dimension");
    if (method == SpectrumMethod::Auto) {
        if (hess.homogeneous())
            method = SpectrumMethod::Analytic;
        else if (hess.dim() <= 4096)
            method = SpectrumMethod::Dense;
        else
            method = SpectrumMethod::Iterative;
    }
    switch (method) {
        case SpectrumMethod::Dense:
            if (hess.dim() > 4096)
                throw PreconditionError(
                    "excitation_spectrum: dense path limited to 16^3 grid points");
            return spectrum_dense(hess, k);
        case SpectrumMethod::Analytic:
            if (!hess.homogeneous())
                throw PreconditionError(
                    "excitation_spectrum: analytic path needs a homogeneous torus state");
            return spectrum_analytic(hess, k);
        case SpectrumMethod::Iterative:
            return spectrum_iterative(hess, k, seed);
        case SpectrumMethod::Auto:
            break;
    }
    throw SolverError("excitation_spectrum: unreachable method dispatch");
}

std::vector<ExpansionRow> hessian_expansion_check(const GPSolution& sol, const GPProblem& p,
                                                  const std::vector<double>& phi,
                                                  const std::vector<double>& eps_list) {
    HessianOperators hess(sol, p);
    const auto& eng = hess.engine();
    const double overlap = eng.dot(sol.u, phi);
    const double pn = std::sqrt(eng.dot(phi, phi));
    if (std::abs(overlap) > 1e-10 * std::max(pn, 1e-30))
        throw PreconditionError("hessian_expansion_check: phi must be orthogonal to u0");
    const double qf = 2.0 * hess.quadratic_form_true(phi);  // <(phi,phi), E''(phi,phi)>
    std::vector<ExpansionRow> rows;
    std::vector<double> pert(phi.size());
    for (double eps : eps_list) {
        for (std::size_t i = 0; i < phi.size(); ++i) pert[i] = sol.u[i] + eps * phi[i];
        const double nrm = std::sqrt(eng.dot(pert, pert));
        for (auto& x : pert) x /= nrm;
        const auto br = eng.energy_breakdown(pert);
        ExpansionRow row;
        row.eps = eps;
        row.energy_difference = br.total() - sol.energy;
        row.quadratic = 0.5 * eps * eps * qf;
        row.ratio = row.quadratic != 0.0
                        ? row.energy_difference / row.quadratic
                        : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace bec3::bogoliubov
