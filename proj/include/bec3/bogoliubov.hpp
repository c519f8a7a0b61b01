#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bec3/gp.hpp"

namespace bec3::bogoliubov {

/// Hessian blocks of the GP functional at a converged minimizer, projected
/// onto the orthogonal complement of u0:
///   D      = -Lap + V_ext + b1 u0^2 + (b2/2) u0^4 - mu
///   D_plus = D + 2 b1 u0^2 + b2 u0^4
/// The quartic terms follow the standard second variation; the quintic term
/// in D_plus carries the single-power u0^4 block the excitation operator is
/// built from. quadratic_form_true uses the full second variation of the
/// constrained energy (2 b1 u0^2 + 2 b2 u0^4 on top of D).
class HessianOperators {
public:
    HessianOperators(const gp::GPSolution& sol, const gp::GPProblem& p);

    std::size_t dim() const { return u0_.size(); }
    std::size_t projector_rank() const { return u0_.size() - 1; }
    const std::vector<double>& u0() const { return u0_; }
    double mu() const { return mu_; }
    const gp::GPEngine& engine() const { return *eng_; }
    bool homogeneous() const;

    /// Removes the u0 component (h^3-weighted projection).
    void project(std::vector<double>& phi) const;

    void apply_D(const std::vector<double>& phi, std::vector<double>& out) const;
    void apply_Dplus(const std::vector<double>& phi, std::vector<double>& out) const;

    /// <phi, D phi> plus the full-second-variation extra couplings.
    double quadratic_form_true(const std::vector<double>& phi) const;

    double coupling_b1() const { return b1_; }
    double coupling_b2() const { return b2_; }
    double u0_const() const;  // value of the constant field (homogeneous case)

private:
    void apply_weighted(const std::vector<double>& phi, const std::vector<double>& w,
                        std::vector<double>& out) const;

    std::shared_ptr<gp::GPEngine> eng_;
    std::vector<double> u0_;
    double mu_ = 0.0;
    double b1_ = 0.0, b2_ = 0.0;
    std::vector<double> w_minus_;       // multiplication part of D
    std::vector<double> w_plus_extra_;  // D_plus - D
    std::vector<double> w_true_extra_;  // second-variation extra
};

HessianOperators build_hessian(const gp::GPSolution& sol, const gp::GPProblem& p);

enum class SpectrumMethod { Auto, Dense, Iterative, Analytic };

struct BogoliubovSpectrum {
    std::vector<double> eigenvalues;     // ascending
    std::vector<int> multiplicities;     // size of the near-degenerate group of each eigenvalue
    std::vector<double> p_squared;       // |p|^2 per mode on the homogeneous torus, else empty
    std::string method;
    std::size_t projector_rank = 0;
};

/// k smallest eigenvalues of E = (D^{1/2} (D + b u0^4 + quartic analog) D^{1/2})^{1/2}
/// restricted to the complement of u0.
BogoliubovSpectrum excitation_spectrum(const HessianOperators& hess, int k,
                                       SpectrumMethod method = SpectrumMethod::Auto,
                                       std::uint64_t seed = 2024);

struct ExpansionRow {
    double eps = 0.0;
    double energy_difference = 0.0;  // E((u0 + eps phi)/norm) - e_GP
    double quadratic = 0.0;          // (eps^2/2) <(phi,phi), E''(phi,phi)>
    double ratio = 0.0;              // energy_difference / quadratic (NaN when both vanish)
};

/// Convergence table of the normalized-perturbation energy expansion; phi must
/// be orthogonal to u0 within 1e-10.
std::vector<ExpansionRow> hessian_expansion_check(const gp::GPSolution& sol,
                                                  const gp::GPProblem& p,
                                                  const std::vector<double>& phi,
                                                  const std::vector<double>& eps_list);

}  // namespace bec3::bogoliubov
