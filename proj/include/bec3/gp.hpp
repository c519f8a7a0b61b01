#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bec3/util.hpp"

namespace bec3::gp {

enum class Boundary { Periodic, Dirichlet };
enum class TrapKind { None, Power, Tabulated };

struct Trap {
    TrapKind kind = TrapKind::None;
    double strength = 1.0;  // C in C |x|^alpha
    double exponent = 2.0;  // alpha
    std::vector<double> radii, values;

    double operator()(double r) const;
};

struct GPProblem {
    double box_side = 1.0;
    int points = 16;
    Boundary boundary = Boundary::Periodic;
    Trap trap;
    double b1 = 0.0;  // quartic coupling (may be negative)
    double b2 = 0.0;  // quintic coupling (>= 0 required when b1 < 0)

    void validate() const;
    double spacing() const {
        return boundary == Boundary::Periodic ? box_side / points : box_side / (points + 1);
    }
    double coord(int i) const {
        return boundary == Boundary::Periodic ? -0.5 * box_side + i * spacing()
                                              : -0.5 * box_side + (i + 1) * spacing();
    }
    std::size_t size() const {
        return std::size_t(points) * std::size_t(points) * std::size_t(points);
    }
};

struct EnergyBreakdown {
    double kinetic = 0.0;
    double trap = 0.0;
    double quartic = 0.0;   // (b1/2) int u^4
    double quintic = 0.0;   // (b2/6) int u^6
    double total() const { return kinetic + trap + quartic + quintic; }
};

struct MinimizeOptions {
    double step = 0.0;  // 0 = from the inverse of the kinetic operator norm
    long max_iterations = 100000;
    double tolerance = 1e-10;  // Euler-Lagrange residual, L2
    int restarts = 1;
    enum class Init { Constant, Gaussian, Random } init = Init::Constant;
    double gaussian_width = 1.0;
    std::uint64_t seed = 1;
    int workers = 2;
    bool record_trace = false;
};

struct GPSolution {
    std::vector<double> u;
    EnergyBreakdown breakdown;
    double energy = 0.0;
    double mu = 0.0;
    double residual = 0.0;
    long iterations = 0;
    bool converged = false;
    double norm_deviation = 0.0;  // max | ||u||^2 - 1 | across iterations
    double min_field = 0.0;
    double min_energy_seen = 0.0;  // lowest energy evaluated anywhere in the flow
    int restarts_run = 1;
    double energy_spread = 0.0;  // max-min energy across restarts
    std::vector<std::array<double, 3>> trace;  // (iteration, energy, residual)
};

/// Grid machinery shared by the minimizer and the Hessian operators: kinetic
/// term (spectral on the torus, second-order stencil with Dirichlet walls),
/// trap samples, and h^3-weighted sums.
class GPEngine {
public:
    explicit GPEngine(const GPProblem& p);
    ~GPEngine();
    GPEngine(const GPEngine&) = delete;
    GPEngine& operator=(const GPEngine&) = delete;

    const GPProblem& problem() const { return prob_; }
    double cell_volume() const { return h3_; }
    const std::vector<double>& trap_values() const { return trap_; }

    double dot(const std::vector<double>& a, const std::vector<double>& b) const {
        return h3_ * deterministic_dot(a, b);
    }
    double norm(const std::vector<double>& a) const { return std::sqrt(dot(a, a)); }

    void apply_minus_laplacian(const std::vector<double>& u, std::vector<double>& out) const;
    double kinetic_energy(const std::vector<double>& u) const;

    /// H u = -Lap u + V_ext u + b1 u^3 + (b2/2) u^5
    void apply_hamiltonian(const std::vector<double>& u, std::vector<double>& out) const;

    EnergyBreakdown energy_breakdown(const std::vector<double>& u) const;

    /// Largest kinetic eigenvalue plus the trap bound, for step sizing.
    double operator_norm_estimate() const;

private:
    GPProblem prob_;
    double h3_ = 0.0;
    std::vector<double> trap_;
    struct Fft;
    std::unique_ptr<Fft> fft_;
    friend class FftAccess;
};

/// Projected gradient flow on the unit sphere with Barzilai-Borwein steps and
/// backtracking; returns the lowest-energy restart.
GPSolution minimize(const GPProblem& p, const MinimizeOptions& opts);

/// Energy components by grid quadrature; requires ||u|| = 1 within 1e-9.
EnergyBreakdown energy(const std::vector<double>& u, const GPProblem& p);

/// EL multiplier mu = K + T + b1 int u^4 + (b2/2) int u^6 of a converged solution.
double chemical_potential(const GPSolution& sol, const GPProblem& p);

struct DropletResult {
    std::vector<double> box_sides;
    std::vector<double> participation;  // 1 / int u^4 per box
    std::vector<double> energies;
    bool localized = false;
    GPSolution largest_box;
};

/// Minimizes on a ladder of torus boxes (no trap) and reports whether the
/// participation ratio stabilizes (self-trapped droplet) or grows with the box.
DropletResult droplet_search(double b1, double b2, const std::vector<double>& box_sides,
                             int points, const MinimizeOptions& opts);

/// -3 b1^2 / (8 b2): lower bound on the energy of any unit-mass field when
/// b1 < 0 <= b2, from the L4 interpolation bound.
double interpolation_lower_bound(double b1, double b2);

}  // namespace bec3::gp
