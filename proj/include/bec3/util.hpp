#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bec3 {

/// Configuration / input validation failures (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Solver failures: non-convergence, divergence, stagnation (CLI exit code 1).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violated operation preconditions.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Deterministic RNG. Wraps mt19937_64 with our own distributions so that
/// streams do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Sum in fixed 4096-element chunks, chunks combined in index order.
/// The result does not depend on thread count, so parallel callers get
/// run-to-run identical reductions.
double deterministic_dot(const std::vector<double>& a, const std::vector<double>& b);
double deterministic_sum(const std::vector<double>& a);

/// Unit-sphere surface area in R^d: 2 pi^{d/2} / Gamma(d/2).
double sphere_surface(int d);

/// Least-squares line fit y = c0 + c1 x. Throws on degenerate abscissas.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double residual = 0.0;  // rms of fit residuals
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bec3
