#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bec3/gp.hpp"
#include "oracles.hpp"

using namespace bec3;
using namespace bec3::gp;

namespace {

std::vector<double> cosine_mode(const GPProblem& p, int axis_freq) {
    std::vector<double> phi(p.size());
    const double twopi = 2.0 * oracles::kPi;
    std::size_t idx = 0;
    for (int ix = 0; ix < p.points; ++ix)
        for (int iy = 0; iy < p.points; ++iy)
            for (int iz = 0; iz < p.points; ++iz, ++idx)
                phi[idx] = std::sqrt(2.0) * std::cos(twopi * axis_freq * p.coord(ix) / p.box_side);
    return phi;
}

}  // namespace

TEST_CASE("torus pure quintic relaxes to the constant minimizer") {
    GPProblem p;
    p.points = 16;
    p.b2 = 1.0;
    MinimizeOptions o;
    o.tolerance = 1e-11;
    o.init = MinimizeOptions::Init::Random;
    o.seed = 4;
    o.record_trace = true;
    const auto s = minimize(p, o);
    CHECK(s.converged);
    CHECK(s.energy == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    for (double u : s.u) CHECK(u == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.mu == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(chemical_potential(s, p) == doctest::Approx(0.5).epsilon(1e-9));
    // monotone descent along the recorded trace
    for (std::size_t i = 1; i < s.trace.size(); ++i)
        CHECK(s.trace[i][1] <= s.trace[i - 1][1] + 1e-12 * (std::abs(s.trace[i - 1][1]) + 1.0));
    CHECK(s.norm_deviation <= 1e-12);
}

TEST_CASE("energy components on the unit torus") {
    GPProblem p;
    p.points = 16;
    p.b1 = 0.8;
    p.b2 = 1.4;
    std::vector<double> ones(p.size(), 1.0);
    const auto br = energy(ones, p);
    CHECK(br.kinetic == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(br.trap == 0.0);
    CHECK(br.quartic == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(br.quintic == doctest::Approx(1.4 / 6.0).epsilon(1e-13));

    GPProblem p6;
    p6.points = 16;
    p6.b2 = 6.0;
    const auto br6 = energy(ones, p6);
    CHECK(br6.total() == doctest::Approx(1.0).epsilon(1e-13));

    // spectral kinetic term is exact on a single Fourier mode
    GPProblem pk;
    pk.points = 16;
    const auto mode = cosine_mode(pk, 1);
    const auto brk = energy(mode, pk);
    CHECK(brk.kinetic == doctest::Approx(4.0 * oracles::kPi * oracles::kPi).epsilon(1e-12));
}

TEST_CASE("energy rejects non-unit fields") {
    GPProblem p;
    p.points = 8;
    std::vector<double> u(p.size(), 2.0);
    CHECK_THROWS_AS(energy(u, p), PreconditionError);
}

TEST_CASE("problem validation") {
    GPProblem p;
    p.points = 2;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.points = 8;
    p.b2 = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.b2 = 0.0;
    p.trap.kind = TrapKind::Power;
    p.trap.strength = -2.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("harmonic trap matches the separable dense 1D oracle") {
    GPProblem p;
    p.points = 32;
    p.box_side = 6.5;
    p.boundary = Boundary::Dirichlet;
    p.trap.kind = TrapKind::Power;
    p.trap.strength = 1.0;
    p.trap.exponent = 2.0;
    MinimizeOptions o;
    o.tolerance = 1e-9;
    o.init = MinimizeOptions::Init::Gaussian;
    const auto s = minimize(p, o);
    const double oracle = 3.0 * oracles::harmonic_1d_ground(p.points, p.box_side);
    CHECK(s.converged);
    CHECK(s.energy == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(std::abs(s.energy - 3.0) < 0.02);
    // mu equals E for the linear problem
    CHECK(s.mu == doctest::Approx(s.energy).epsilon(1e-8));
}

TEST_CASE("analytic gradient matches central finite differences") {
    for (bool periodic : {true, false})
        for (double b1 : {0.0, -0.7}) {
            GPProblem p;
            p.points = 12;
            p.box_side = periodic ? 1.0 : 4.0;
            p.boundary = periodic ? Boundary::Periodic : Boundary::Dirichlet;
            p.b1 = b1;
            p.b2 = 1.0;
            if (!periodic) {
                p.trap.kind = TrapKind::Power;
                p.trap.strength = 0.5;
                p.trap.exponent = 2.0;
            }
            GPEngine eng(p);
            Rng rng(101 + (periodic ? 7 : 0) + (b1 != 0.0 ? 1 : 0));
            const double h3 = eng.cell_volume();
            for (int field = 0; field < 10; ++field) {
                std::vector<double> u(p.size());
                for (auto& x : u) x = 1.0 + 0.3 * rng.normal();
                const double nrm = eng.norm(u);
                for (auto& x : u) x /= nrm;
                std::vector<double> Hu(u.size());
                eng.apply_hamiltonian(u, Hu);
                const double delta = 3e-6;
                for (int probe = 0; probe < 6; ++probe) {
                    const std::size_t i = std::size_t(rng.uniform() * double(u.size()));
                    std::vector<double> up = u, um = u;
                    up[i] += delta;
                    um[i] -= delta;
                    const double ep = eng.energy_breakdown(up).total();
                    const double em = eng.energy_breakdown(um).total();
                    const double fd = (ep - em) / (2.0 * delta);
                    const double an = 2.0 * h3 * Hu[i];
                    CHECK(fd == doctest::Approx(an).epsilon(1e-6));
                }
            }
        }
}

TEST_CASE("stability bound holds for every evaluated field") {
    for (auto [b1, b2] : {std::pair{-1.0, 1.0}, std::pair{-2.0, 0.5}}) {
        GPProblem p;
        p.points = 12;
        p.b1 = b1;
        p.b2 = b2;
        MinimizeOptions o;
        o.tolerance = 1e-10;
        o.init = MinimizeOptions::Init::Random;
        o.seed = 7;
        const auto s = minimize(p, o);
        const double bound = interpolation_lower_bound(b1, b2);
        CHECK(s.min_energy_seen >= bound - 1e-12);
        CHECK(s.energy > bound);
    }
}

TEST_CASE("virial identity for the trapped pure-quintic minimizer") {
    GPProblem p;
    p.points = 48;
    p.box_side = 9.0;
    p.boundary = Boundary::Dirichlet;
    p.trap.kind = TrapKind::Power;
    p.b2 = 1.0;
    MinimizeOptions o;
    o.tolerance = 1e-9;
    o.init = MinimizeOptions::Init::Gaussian;
    const auto s = minimize(p, o);
    const double virial =
        2.0 * s.breakdown.kinetic - 2.0 * s.breakdown.trap + 6.0 * s.breakdown.quintic;
    CHECK(std::abs(virial) <= 6e-3 * s.energy);
}

TEST_CASE("restarts agree on convex-regime configurations") {
    GPProblem p;
    p.points = 12;
    p.b1 = 0.5;
    p.b2 = 1.0;
    MinimizeOptions o;
    o.tolerance = 1e-11;
    o.init = MinimizeOptions::Init::Random;
    std::vector<GPSolution> sols;
    for (int r = 0; r < 5; ++r) {
        o.seed = 1000 + std::uint64_t(r);
        sols.push_back(minimize(p, o));
    }
    for (int r = 1; r < 5; ++r) {
        CHECK(std::abs(sols[std::size_t(r)].energy - sols[0].energy) <= 1e-8);
        double dev = 0.0;
        for (std::size_t i = 0; i < sols[0].u.size(); ++i)
            dev = std::max(dev, std::abs(sols[std::size_t(r)].u[i] - sols[0].u[i]));
        CHECK(dev <= 1e-4);
    }
    // the restart machinery reports the spread
    o.restarts = 3;
    o.seed = 55;
    const auto multi = minimize(p, o);
    CHECK(multi.restarts_run == 3);
    CHECK(multi.energy_spread >= 0.0);
    CHECK(multi.energy_spread <= 1e-8);
}

TEST_CASE("droplet search: delocalized vs self-trapped") {
    MinimizeOptions o;
    o.tolerance = 1e-7;
    o.max_iterations = 30000;
    o.gaussian_width = 0.2;
    // b1 = 0 relaxes to the constant on every torus
    {
        GPProblem p;
        p.points = 12;
        p.box_side = 2.0;
        p.b2 = 1.0;
        MinimizeOptions oc = o;
        oc.init = MinimizeOptions::Init::Random;
        oc.tolerance = 1e-10;
        const auto s = minimize(p, oc);
        double dev = 0.0;
        for (double u : s.u) dev = std::max(dev, std::abs(u - s.u[0]));
        CHECK(dev <= 1e-5);
    }
    CHECK_THROWS_AS(droplet_search(0.5, 1.0, {2.0, 3.0}, 12, o), PreconditionError);
    CHECK_THROWS_AS(droplet_search(-1.0, 1.0, {3.0, 2.0}, 12, o), PreconditionError);
    // strongly attractive quartic: the participation ratio stabilizes
    const auto r = droplet_search(-20.0, 1.0, {2.0, 2.5, 3.0}, 40, o);
    CHECK(r.localized);
    const std::size_t m = r.participation.size();
    CHECK(std::abs(r.participation[m - 1] - r.participation[m - 2]) <=
          0.05 * r.participation[m - 1]);
    const double bound = interpolation_lower_bound(-20.0, 1.0);
    for (double e : r.energies) CHECK(e >= bound);
    CHECK(r.largest_box.min_energy_seen >= bound - 1e-9);
}

TEST_CASE("chemical potential identity mu = E + Q4 + 2 Q6") {
    GPProblem p;
    p.points = 16;
    p.b1 = 0.3;
    p.b2 = 0.9;
    MinimizeOptions o;
    o.tolerance = 1e-11;
    o.init = MinimizeOptions::Init::Random;
    o.seed = 12;
    const auto s = minimize(p, o);
    CHECK(s.mu == doctest::Approx(s.energy + s.breakdown.quartic + 2.0 * s.breakdown.quintic)
                      .epsilon(1e-10));
    GPSolution fake = s;
    fake.converged = false;
    CHECK_THROWS_AS(chemical_potential(fake, p), PreconditionError);
}
