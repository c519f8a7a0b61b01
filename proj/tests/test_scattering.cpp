#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bec3/scattering.hpp"
#include "oracles.hpp"

using namespace bec3;
using namespace bec3::potentials;
using namespace bec3::scattering;

TEST_CASE("zero potential gives f = 1 and b = 0") {
    const auto sol = solve_radial(make_zero(3), 4.0, 256);
    CHECK(sol.b == 0.0);
    for (double f : sol.f) CHECK(f == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("square well matches the closed form at fixed truncation") {
    const double v0 = 2.0, R = 1.0, rinf = 8.0;
    const auto sol = solve_radial(make_square_well(3, v0, R), rinf, 4096);
    const double exact_truncated = oracles::square_well_b3_truncated(v0, R, rinf);
    CHECK(sol.b == doctest::Approx(exact_truncated).epsilon(2e-5));
    // independent shooting oracle on the same truncated problem
    const double shoot = oracles::shooting_b(3, [&](double r) {
        return r < R ? v0 : (r == R ? 0.5 * v0 : 0.0);
    }, rinf);
    CHECK(sol.b == doctest::Approx(shoot).epsilon(5e-5));
}

TEST_CASE("truncation extrapolation recovers the infinite-volume closed form") {
    const double v0 = 2.0, R = 1.0;
    const auto sol = solve_radial_extrapolated(make_square_well(3, v0, R), {8.0, 16.0, 32.0}, 4096);
    REQUIRE(sol.b_extrapolated.has_value());
    const double exact = oracles::square_well_b3(v0, R);  // 8 pi (1 - tanh 1)
    CHECK(exact == doctest::Approx(8.0 * oracles::kPi * (1.0 - std::tanh(1.0))).epsilon(1e-15));
    CHECK(*sol.b_extrapolated == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("hard sphere constants") {
    CHECK(hard_sphere_b(3, 1.0) == doctest::Approx(8.0 * oracles::kPi).epsilon(1e-14));
    CHECK(hard_sphere_b(6, 1.0) == doctest::Approx(8.0 * std::pow(oracles::kPi, 3)).epsilon(1e-14));
    CHECK(hard_sphere_b(4, 0.0) == 0.0);
    CHECK(hard_sphere_b(6, 0.5) ==
          doctest::Approx(8.0 * std::pow(oracles::kPi, 3) * std::pow(0.5, 4)).epsilon(1e-14));
}

TEST_CASE("steep square wells approach the hard-sphere limit monotonically") {
    double prev = 0.0;
    for (double v0 : {1e2, 1e4, 1e6}) {
        const auto sol =
            solve_radial_extrapolated(make_square_well(3, v0, 1.0), {16.0, 32.0, 64.0}, 262144);
        CHECK(*sol.b_extrapolated > prev);
        prev = *sol.b_extrapolated;
    }
    CHECK(prev == doctest::Approx(hard_sphere_b(3, 1.0)).epsilon(1e-2));
}

TEST_CASE("monotonicity in the potential") {
    const auto lo = solve_radial(make_square_well(3, 1.0, 1.0), 16.0, 2048);
    const auto hi = solve_radial(make_square_well(3, 3.0, 1.0), 16.0, 2048);
    CHECK(lo.b < hi.b);
    const auto wider = solve_radial(make_square_well(3, 1.0, 1.2), 16.0, 2048);
    CHECK(lo.b < wider.b);
}

TEST_CASE("bound chain 0 <= b < int v and solution range") {
    for (const auto& v : {make_square_well(3, 2.0, 1.0), make_gaussian(3, 3.0, 0.4),
                          make_tabulated(3, {0.0, 0.5, 1.0}, {2.0, 1.5, 0.0})}) {
        const double rinf = 12.0 * std::max(v.support_radius, 1.0);
        const auto sol = solve_radial(v, rinf, 4096);
        CHECK(sol.b >= 0.0);
        CHECK(sol.b < sol.potential_integral);
        CHECK(sol.phi_min >= -1e-8);
        CHECK(sol.phi_max <= 1.0 + 1e-8);
    }
}

TEST_CASE("scaling covariance of b in d = 3 and d = 6") {
    // l^{d-2} b(l^2 v(l .)) = b(v)
    for (int d : {3, 6}) {
        const auto v = make_gaussian(d, 2.0, 0.5);
        const double rinf = 8.0 * v.support_radius;
        const auto base = solve_radial(v, rinf, 4096);
        for (double l : {0.5, 2.0}) {
            const auto vs = scaled(v, l);
            const auto s = solve_radial(vs, rinf / l, 4096);
            CHECK(std::pow(l, d - 2) * s.b == doctest::Approx(base.b).epsilon(1e-3));
        }
    }
}

TEST_CASE("radial discretization converges at second order") {
    const double v0 = 2.0, R = 1.0, rinf = 8.0;
    const double target = oracles::square_well_b3_truncated(v0, R, rinf);
    std::vector<double> hs, errs;
    for (long n : {256, 512, 1024}) {
        const auto sol = solve_radial(make_square_well(3, v0, R), rinf, n);
        hs.push_back(std::log(rinf / double(n)));
        errs.push_back(std::log(std::abs(sol.b - target)));
    }
    const auto fit = fit_line(hs, errs);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("extrapolation utility") {
    // constant samples: already converged
    const auto c = extrapolate_truncation({{4.0, 2.5}, {8.0, 2.5}, {16.0, 2.5}}, 3);
    CHECK(c.b_inf == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(std::abs(c.coefficient) < 1e-12);
    // synthetic exact model is recovered to machine precision
    const double binf = 1.75, coef = -0.3;
    std::vector<std::pair<double, double>> samples;
    for (double R : {3.0, 5.0, 9.0, 17.0}) samples.emplace_back(R, binf + coef / R);
    const auto e = extrapolate_truncation(samples, 3);
    CHECK(e.b_inf == doctest::Approx(binf).epsilon(1e-12));
    CHECK(e.coefficient == doctest::Approx(coef).epsilon(1e-12));
    CHECK(e.fit_residual < 1e-12);
    // degenerate abscissas
    CHECK_THROWS_AS(extrapolate_truncation({{4.0, 1.0}, {4.0, 1.1}, {8.0, 1.2}}, 3),
                    PreconditionError);
    CHECK_THROWS_AS(extrapolate_truncation({{4.0, 1.0}, {8.0, 1.1}}, 3), PreconditionError);
}

TEST_CASE("radial preconditions") {
    CHECK_THROWS_AS(solve_radial(make_square_well(3, 1.0, 2.0), 1.5, 256), PreconditionError);
    CHECK_THROWS_AS(solve_radial(make_square_well(3, 1.0, 1.0), 8.0, 4), PreconditionError);
}

TEST_CASE("3D grid: zero potential and memory refusal") {
    GridOptions opts;
    opts.points = 16;
    opts.half_width = 2.0;
    const auto z = solve_grid_3d(make_zero(3), opts);
    CHECK(z.b == 0.0);
    CHECK(z.phi_max == 0.0);

    GridOptions tiny = opts;
    tiny.points = 64;
    tiny.memory_cap_gb = 1e-5;
    CHECK_THROWS_AS(solve_grid_3d(make_square_well(3, 1.0, 1.0), tiny), SolverError);
}

TEST_CASE("3D grid square well agrees with the radial solver") {
    const double v0 = 2.0, R = 1.0;
    GridOptions opts;
    opts.points = 64;
    opts.half_width = 8.0 * R;
    opts.cg_tol = 1e-10;
    const auto g = solve_grid_3d(make_square_well(3, v0, R), opts);
    const auto r = solve_radial(make_square_well(3, v0, R), 8.0 * R, 4096);
    CHECK(g.b == doctest::Approx(r.b).epsilon(0.02));
    CHECK(g.b < g.potential_integral);
    CHECK(g.phi_min >= -1e-8);
    CHECK(g.phi_max <= 1.0 + 1e-8);
    // the functional value and the profile integral of v f agree at the minimizer
    CHECK(g.b == doctest::Approx(g.b_profile_integral).epsilon(1e-7));
}

TEST_CASE("6D: change of variables vs direct anisotropic stencil") {
    const MetricM m = make_metric_M();
    const auto w = make_gaussian(6, 4.0, 1.0 / 3.0, 3.0);  // support radius 1
    const auto v = make_isotropic_after_M(w, m);
    GridOptions opts;
    opts.points = 12;
    opts.margin = 1.05;
    opts.cg_tol = 1e-8;
    const auto direct = b_modified(v, ModifiedMethod::Direct, m, opts);
    const auto cov = b_modified(v, ModifiedMethod::ChangeOfVariables, m, opts);
    CHECK(direct.b == doctest::Approx(cov.b).epsilon(0.05));
    // radial change-of-variables reference on the same truncation scale
    const auto rad = b_modified_radial(v, m, 8.0, 4096);
    CHECK(direct.b == doctest::Approx(rad.b).epsilon(0.10));
    CHECK(direct.b < direct.potential_integral);
}

TEST_CASE("6D: identity metric reduces to the plain grid solve") {
    const auto w = make_gaussian(6, 2.0, 1.0 / 3.0, 3.0);
    const auto v = make_isotropic_after_M(w, identity_metric());
    GridOptions opts;
    opts.points = 10;
    opts.margin = 1.05;
    opts.cg_tol = 1e-9;
    const auto plain = solve_grid_6d(v, identity_metric(), opts);
    const auto mod = b_modified(v, ModifiedMethod::Direct, identity_metric(), opts);
    CHECK(plain.b == doctest::Approx(mod.b).epsilon(1e-12));
}
