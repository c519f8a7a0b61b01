#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "bec3/potentials.hpp"

using namespace bec3;
using namespace bec3::potentials;

TEST_CASE("metric entries and square") {
    const MetricM m = make_metric_M();
    const double s3 = std::sqrt(3.0), s8 = 2.0 * std::sqrt(2.0);
    CHECK(m.diag == doctest::Approx((s3 + 1.0) / s8).epsilon(1e-15));
    CHECK(m.off == doctest::Approx((s3 - 1.0) / s8).epsilon(1e-15));
    // M*M must be (1/2) [[2,1],[1,2]] blockwise
    const double q11 = m.diag * m.diag + m.off * m.off;
    const double q12 = 2.0 * m.diag * m.off;
    CHECK(std::abs(q11 - 1.0) < 1e-14);
    CHECK(std::abs(q12 - 0.5) < 1e-14);
}

TEST_CASE("metric determinant matches the assembled 6x6 matrix") {
    const MetricM m = make_metric_M();
    Eigen::MatrixXd M6 = Eigen::MatrixXd::Zero(6, 6);
    for (int a = 0; a < 3; ++a) {
        M6(a, a) = m.diag;
        M6(a + 3, a + 3) = m.diag;
        M6(a, a + 3) = m.off;
        M6(a + 3, a) = m.off;
    }
    const double det_oracle = M6.determinant();
    CHECK(m.det6() == doctest::Approx(det_oracle).epsilon(1e-13));
    CHECK(m.det6() == doctest::Approx(0.64951905283832898507).epsilon(1e-14));
    // idempotent construction
    const MetricM m2 = make_metric_M();
    CHECK(m.diag == m2.diag);
    CHECK(m.off == m2.off);
    // eigenvalues of M are sqrt(3/2) and sqrt(1/2)
    CHECK(m.eig_max() == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
    CHECK(m.eig_min() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("radial families: positivity and support on seeded samples") {
    Rng rng(77);
    const auto sw = make_square_well(3, 2.0, 1.0);
    const auto g = make_gaussian(3, 1.5, 0.3);
    const auto tab = make_tabulated(3, {0.0, 0.5, 1.0}, {2.0, 1.0, 0.0});
    for (const auto& v : {sw, g, tab}) {
        for (int i = 0; i < 10000; ++i) {
            const double r = rng.uniform(0.0, 3.0 * std::max(v.support_radius, 1.0));
            const double val = v(r);
            CHECK(val >= 0.0);
            if (r > v.support_radius) CHECK(val == 0.0);
        }
    }
}

TEST_CASE("radial construction validates inputs") {
    CHECK_THROWS_AS(make_square_well(3, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(make_gaussian(3, 1.0, -0.5), ConfigError);
    CHECK_THROWS_AS(make_tabulated(3, {0.0, 0.0}, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(make_tabulated(3, {0.0, 1.0}, {1.0, -1.0}), ConfigError);
    CHECK_THROWS_AS(make_zero(2), PreconditionError);
}

TEST_CASE("product triplet passes the symmetry check for every profile") {
    for (const auto& h : {make_gaussian(3, 2.0, 0.3), make_square_well(3, 1.0, 0.5),
                          make_tabulated(3, {0.0, 0.4, 0.8}, {1.0, 0.5, 0.0})}) {
        const auto v = make_product_triplet(h);
        const auto rep = check_three_body_symmetry(v, 3000, 1e-12, 99);
        CHECK(rep.passed);
        CHECK(rep.max_violation <= 1e-12);
    }
}

TEST_CASE("isotropic-after-M potential satisfies the permutation symmetry") {
    const auto v = make_isotropic_after_M(make_gaussian(6, 1.0, 0.4), make_metric_M());
    const auto rep = check_three_body_symmetry(v, 3000, 1e-12, 5);
    CHECK(rep.passed);
}

TEST_CASE("asymmetric potential is flagged at the first sample") {
    const auto v = make_custom(
        [](const Vec3& x, const Vec3&) {
            return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        },
        2.0);
    const auto rep = check_three_body_symmetry(v, 50, 1e-8, 3);
    CHECK_FALSE(rep.passed);
    CHECK(rep.first_violation == 0);
    const auto stamped = with_symmetry_certificate(v, 50, 1e-8, 3);
    CHECK(stamped.certificate == SymmetryCertificate::Violated);
}

TEST_CASE("zero potential passes with zero violation") {
    const auto v = make_custom([](const Vec3&, const Vec3&) { return 0.0; }, 1.0);
    const auto rep = check_three_body_symmetry(v, 100, 1e-12, 7);
    CHECK(rep.passed);
    CHECK(rep.max_violation == 0.0);
}

TEST_CASE("negative evaluator is rejected") {
    const auto v = make_custom([](const Vec3&, const Vec3&) { return -1.0; }, 1.0);
    CHECK_THROWS_AS(check_three_body_symmetry(v, 10, 1e-8, 1), PreconditionError);
}

TEST_CASE("transform by identity is pointwise equal") {
    const auto v = make_product_triplet(make_gaussian(3, 1.0, 0.3));
    const auto w = transform_by_metric(v, identity_metric());
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Vec3 a{rng.normal() * 0.3, rng.normal() * 0.3, rng.normal() * 0.3};
        const Vec3 b{rng.normal() * 0.3, rng.normal() * 0.3, rng.normal() * 0.3};
        CHECK(w(a, b) == doctest::Approx(v(a, b)).epsilon(1e-15));
    }
}

TEST_CASE("transform by metric rescales the support and samples eigendirections") {
    const MetricM m = make_metric_M();
    // isotropic 6D potential w(|(x,y)|): tabulated linear ramp
    const auto w6 = make_tabulated(6, {0.0, 2.0}, {1.0, 0.0});
    const auto v = make_isotropic_after_M(w6, identity_metric());  // plain w(|.|)
    REQUIRE(v.support_radius == doctest::Approx(2.0));
    const auto t = transform_by_metric(v, m);
    CHECK(t.support_radius == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    // along the (e,e)/sqrt(2) eigendirection M scales by sqrt(3/2)
    auto ramp = [&](double r) { return r < 2.0 ? 1.0 - r / 2.0 : 0.0; };
    for (double r : {0.3, 0.8, 1.2}) {
        const double c = r / std::sqrt(2.0);
        const Vec3 x{c, 0.0, 0.0};
        CHECK(t(x, x) == doctest::Approx(ramp(std::sqrt(1.5) * r)).epsilon(1e-12));
        const Vec3 y{-c, 0.0, 0.0};
        CHECK(t(x, y) == doctest::Approx(ramp(std::sqrt(0.5) * r)).epsilon(1e-12));
    }
}

TEST_CASE("tabulated 6D grid interpolates and validates") {
    auto table = std::make_shared<TabulatedGrid6D>();
    table->points_per_axis = 3;
    table->half_width = 1.0;
    table->values.assign(729, 2.0);
    const auto v = make_tabulated_grid(table);
    CHECK(v({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(v({0.3, -0.2, 0.1}, {0.0, 0.4, -0.5}) == doctest::Approx(2.0));
    CHECK(v({2.0, 0.0, 0.0}, {0.0, 0.0, 0.0}) == 0.0);
    auto bad = std::make_shared<TabulatedGrid6D>(*table);
    bad->values[3] = -1.0;
    CHECK_THROWS_AS(make_tabulated_grid(bad), ConfigError);
}
