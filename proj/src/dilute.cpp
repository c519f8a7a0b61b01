#include "bec3/dilute.hpp"

#include <cmath>

namespace bec3::dilute {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

LeadingOrder e3b_leading(double rho, double b_m) {
    if (rho < 0.0 || b_m < 0.0)
        throw PreconditionError("e3b_leading: rho and b_m must be >= 0");
    LeadingOrder r;
    r.energy_density = b_m * rho * rho * rho / 6.0;
    r.diluteness = rho * std::pow(b_m, 0.75);
    return r;
}

GpLength gp_length(double rho, double b_m) {
    if (!(rho > 0.0) || !(b_m > 0.0))
        throw PreconditionError("gp_length: rho and b_m must be > 0");
    GpLength g;
    g.value = 1.0 / (rho * std::sqrt(b_m));
    const double a = std::pow(b_m, 0.25);
    g.via_scattering = a / (rho * a * a * a);
    return g;
}

LhyExpansion e2b_lhy(double rho, double a, int order) {
    if (a < 0.0) throw PreconditionError("e2b_lhy: a must be >= 0");
    if (rho < 0.0) throw PreconditionError("e2b_lhy: rho must be >= 0");
    if (order < 0 || order > 2) throw PreconditionError("e2b_lhy: order must be in {0,1,2}");
    LhyExpansion ex;
    const double x = rho * a * a * a;
    ex.gas_parameter = x;
    ex.dilute = x < 1.0;
    const double lead_coef = 4.0 * kPi;
    const double lead = lead_coef * a * rho * rho;
    ex.terms.push_back({"leading", lead_coef, lead});
    ex.energy_density = lead;
    const double c1 = 128.0 / (15.0 * std::sqrt(kPi));
    if (order >= 1) {
        const double t1 = lead * c1 * std::sqrt(x);
        ex.terms.push_back({"lhy_sqrt", c1, t1});
        ex.energy_density += t1;
    }
    const double c2 = 8.0 * (4.0 * kPi / 3.0 - std::sqrt(3.0));
    if (order >= 2) {
        const double t2 = x > 0.0 ? lead * c2 * x * std::log(x) : 0.0;
        ex.terms.push_back({"log", c2, t2});
        ex.energy_density += t2;
    }
    return ex;
}

Crossover crossover_density(double a, double b_m) {
    if (!(a > 0.0) || !(b_m > 0.0))
        throw PreconditionError("crossover_density: a and b_m must be > 0");
    Crossover c;
    c.rho_star = 24.0 * kPi * a / b_m;
    c.dilute_two_body = c.rho_star * a * a * a < 1.0;
    c.dilute_three_body = c.rho_star * std::pow(b_m, 0.75) < 1.0;
    return c;
}

double mean_field_energy(double n, double l, double int_v) {
    if (!(n > 0.0) || !(l > 0.0)) throw PreconditionError("mean_field_energy: n, l must be > 0");
    if (int_v < 0.0) throw PreconditionError("mean_field_energy: intV must be >= 0");
    return n * n * n / (6.0 * l * l * l * l) * int_v;
}

double renormalization_shift(double n, double l, double b_m, double int_v) {
    if (!(n > 0.0) || !(l > 0.0))
        throw PreconditionError("renormalization_shift: n, l must be > 0");
    return n * n * n / (6.0 * l * l * l * l) * (b_m - int_v);
}

ConjecturedOrders conjectured_orders(const ExpansionQuery& q) {
    if (!q.b_m) throw PreconditionError("conjectured_orders: b_m is required");
    if (!q.c2_tl)
        throw PreconditionError("conjectured_orders: the constant C2_TL must be supplied");
    ConjecturedOrders out;
    const double b = *q.b_m;
    out.tl_second_order = b * q.rho * q.rho * q.rho / 6.0 * (1.0 + *q.c2_tl * q.rho);
    if (q.n_particles && q.e_gp) {
        if (!q.c2_gp)
            throw PreconditionError("conjectured_orders: the constant C2_GP must be supplied");
        out.gp_second_order = *q.n_particles * *q.e_gp + std::sqrt(*q.n_particles) * *q.c2_gp;
    }
    out.quartic_scale = std::pow(q.rho, 4) * std::pow(b, 1.75);
    // the ratio to the leading scale rho^3 b_m is exactly the diluteness Y
    out.scale_ratio = q.rho * std::pow(b, 0.75);
    return out;
}

}  // namespace bec3::dilute
