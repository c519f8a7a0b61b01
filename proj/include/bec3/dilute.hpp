#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bec3/util.hpp"

namespace bec3::dilute {

struct ExpansionQuery {
    double rho = 0.0;
    std::optional<double> a;        // two-body scattering length
    std::optional<double> b_m;      // three-body scattering energy
    int order = 2;
    std::optional<double> c2_tl;    // conjectural constants; never defaulted
    std::optional<double> c2_gp;
    std::optional<double> n_particles;
    std::optional<double> e_gp;
};

struct LeadingOrder {
    double energy_density = 0.0;  // (1/6) b_m rho^3
    double diluteness = 0.0;      // Y = rho b_m^{3/4}
};

/// Leading three-body energy density (1/6) b_M rho^3 with Y as metadata.
LeadingOrder e3b_leading(double rho, double b_m);

struct GpLength {
    double value = 0.0;            // 1 / (rho sqrt(b_m))
    double via_scattering = 0.0;   // a / (rho a^3) with a = b_m^{1/4}
};

GpLength gp_length(double rho, double b_m);

struct LhyTerm {
    std::string name;
    double coefficient = 0.0;  // the universal prefactor
    double value = 0.0;        // contribution to the energy density
};

struct LhyExpansion {
    double energy_density = 0.0;  // partial sum through the requested order
    std::vector<LhyTerm> terms;
    double gas_parameter = 0.0;   // rho a^3
    bool dilute = true;           // rho a^3 < 1
};

/// Two-body expansion 4 pi a rho^2 (1 + c1 sqrt(rho a^3) + c2 rho a^3 log(rho a^3)),
/// c1 = 128/(15 sqrt(pi)), c2 = 8 (4 pi/3 - sqrt(3)); order in {0,1,2}.
LhyExpansion e2b_lhy(double rho, double a, int order);

struct Crossover {
    double rho_star = 0.0;    // 24 pi a / b_m
    bool dilute_two_body = false;    // rho* a^3 < 1
    bool dilute_three_body = false;  // rho* b_m^{3/4} < 1
};

/// Density where the two-body and three-body leading terms coincide.
Crossover crossover_density(double a, double b_m);

/// (1/6) n^3 l^{-4} intV.
double mean_field_energy(double n, double l, double int_v);

/// (1/6) n^3 l^{-4} (b_m - intV).
double renormalization_shift(double n, double l, double b_m, double int_v);

struct ConjecturedOrders {
    double tl_second_order = 0.0;       // (1/6) rho^3 b_m (1 + C_TL rho)
    std::optional<double> gp_second_order;  // N e_GP + sqrt(N) C_GP
    double quartic_scale = 0.0;         // rho^4 b_m^{7/4}
    double scale_ratio = 0.0;           // quartic_scale / leading = Y
    bool conjectural = true;            // user-supplied constants throughout
};

/// Conjectural second-order forms; constants must be supplied by the caller.
ConjecturedOrders conjectured_orders(const ExpansionQuery& q);

}  // namespace bec3::dilute
