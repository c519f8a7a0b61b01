#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bec3/gp.hpp"
#include "bec3/potentials.hpp"
#include "bec3/scattering.hpp"

namespace bec3::config {

enum class Command { Scatter, Gp, Bogoliubov, Expand, Verify };

struct OutputSpec {
    std::string directory = "out";
    bool csv = true, json = true, svg = false;
    std::uint64_t seed = 12345;
    int workers = 2;
};

struct PotentialSpec {
    enum class Kind { Radial, ProductTriplet, IsotropicAfterM } kind = Kind::Radial;
    int d = 3;
    potentials::RadialFamily family = potentials::RadialFamily::SquareWell;
    double v0 = 1.0;
    double radius = 1.0;
    double amplitude = 1.0;
    double width = 0.25;
    double truncation_widths = 6.0;
    std::string profile_file;

    potentials::RadialPotential build_profile(int dim) const;
    potentials::Potential6D build_6d() const;
};

struct ScatterSpec {
    enum class Method { Radial, Grid, ChangeOfVariables, Direct } method = Method::Radial;
    std::vector<double> r_inf;  // truncation ladder for the radial path
    long nodes = 4096;          // at the smallest truncation radius
    bool extrapolate = true;
    scattering::GridOptions grid;
};

struct ProblemSpec {
    gp::GPProblem problem;
    std::string trap_file;
};

struct BogoliubovSpec {
    int k = 8;
    std::string method = "auto";  // auto | dense | iterative | analytic
};

struct ExpandSpec {
    double rho_min = 1e-4, rho_max = 1e-1;
    int count = 25;
    bool log_scale = true;
    double a = 0.0;
    double b_m = 0.0;
    int order = 2;
    std::optional<double> c2_tl, c2_gp, n_particles, e_gp;
};

struct RunConfig {
    Command command = Command::Verify;
    OutputSpec output;
    PotentialSpec potential;
    ScatterSpec scatter;
    ProblemSpec problem;
    gp::MinimizeOptions minimize;
    BogoliubovSpec bogoliubov;
    ExpandSpec expand;
};

/// Parses and fully validates the nested key-value config format; unknown
/// keys are rejected with their location.
RunConfig load_config(const std::string& path);
RunConfig load_config_text(const std::string& text, const std::string& origin = "<inline>");

std::string command_name(Command c);

}  // namespace bec3::config
