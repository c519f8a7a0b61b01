#include "bec3/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace bec3::config {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    int col = 0;
    mutable bool used = false;
};

struct RawConfig {
    std::string origin;
    std::map<std::string, Entry> entries;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        auto it = entries.find(key);
        std::ostringstream os;
        os << origin;
        if (it != entries.end()) os << ":" << it->second.line << ":" << it->second.col;
        os << ": " << key << ": " << msg;
        throw ConfigError(os.str());
    }

    bool has(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) return false;
        it->second.used = true;
        return true;
    }
    std::string str(const std::string& key, const std::string& dflt) const {
        auto it = entries.find(key);
        if (it == entries.end()) return dflt;
        it->second.used = true;
        return it->second.value;
    }
    double num(const std::string& key, double dflt) const {
        auto it = entries.find(key);
        if (it == entries.end()) return dflt;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const double x = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + it->second.value + "'");
        }
    }
    long integer(const std::string& key, long dflt) const {
        const double x = num(key, double(dflt));
        if (x != std::floor(x)) fail(key, "expected an integer");
        return long(x);
    }
    bool boolean(const std::string& key, bool dflt) const {
        auto it = entries.find(key);
        if (it == entries.end()) return dflt;
        it->second.used = true;
        if (it->second.value == "true") return true;
        if (it->second.value == "false") return false;
        fail(key, "expected true or false");
    }
    std::vector<double> list(const std::string& key, std::vector<double> dflt) const {
        auto it = entries.find(key);
        if (it == entries.end()) return dflt;
        it->second.used = true;
        std::vector<double> out;
        std::stringstream ss(it->second.value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                fail(key, "expected a comma-separated list of numbers");
            }
        }
        if (out.empty()) fail(key, "expected a non-empty list");
        return out;
    }

    void reject_unknown() const {
        const Entry* first = nullptr;
        std::string first_key;
        for (const auto& [key, e] : entries) {
            if (e.used) continue;
            if (!first || e.line < first->line) {
                first = &e;
                first_key = key;
            }
        }
        if (first) {
            std::ostringstream os;
            os << origin << ":" << first->line << ":" << first->col << ": unknown key '"
               << first_key << "'";
            throw ConfigError(os.str());
        }
    }
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

RawConfig parse_raw(const std::string& text, const std::string& origin) {
    RawConfig raw;
    raw.origin = origin;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ":1: unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ":1: empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ":1: expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ":1: empty key");
        int col = 1;
        for (std::size_t i = 0; i < line.size(); ++i)
            if (!std::isspace((unsigned char)line[i])) { col = int(i) + 1; break; }
        const std::string full = section.empty() ? key : section + "." + key;
        auto [it, inserted] = raw.entries.emplace(full, Entry{value, lineno, col});
        if (!inserted)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ":" + std::to_string(col) +
                              ": duplicate key '" + full + "' (first at line " +
                              std::to_string(it->second.line) + ")");
    }
    return raw;
}

std::pair<std::vector<double>, std::vector<double>> load_two_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file: " + path);
    std::vector<double> r, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::istringstream ls(t);
        double a = 0.0, b = 0.0;
        if (!(ls >> a >> b))
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected two numeric columns (radius, value)");
        r.push_back(a);
        v.push_back(b);
    }
    return {std::move(r), std::move(v)};
}

}  // namespace

potentials::RadialPotential PotentialSpec::build_profile(int dim) const {
    using namespace potentials;
    switch (family) {
        case RadialFamily::Zero:
            return make_zero(dim);
        case RadialFamily::SquareWell:
            return make_square_well(dim, v0, radius);
        case RadialFamily::Gaussian:
            return make_gaussian(dim, amplitude, width, truncation_widths);
        case RadialFamily::Tabulated: {
            auto [r, vv] = load_two_column(profile_file);
            return make_tabulated(dim, std::move(r), std::move(vv));
        }
    }
    throw ConfigError("potential.family: unknown family");
}

potentials::Potential6D PotentialSpec::build_6d() const {
    using namespace potentials;
    switch (kind) {
        case Kind::Radial:
            throw ConfigError("potential.kind: a 6D family is required for this command");
        case Kind::ProductTriplet:
            return make_product_triplet(build_profile(3));
        case Kind::IsotropicAfterM:
            return make_isotropic_after_M(build_profile(6), make_metric_M());
    }
    throw ConfigError("potential.kind: unknown kind");
}

std::string command_name(Command c) {
    switch (c) {
        case Command::Scatter: return "scatter";
        case Command::Gp: return "gp";
        case Command::Bogoliubov: return "bogoliubov";
        case Command::Expand: return "expand";
        case Command::Verify: return "verify";
    }
    return "?";
}

RunConfig load_config_text(const std::string& text, const std::string& origin) {
    RawConfig raw = parse_raw(text, origin);
    RunConfig cfg;

    const std::string cmd = raw.str("command", "");
    if (cmd == "scatter") cfg.command = Command::Scatter;
    else if (cmd == "gp") cfg.command = Command::Gp;
    else if (cmd == "bogoliubov") cfg.command = Command::Bogoliubov;
    else if (cmd == "expand") cfg.command = Command::Expand;
    else if (cmd == "verify") cfg.command = Command::Verify;
    else if (cmd.empty()) throw ConfigError(origin + ": missing top-level 'command'");
    else raw.fail("command", "unknown command '" + cmd + "'");

    cfg.output.directory = raw.str("output.directory", cfg.output.directory);
    if (raw.has("output.formats")) {
        cfg.output.csv = cfg.output.json = cfg.output.svg = false;
        std::stringstream ss(raw.str("output.formats", ""));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok == "csv") cfg.output.csv = true;
            else if (tok == "json") cfg.output.json = true;
            else if (tok == "svg") cfg.output.svg = true;
            else raw.fail("output.formats", "unknown format '" + tok + "'");
        }
    }
    cfg.output.seed = std::uint64_t(raw.integer("output.seed", long(cfg.output.seed)));
    cfg.output.workers = int(raw.integer("output.workers", cfg.output.workers));
    if (cfg.output.workers < 1) raw.fail("output.workers", "must be >= 1");

    const bool needs_potential =
        cfg.command == Command::Scatter;
    if (needs_potential || raw.has("potential.kind")) {
        const std::string kind = raw.str("potential.kind", "radial");
        if (kind == "radial") cfg.potential.kind = PotentialSpec::Kind::Radial;
        else if (kind == "product_triplet") cfg.potential.kind = PotentialSpec::Kind::ProductTriplet;
        else if (kind == "isotropic_after_m") cfg.potential.kind = PotentialSpec::Kind::IsotropicAfterM;
        else raw.fail("potential.kind", "unknown kind '" + kind + "'");
        cfg.potential.d = int(raw.integer("potential.d", 3));
        if (cfg.potential.d < 3) raw.fail("potential.d", "must be >= 3");
        const std::string fam = raw.str("potential.family", "square_well");
        if (fam == "zero") cfg.potential.family = potentials::RadialFamily::Zero;
        else if (fam == "square_well") cfg.potential.family = potentials::RadialFamily::SquareWell;
        else if (fam == "gaussian") cfg.potential.family = potentials::RadialFamily::Gaussian;
        else if (fam == "tabulated") cfg.potential.family = potentials::RadialFamily::Tabulated;
        else raw.fail("potential.family", "unknown family '" + fam + "'");
        cfg.potential.v0 = raw.num("potential.v0", cfg.potential.v0);
        if (cfg.potential.v0 < 0.0) raw.fail("potential.v0", "must be >= 0");
        cfg.potential.radius = raw.num("potential.radius", cfg.potential.radius);
        if (cfg.potential.radius <= 0.0) raw.fail("potential.radius", "must be > 0");
        cfg.potential.amplitude = raw.num("potential.amplitude", cfg.potential.amplitude);
        if (cfg.potential.amplitude < 0.0) raw.fail("potential.amplitude", "must be >= 0");
        cfg.potential.width = raw.num("potential.width", cfg.potential.width);
        if (cfg.potential.width <= 0.0) raw.fail("potential.width", "must be > 0");
        cfg.potential.truncation_widths =
            raw.num("potential.truncation_widths", cfg.potential.truncation_widths);
        if (cfg.potential.truncation_widths <= 0.0)
            raw.fail("potential.truncation_widths", "must be > 0");
        cfg.potential.profile_file = raw.str("potential.profile_file", "");
        if (cfg.potential.family == potentials::RadialFamily::Tabulated &&
            cfg.potential.profile_file.empty())
            raw.fail("potential.profile_file", "required for the tabulated family");
    }

    if (cfg.command == Command::Scatter) {
        const std::string m = raw.str("scatter.method", "radial");
        if (m == "radial") cfg.scatter.method = ScatterSpec::Method::Radial;
        else if (m == "grid") cfg.scatter.method = ScatterSpec::Method::Grid;
        else if (m == "cov") cfg.scatter.method = ScatterSpec::Method::ChangeOfVariables;
        else if (m == "direct") cfg.scatter.method = ScatterSpec::Method::Direct;
        else raw.fail("scatter.method", "unknown method '" + m + "'");
        cfg.scatter.r_inf = raw.list("scatter.r_inf", {});
        cfg.scatter.nodes = raw.integer("scatter.nodes", cfg.scatter.nodes);
        if (cfg.scatter.nodes < 8) raw.fail("scatter.nodes", "must be >= 8");
        cfg.scatter.extrapolate = raw.boolean("scatter.extrapolate", cfg.scatter.extrapolate);
        cfg.scatter.grid.points = int(raw.integer("grid.points", cfg.scatter.grid.points));
        cfg.scatter.grid.half_width = raw.num("grid.half_width", cfg.scatter.grid.half_width);
        cfg.scatter.grid.margin = raw.num("grid.margin", cfg.scatter.grid.margin);
        cfg.scatter.grid.cg_tol = raw.num("grid.cg_tol", cfg.scatter.grid.cg_tol);
        cfg.scatter.grid.max_iterations =
            raw.integer("grid.max_iterations", cfg.scatter.grid.max_iterations);
        cfg.scatter.grid.memory_cap_gb = raw.num("grid.memory_cap_gb", cfg.scatter.grid.memory_cap_gb);
        cfg.scatter.grid.store_profile = raw.boolean("grid.store_profile", false);
        const bool radial_like = cfg.scatter.method == ScatterSpec::Method::Radial;
        if (radial_like && cfg.scatter.r_inf.empty())
            raw.fail("scatter.r_inf", "required for the radial method");
        if (radial_like && cfg.potential.kind != PotentialSpec::Kind::Radial)
            raw.fail("scatter.method", "the radial method needs potential.kind = radial");
        if (!radial_like && cfg.scatter.method != ScatterSpec::Method::Grid &&
            cfg.potential.kind == PotentialSpec::Kind::Radial)
            raw.fail("scatter.method", "cov/direct methods need a 6D potential kind");
    }

    if (cfg.command == Command::Gp || cfg.command == Command::Bogoliubov) {
        auto& p = cfg.problem.problem;
        const std::string bnd = raw.str("problem.boundary", "periodic");
        if (bnd == "periodic") p.boundary = gp::Boundary::Periodic;
        else if (bnd == "dirichlet") p.boundary = gp::Boundary::Dirichlet;
        else raw.fail("problem.boundary", "unknown boundary '" + bnd + "'");
        p.box_side = raw.num("problem.box_side", 1.0);
        p.points = int(raw.integer("problem.points", 32));
        p.b1 = raw.num("problem.b1", 0.0);
        p.b2 = raw.num("problem.b2", 0.0);
        const std::string trap = raw.str("problem.trap", "none");
        if (trap == "none") p.trap.kind = gp::TrapKind::None;
        else if (trap == "power") p.trap.kind = gp::TrapKind::Power;
        else if (trap == "tabulated") p.trap.kind = gp::TrapKind::Tabulated;
        else raw.fail("problem.trap", "unknown trap '" + trap + "'");
        p.trap.strength = raw.num("problem.trap_c", 1.0);
        p.trap.exponent = raw.num("problem.trap_alpha", 2.0);
        cfg.problem.trap_file = raw.str("problem.trap_file", "");
        if (p.trap.kind == gp::TrapKind::Tabulated) {
            if (cfg.problem.trap_file.empty())
                raw.fail("problem.trap_file", "required for the tabulated trap");
            auto [r, vv] = load_two_column(cfg.problem.trap_file);
            p.trap.radii = std::move(r);
            p.trap.values = std::move(vv);
        }
        try {
            p.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ": [problem] " + e.what());
        }
        cfg.minimize.step = raw.num("minimize.step", 0.0);
        cfg.minimize.max_iterations = raw.integer("minimize.max_iterations", cfg.minimize.max_iterations);
        cfg.minimize.tolerance = raw.num("minimize.tolerance", cfg.minimize.tolerance);
        cfg.minimize.restarts = int(raw.integer("minimize.restarts", 1));
        if (cfg.minimize.restarts < 1) raw.fail("minimize.restarts", "must be >= 1");
        const std::string init = raw.str("minimize.init", "constant");
        if (init == "constant") cfg.minimize.init = gp::MinimizeOptions::Init::Constant;
        else if (init == "gaussian") cfg.minimize.init = gp::MinimizeOptions::Init::Gaussian;
        else if (init == "random") cfg.minimize.init = gp::MinimizeOptions::Init::Random;
        else raw.fail("minimize.init", "unknown init '" + init + "'");
        cfg.minimize.gaussian_width = raw.num("minimize.gaussian_width", 1.0);
        cfg.minimize.record_trace = raw.boolean("minimize.record_trace", true);
        cfg.minimize.seed = cfg.output.seed;
        cfg.minimize.workers = cfg.output.workers;
    }

    if (cfg.command == Command::Bogoliubov) {
        cfg.bogoliubov.k = int(raw.integer("bogoliubov.k", 8));
        if (cfg.bogoliubov.k < 1) raw.fail("bogoliubov.k", "must be >= 1");
        cfg.bogoliubov.method = raw.str("bogoliubov.method", "auto");
        if (cfg.bogoliubov.method != "auto" && cfg.bogoliubov.method != "dense" &&
            cfg.bogoliubov.method != "iterative" && cfg.bogoliubov.method != "analytic")
            raw.fail("bogoliubov.method", "unknown method '" + cfg.bogoliubov.method + "'");
    }

    if (cfg.command == Command::Expand) {
        cfg.expand.rho_min = raw.num("expand.rho_min", cfg.expand.rho_min);
        cfg.expand.rho_max = raw.num("expand.rho_max", cfg.expand.rho_max);
        cfg.expand.count = int(raw.integer("expand.rho_count", cfg.expand.count));
        if (cfg.expand.count < 1) raw.fail("expand.rho_count", "must be >= 1");
        if (!(cfg.expand.rho_min > 0.0) || cfg.expand.rho_max < cfg.expand.rho_min)
            raw.fail("expand.rho_min", "need 0 < rho_min <= rho_max");
        const std::string sc = raw.str("expand.rho_scale", "log");
        if (sc == "log") cfg.expand.log_scale = true;
        else if (sc == "linear") cfg.expand.log_scale = false;
        else raw.fail("expand.rho_scale", "expected log or linear");
        cfg.expand.a = raw.num("expand.a", 0.0);
        cfg.expand.b_m = raw.num("expand.b_m", 0.0);
        if (!(cfg.expand.a > 0.0)) raw.fail("expand.a", "must be > 0");
        if (!(cfg.expand.b_m > 0.0)) raw.fail("expand.b_m", "must be > 0");
        cfg.expand.order = int(raw.integer("expand.order", 2));
        if (cfg.expand.order < 0 || cfg.expand.order > 2)
            raw.fail("expand.order", "must be 0, 1 or 2");
        if (raw.has("expand.c2_tl")) cfg.expand.c2_tl = raw.num("expand.c2_tl", 0.0);
        if (raw.has("expand.c2_gp")) cfg.expand.c2_gp = raw.num("expand.c2_gp", 0.0);
        if (raw.has("expand.n_particles")) cfg.expand.n_particles = raw.num("expand.n_particles", 0.0);
        if (raw.has("expand.e_gp")) cfg.expand.e_gp = raw.num("expand.e_gp", 0.0);
    }

    raw.reject_unknown();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str(), path);
}

}  // namespace bec3::config
