#include "bec3/gp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <mutex>
#include <sstream>

namespace bec3::gp {

namespace {
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
constexpr std::size_t kChunk = 4096;
}  // namespace

double Trap::operator()(double r) const {
    switch (kind) {
        case TrapKind::None:
            return 0.0;
        case TrapKind::Power:
            return strength * std::pow(r, exponent);
        case TrapKind::Tabulated: {
            if (radii.empty()) return 0.0;
            if (r <= radii.front()) return values.front();
            if (r >= radii.back()) return values.back();
            auto it = std::upper_bound(radii.begin(), radii.end(), r);
            const std::size_t j = std::size_t(it - radii.begin());
            const double t = (r - radii[j - 1]) / (radii[j] - radii[j - 1]);
            return values[j - 1] + t * (values[j] - values[j - 1]);
        }
    }
    return 0.0;
}

void GPProblem::validate() const {
    if (points < 4) throw ConfigError("gp problem: need at least 4 points per axis");
    if (box_side <= 0.0) throw ConfigError("gp problem: box_side must be > 0");
    if (b2 < 0.0) throw ConfigError("gp problem: b2 must be >= 0");
    if (trap.kind == TrapKind::Power) {
        if (trap.strength <= 0.0) throw ConfigError("gp problem: trap strength C must be > 0");
        if (trap.exponent <= 0.0) throw ConfigError("gp problem: trap exponent alpha must be > 0");
    }
    if (trap.kind == TrapKind::Tabulated &&
        (trap.radii.size() != trap.values.size() || trap.radii.size() < 2))
        throw ConfigError("gp problem: tabulated trap needs >= 2 (radius, value) rows");
}

struct GPEngine::Fft {
    int n = 0;
    std::vector<double> real;
    std::vector<std::complex<double>> spec;
    std::vector<double> k2;      // |k|^2 on the half spectrum
    std::vector<double> weight;  // Parseval weight (1 or 2)
    fftw_plan fwd = nullptr, bwd = nullptr;

    explicit Fft(int n_, double L) : n(n_) {
        const std::size_t nr = std::size_t(n) * n * n;
        const std::size_t nc = std::size_t(n) * n * (n / 2 + 1);
        real.resize(nr);
        spec.resize(nc);
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fwd = fftw_plan_dft_r2c_3d(n, n, n, real.data(),
                                       reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(spec.data()),
                                       real.data(), FFTW_ESTIMATE);
        }
        k2.resize(nc);
        weight.resize(nc);
        const double dk = 2.0 * 3.14159265358979323846 / L;
        auto freq = [&](int m) { return m <= n / 2 ? m : m - n; };
        std::size_t idx = 0;
        for (int mx = 0; mx < n; ++mx)
            for (int my = 0; my < n; ++my)
                for (int mz = 0; mz <= n / 2; ++mz, ++idx) {
                    const double kx = dk * freq(mx), ky = dk * freq(my), kz = dk * mz;
                    k2[idx] = kx * kx + ky * ky + kz * kz;
                    const bool self = (mz == 0) || (n % 2 == 0 && mz == n / 2);
                    weight[idx] = self ? 1.0 : 2.0;
                }
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

GPEngine::GPEngine(const GPProblem& p) : prob_(p) {
    p.validate();
    const double h = p.spacing();
    h3_ = h * h * h;
    const int n = p.points;
    trap_.assign(p.size(), 0.0);
    if (p.trap.kind != TrapKind::None) {
        std::size_t idx = 0;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz, ++idx) {
                    const double x = p.coord(ix), y = p.coord(iy), z = p.coord(iz);
                    trap_[idx] = p.trap(std::sqrt(x * x + y * y + z * z));
                }
    }
    if (p.boundary == Boundary::Periodic) fft_ = std::make_unique<Fft>(n, p.box_side);
}

GPEngine::~GPEngine() = default;

namespace {

/// Second-order 7-point Laplacian with zero walls.
void stencil_minus_laplacian(int n, double h, const std::vector<double>& u,
                             std::vector<double>& out) {
    const double inv_h2 = 1.0 / (h * h);
    const std::size_t sx = std::size_t(n) * n, sy = std::size_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ix = 0; ix < n; ++ix)
        for (std::ptrdiff_t iy = 0; iy < n; ++iy) {
            const std::size_t base = std::size_t(ix) * sx + std::size_t(iy) * sy;
            for (std::ptrdiff_t iz = 0; iz < n; ++iz) {
                const std::size_t j = base + std::size_t(iz);
                double s = 6.0 * u[j];
                if (ix > 0) s -= u[j - sx];
                if (ix < n - 1) s -= u[j + sx];
                if (iy > 0) s -= u[j - sy];
                if (iy < n - 1) s -= u[j + sy];
                if (iz > 0) s -= u[j - 1];
                if (iz < n - 1) s -= u[j + 1];
                out[j] = inv_h2 * s;
            }
        }
}

}  // namespace

void GPEngine::apply_minus_laplacian(const std::vector<double>& u, std::vector<double>& out) const {
    out.resize(u.size());
    if (prob_.boundary == Boundary::Dirichlet) {
        stencil_minus_laplacian(prob_.points, prob_.spacing(), u, out);
        return;
    }
    auto& f = *fft_;
    std::copy(u.begin(), u.end(), f.real.begin());
    fftw_execute(f.fwd);
    const double scale = 1.0 / double(prob_.size());
    for (std::size_t i = 0; i < f.spec.size(); ++i) f.spec[i] *= f.k2[i] * scale;
    fftw_execute(f.bwd);
    std::copy(f.real.begin(), f.real.end(), out.begin());
}

double GPEngine::kinetic_energy(const std::vector<double>& u) const {
    if (prob_.boundary == Boundary::Dirichlet) {
        std::vector<double> lap(u.size());
        stencil_minus_laplacian(prob_.points, prob_.spacing(), u, lap);
        return h3_ * deterministic_dot(u, lap);
    }
    auto& f = *fft_;
    std::copy(u.begin(), u.end(), f.real.begin());
    fftw_execute(f.fwd);
    const std::size_t nc = f.spec.size();
    const std::size_t nchunks = (nc + kChunk - 1) / kChunk;
    std::vector<double> partial(nchunks, 0.0);
    for (std::size_t c = 0; c < nchunks; ++c) {
        const std::size_t lo = c * kChunk, hi = std::min(lo + kChunk, nc);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f.weight[i] * f.k2[i] * std::norm(f.spec[i]);
        partial[c] = s;
    }
    double sum = 0.0;
    for (double s : partial) sum += s;
    // Parseval with the unnormalized transform: int u^2 = (h^3/N) sum |u_k|^2
    return sum * h3_ / double(prob_.size());
}

void GPEngine::apply_hamiltonian(const std::vector<double>& u, std::vector<double>& out) const {
    apply_minus_laplacian(u, out);
    const double b1 = prob_.b1, b2h = 0.5 * prob_.b2;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(u.size()); ++i) {
        const double ui = u[std::size_t(i)];
        const double u2 = ui * ui;
        out[std::size_t(i)] += trap_[std::size_t(i)] * ui + b1 * u2 * ui + b2h * u2 * u2 * ui;
    }
}

EnergyBreakdown GPEngine::energy_breakdown(const std::vector<double>& u) const {
    EnergyBreakdown br;
    br.kinetic = kinetic_energy(u);
    const std::size_t N = u.size();
    const std::size_t nchunks = (N + kChunk - 1) / kChunk;
    std::vector<double> pt(nchunks, 0.0), p4(nchunks, 0.0), p6(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
        const std::size_t lo = std::size_t(c) * kChunk, hi = std::min(lo + kChunk, N);
        double st = 0.0, s4 = 0.0, s6 = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double u2 = u[i] * u[i];
            st += trap_[i] * u2;
            s4 += u2 * u2;
            s6 += u2 * u2 * u2;
        }
        pt[std::size_t(c)] = st;
        p4[std::size_t(c)] = s4;
        p6[std::size_t(c)] = s6;
    }
    double st = 0.0, s4 = 0.0, s6 = 0.0;
    for (std::size_t c = 0; c < nchunks; ++c) {
        st += pt[c];
        s4 += p4[c];
        s6 += p6[c];
    }
    br.trap = h3_ * st;
    br.quartic = 0.5 * prob_.b1 * h3_ * s4;
    br.quintic = prob_.b2 / 6.0 * h3_ * s6;
    return br;
}

double GPEngine::operator_norm_estimate() const {
    const int n = prob_.points;
    const double L = prob_.box_side;
    double lam;
    if (prob_.boundary == Boundary::Periodic) {
        const double kmax = 3.14159265358979323846 * n / L;
        lam = 3.0 * kmax * kmax;
    } else {
        const double h = prob_.spacing();
        lam = 12.0 / (h * h);
    }
    double vmax = 0.0;
    for (double v : trap_) vmax = std::max(vmax, std::abs(v));
    return lam + vmax + std::abs(prob_.b1) + prob_.b2;
}

namespace {

struct FlowState {
    std::vector<double> u, Hu;
    EnergyBreakdown br;
    double energy = 0.0, mu = 0.0, residual = 0.0;
};

void normalize(const GPEngine& eng, std::vector<double>& u, double& max_dev) {
    const double nrm2 = eng.dot(u, u);
    if (!(nrm2 > 0.0) || !std::isfinite(nrm2))
        throw SolverError("minimize: field norm degenerate or non-finite");
    const double s = 1.0 / std::sqrt(nrm2);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(u.size()); ++i) u[std::size_t(i)] *= s;
    max_dev = std::max(max_dev, std::abs(eng.dot(u, u) - 1.0));
}

void evaluate(const GPEngine& eng, FlowState& st) {
    st.br = eng.energy_breakdown(st.u);
    st.energy = st.br.total();
    eng.apply_hamiltonian(st.u, st.Hu);
    st.mu = eng.dot(st.u, st.Hu);
    double acc = 0.0;
    {
        // || Hu - mu u ||, fused
        const std::size_t N = st.u.size();
        std::vector<double> diff(N);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(N); ++i)
            diff[std::size_t(i)] = st.Hu[std::size_t(i)] - st.mu * st.u[std::size_t(i)];
        acc = eng.dot(diff, diff);
    }
    st.residual = std::sqrt(std::max(acc, 0.0));
    if (!std::isfinite(st.energy) || !std::isfinite(st.residual))
        throw SolverError("minimize: non-finite energy or residual (divergence)");
}

GPSolution minimize_single(const GPProblem& p, const MinimizeOptions& opts, std::uint64_t seed) {
    GPEngine eng(p);
    const std::size_t N = p.size();
    GPSolution sol;

    FlowState st;
    st.u.assign(N, 1.0);
    if (opts.init == MinimizeOptions::Init::Gaussian) {
        const double w2 = 2.0 * opts.gaussian_width * opts.gaussian_width;
        std::size_t idx = 0;
        for (int ix = 0; ix < p.points; ++ix)
            for (int iy = 0; iy < p.points; ++iy)
                for (int iz = 0; iz < p.points; ++iz, ++idx) {
                    const double x = p.coord(ix), y = p.coord(iy), z = p.coord(iz);
                    st.u[idx] = std::exp(-(x * x + y * y + z * z) / w2);
                }
    } else if (opts.init == MinimizeOptions::Init::Random) {
        Rng rng(seed);
        for (auto& x : st.u) x = 1.0 + 0.5 * rng.normal();
    }
    normalize(eng, st.u, sol.norm_deviation);
    evaluate(eng, st);
    sol.min_energy_seen = st.energy;

    const double tau0 = 0.5 / eng.operator_norm_estimate();
    double tau = opts.step > 0.0 ? opts.step : tau0;
    const double tau_lo = tau0 * 1e-3, tau_hi = tau0 * 1e7;

    std::vector<double> grad(N), u_prev, grad_prev;
    FlowState trial;
    trial.u.resize(N);
    trial.Hu.resize(N);

    long it = 0;
    bool stalled_at_floor = false;
    for (; it < opts.max_iterations && st.residual > opts.tolerance; ++it) {
        // riemannian gradient is 2 (Hu - mu u); drop the 2 into the step
        for (std::size_t i = 0; i < N; ++i) grad[i] = st.Hu[i] - st.mu * st.u[i];

        bool accepted = false;
        double t = std::clamp(tau, tau_lo, tau_hi);
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t i = 0; i < N; ++i) trial.u[i] = st.u[i] - t * grad[i];
            normalize(eng, trial.u, sol.norm_deviation);
            trial.br = eng.energy_breakdown(trial.u);
            trial.energy = trial.br.total();
            if (!std::isfinite(trial.energy)) throw SolverError("minimize: divergence (NaN energy)");
            sol.min_energy_seen = std::min(sol.min_energy_seen, trial.energy);
            if (trial.energy <= st.energy + 1e-15 * (std::abs(st.energy) + 1.0)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (st.residual <= 1e4 * opts.tolerance) {  // stalled by roundoff at the floor
                stalled_at_floor = true;
                break;
            }
            std::ostringstream os;
            os << "minimize: line-search failure at iteration " << it << " (energy " << st.energy
               << ", residual " << st.residual << ", step " << t << ")";
            throw SolverError(os.str());
        }
        u_prev = st.u;
        grad_prev = grad;
        st.u.swap(trial.u);
        eng.apply_hamiltonian(st.u, st.Hu);
        st.mu = eng.dot(st.u, st.Hu);
        st.br = trial.br;
        st.energy = trial.energy;
        {
            std::vector<double> diff(N);
            for (std::size_t i = 0; i < N; ++i) diff[i] = st.Hu[i] - st.mu * st.u[i];
            st.residual = std::sqrt(std::max(eng.dot(diff, diff), 0.0));
        }
        if (opts.record_trace) sol.trace.push_back({double(it), st.energy, st.residual});

        // Barzilai-Borwein step from the accepted move
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double si = st.u[i] - u_prev[i];
            const double yi = (st.Hu[i] - st.mu * st.u[i]) - grad_prev[i];
            ss += si * si;
            sy += si * yi;
        }
        tau = (std::isfinite(sy) && sy > 0.0) ? ss / sy : 2.0 * t;
        if (!std::isfinite(tau) || tau <= 0.0) tau = tau0;
    }

    sol.iterations = it;
    sol.converged = st.residual <= opts.tolerance || stalled_at_floor;
    // sign gauge: make the field mean nonnegative
    if (deterministic_sum(st.u) < 0.0)
        for (auto& x : st.u) x = -x;
    sol.u = std::move(st.u);
    sol.breakdown = st.br;
    sol.energy = st.energy;
    sol.mu = st.mu;
    sol.residual = st.residual;
    sol.min_field = *std::min_element(sol.u.begin(), sol.u.end());
    return sol;
}

}  // namespace

GPSolution minimize(const GPProblem& p, const MinimizeOptions& opts) {
    p.validate();
    const int R = std::max(1, opts.restarts);
    if (R == 1) {
        GPSolution s = minimize_single(p, opts, opts.seed);
        s.restarts_run = 1;
        s.energy_spread = 0.0;
        return s;
    }
    std::vector<std::future<GPSolution>> futs;
    futs.reserve(std::size_t(R));
    const int workers = std::max(1, opts.workers);
    auto sols = std::vector<GPSolution>(std::size_t(R));
    for (int base = 0; base < R; base += workers) {
        const int hi = std::min(R, base + workers);
        futs.clear();
        for (int r = base; r < hi; ++r) {
            const std::uint64_t seed = opts.seed + std::uint64_t(r) * 1000003ULL;
            futs.push_back(std::async(std::launch::async,
                                      [&, seed] { return minimize_single(p, opts, seed); }));
        }
        for (int r = base; r < hi; ++r) sols[std::size_t(r)] = futs[std::size_t(r - base)].get();
    }
    int best = 0;
    double lo = sols[0].energy, hiE = sols[0].energy;
    for (int r = 1; r < R; ++r) {
        lo = std::min(lo, sols[std::size_t(r)].energy);
        hiE = std::max(hiE, sols[std::size_t(r)].energy);
        const auto& a = sols[std::size_t(r)];
        const auto& b = sols[std::size_t(best)];
        if (a.energy < b.energy || (a.energy == b.energy && a.residual < b.residual)) best = r;
    }
    GPSolution s = std::move(sols[std::size_t(best)]);
    s.restarts_run = R;
    s.energy_spread = hiE - lo;
    double mmin = sols[0].min_energy_seen;
    for (const auto& x : sols) mmin = std::min(mmin, x.min_energy_seen);
    // keep the most pessimistic evaluated-energy floor across restarts
    s.min_energy_seen = std::min(s.min_energy_seen, mmin);
    return s;
}

EnergyBreakdown energy(const std::vector<double>& u, const GPProblem& p) {
    p.validate();
    if (u.size() != p.size()) throw PreconditionError("energy: field size does not match the grid");
    GPEngine eng(p);
    const double nrm2 = eng.dot(u, u);
    if (std::abs(nrm2 - 1.0) > 1e-9)
        throw PreconditionError("energy: field must have unit mass within 1e-9");
    return eng.energy_breakdown(u);
}

double chemical_potential(const GPSolution& sol, const GPProblem& p) {
    if (!sol.converged) throw PreconditionError("chemical_potential: solution is not converged");
    GPEngine eng(p);
    std::vector<double> Hu(sol.u.size());
    eng.apply_hamiltonian(sol.u, Hu);
    return eng.dot(sol.u, Hu);
}

double interpolation_lower_bound(double b1, double b2) {
    if (!(b2 > 0.0)) throw PreconditionError("interpolation bound: requires b2 > 0");
    return -3.0 * b1 * b1 / (8.0 * b2);
}

DropletResult droplet_search(double b1, double b2, const std::vector<double>& box_sides,
                             int points, const MinimizeOptions& opts) {
    if (!(b1 < 0.0)) throw PreconditionError("droplet_search: requires b1 < 0");
    if (!(b2 > 0.0)) throw PreconditionError("droplet_search: requires b2 > 0");
    if (box_sides.empty()) throw PreconditionError("droplet_search: need at least one box");
    for (std::size_t i = 1; i < box_sides.size(); ++i)
        if (box_sides[i] <= box_sides[i - 1])
            throw PreconditionError("droplet_search: box sides must be strictly increasing");
    DropletResult res;
    for (double L : box_sides) {
        GPProblem p;
        p.box_side = L;
        p.points = points;
        p.boundary = Boundary::Periodic;
        p.b1 = b1;
        p.b2 = b2;
        MinimizeOptions o = opts;
        o.restarts = 1;
        o.init = MinimizeOptions::Init::Gaussian;
        GPSolution a = minimize(p, o);
        o.init = MinimizeOptions::Init::Constant;
        GPSolution c = minimize(p, o);
        GPSolution& pick = a.energy <= c.energy ? a : c;
        pick.min_energy_seen = std::min(a.min_energy_seen, c.min_energy_seen);
        const double h3 = std::pow(p.spacing(), 3);
        std::vector<double> u4(pick.u.size());
        for (std::size_t i = 0; i < pick.u.size(); ++i) u4[i] = std::pow(pick.u[i], 4);
        const double p4 = h3 * deterministic_sum(u4);
        res.box_sides.push_back(L);
        res.participation.push_back(p4 > 0.0 ? 1.0 / p4 : 0.0);
        res.energies.push_back(pick.energy);
        res.largest_box = std::move(pick);
    }
    const std::size_t m = res.participation.size();
    if (m >= 2) {
        const double last = res.participation[m - 1], prev = res.participation[m - 2];
        res.localized = std::abs(last - prev) <= 0.05 * std::abs(last);
    }
    return res;
}

}  // namespace bec3::gp
