#include "bilayer/simulator.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "bilayer/blocks.hpp"

namespace bilayer {

void SimParams::validate() const {
    potential.validate();
    if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
    if (!(mu > 0.0)) throw UsageError("mu must be positive");
    if (!(L > 0.0)) throw UsageError("L must be positive");
    if (N < 4) throw UsageError("need N >= 4 grid nodes");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
        throw UsageError("time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
    if (!(newton_tol > 0.0)) throw UsageError("newton_tol must be positive");
    if (newton_max_iter < 1) throw UsageError("newton_max_iter must be at least 1");
    if (!(t_end >= 0.0)) throw UsageError("t_end must be non-negative");
    if (output_every < 1) throw UsageError("output_every must be at least 1");
}

Eigen::Matrix2d mobility(double mu, double h1, double h) {
    if (!(h1 > 0.0) || !(h > 0.0)) throw DomainError("mobility needs positive heights");
    Eigen::Matrix2d q;
    q(0, 0) = h1 * h1 * h1 / (3.0 * mu);
    q(0, 1) = q(1, 0) = h1 * h1 * h / (2.0 * mu);
    q(1, 1) = h * h * h / 3.0 + h1 * h * h / mu;
    return q;
}

namespace {

// Derivatives of the mobility entries with respect to h1 and h.
void mobility_derivs(double mu, double h1, double h, Eigen::Matrix2d& d1, Eigen::Matrix2d& d2) {
    d1(0, 0) = h1 * h1 / mu;
    d1(0, 1) = d1(1, 0) = h1 * h / mu;
    d1(1, 1) = h * h / mu;
    d2(0, 0) = 0.0;
    d2(0, 1) = d2(1, 0) = h1 * h1 / (2.0 * mu);
    d2(1, 1) = h * h + 2.0 * h1 * h / mu;
}

void check_state(const SimState& s, const SimParams& prm) {
    if (s.h1.size() != static_cast<std::size_t>(prm.N) || s.h.size() != static_cast<std::size_t>(prm.N))
        throw UsageError("state size does not match N");
}

// Second difference with Neumann ghost reflection.
double lap(const std::vector<double>& v, int i, double inv_dx2) {
    const int n = static_cast<int>(v.size());
    const double left = i == 0 ? v[1] : v[i - 1];
    const double right = i == n - 1 ? v[n - 2] : v[i + 1];
    return (left - 2.0 * v[i] + right) * inv_dx2;
}

// d lap(v)_i / d v_j
double lap_coeff(int i, int j, int n, double inv_dx2) {
    if (i == j) return -2.0 * inv_dx2;
    if (std::abs(i - j) != 1) return 0.0;
    if (i == 0 || i == n - 1) return 2.0 * inv_dx2;
    return inv_dx2;
}

double node_weight(int i, int n, double dx) { return (i == 0 || i == n - 1) ? 0.5 * dx : dx; }

struct Sink {
    virtual void add(int row, int col, double v) = 0;
    virtual ~Sink() = default;
};

struct DenseSink : Sink {
    Eigen::MatrixXd& m;
    explicit DenseSink(Eigen::MatrixXd& mm) : m(mm) {}
    void add(int row, int col, double v) override { m(row, col) += v; }
};

constexpr int kKl = 5;
constexpr int kKu = 5;
constexpr int kLdab = 2 * kKl + kKu + 1;

// LAPACK general band storage with room for the LU fill-in.
struct BandSink : Sink {
    int n;
    std::vector<double> ab;
    explicit BandSink(int nn) : n(nn), ab(static_cast<std::size_t>(kLdab) * nn, 0.0) {}
    void add(int row, int col, double v) override {
        ab[static_cast<std::size_t>(col) * kLdab + (kKl + kKu + row - col)] += v;
    }
};

// Residual and (optionally) its Jacobian in the interleaved layout z_{2i} = h1_i, z_{2i+1} = h_i.
void assemble(const SimState& next, const SimState& prev, double dt, const SimParams& prm,
              std::vector<double>& r, Sink* jac) {
    const int n = prm.N;
    const double dx = prm.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const double sg = prm.sigma;
    const PotentialParams& pp = prm.potential;

    std::vector<Eigen::Vector2d> P(n);
    std::vector<Eigen::Matrix2d> Q(n), dQ1, dQ2;
    std::vector<double> dpi1, dpi2;
    if (jac) {
        dQ1.resize(n);
        dQ2.resize(n);
        dpi1.resize(n);
        dpi2.resize(n);
    }
    for (int i = 0; i < n; ++i) {
        const double a = lap(next.h1, i, inv_dx2);
        const double b = lap(next.h, i, inv_dx2);
        P[i](0) = -(sg + 1.0) * a - b + pi_eps(pp, next.h1[i]);
        P[i](1) = -a - b + pi_eps(pp, next.h[i]);
        Q[i] = mobility(prm.mu, next.h1[i], next.h[i]);
        if (jac) {
            mobility_derivs(prm.mu, next.h1[i], next.h[i], dQ1[i], dQ2[i]);
            dpi1[i] = pi_eps_deriv(pp, next.h1[i]);
            dpi2[i] = pi_eps_deriv(pp, next.h[i]);
        }
    }
    // dP_m / du_j as a 2x2 block (rows: p1, p2; cols: h1_j, h_j)
    auto dP = [&](int m, int j) {
        Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
        if (m < 0 || m >= n || j < 0 || j >= n) return d;
        const double c = lap_coeff(m, j, n, inv_dx2);
        d(0, 0) = -(sg + 1.0) * c;
        d(0, 1) = -c;
        d(1, 0) = -c;
        d(1, 1) = -c;
        if (m == j) {
            d(0, 0) += dpi1[m];
            d(1, 1) += dpi2[m];
        }
        return d;
    };

    // Fluxes at half-nodes k + 1/2, k = 0..n-2; zero at the domain ends.
    std::vector<Eigen::Vector2d> G(n - 1);
    for (int k = 0; k < n - 1; ++k) G[k] = 0.5 * (Q[k] + Q[k + 1]) * (P[k + 1] - P[k]) / dx;

    r.assign(2 * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d right = i < n - 1 ? G[i] : Eigen::Vector2d::Zero();
        const Eigen::Vector2d left = i > 0 ? G[i - 1] : Eigen::Vector2d::Zero();
        const double w = node_weight(i, n, dx);
        r[2 * i] = (next.h1[i] - prev.h1[i]) / dt - (right(0) - left(0)) / w;
        r[2 * i + 1] = (next.h[i] - prev.h[i]) / dt - (right(1) - left(1)) / w;
    }
    if (!jac) return;

    for (int i = 0; i < n; ++i) {
        jac->add(2 * i, 2 * i, 1.0 / dt);
        jac->add(2 * i + 1, 2 * i + 1, 1.0 / dt);
    }
    for (int k = 0; k < n - 1; ++k) {
        const Eigen::Matrix2d Qh = 0.5 * (Q[k] + Q[k + 1]);
        const Eigen::Vector2d dPk = (P[k + 1] - P[k]) / dx;
        for (int j = std::max(0, k - 1); j <= std::min(n - 1, k + 2); ++j) {
            Eigen::Matrix2d dG = Qh * (dP(k + 1, j) - dP(k, j)) / dx;
            if (j == k || j == k + 1) {
                dG.col(0) += 0.5 * dQ1[j] * dPk;
                dG.col(1) += 0.5 * dQ2[j] * dPk;
            }
            // G_k enters row k with +1/w_k and row k+1 with -1/w_{k+1}; residual has -div.
            const double wl = node_weight(k, n, dx);
            const double wr = node_weight(k + 1, n, dx);
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) {
                    jac->add(2 * k + a, 2 * j + c, -dG(a, c) / wl);
                    jac->add(2 * (k + 1) + a, 2 * j + c, dG(a, c) / wr);
                }
        }
    }
}

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double node_x(int i, const SimParams& prm) { return i == prm.N - 1 ? 0.0 : -prm.L + i * prm.dx(); }

}  // namespace

std::pair<std::vector<double>, std::vector<double>> pressures(const SimState& s, const SimParams& prm) {
    check_state(s, prm);
    const double inv_dx2 = 1.0 / (prm.dx() * prm.dx());
    std::vector<double> p1(prm.N), p2(prm.N);
    for (int i = 0; i < prm.N; ++i) {
        const double a = lap(s.h1, i, inv_dx2);
        const double b = lap(s.h, i, inv_dx2);
        p1[i] = -(prm.sigma + 1.0) * a - b + pi_eps(prm.potential, s.h1[i]);
        p2[i] = -a - b + pi_eps(prm.potential, s.h[i]);
    }
    return {p1, p2};
}

std::vector<double> residual(const SimState& next, const SimState& prev, double dt, const SimParams& prm) {
    check_state(next, prm);
    check_state(prev, prm);
    if (!(dt > 0.0)) throw UsageError("dt must be positive");
    std::vector<double> r;
    assemble(next, prev, dt, prm, r, nullptr);
    return r;
}

Eigen::MatrixXd residual_jacobian(const SimState& next, const SimState& prev, double dt, const SimParams& prm) {
    check_state(next, prm);
    check_state(prev, prm);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * prm.N, 2 * prm.N);
    DenseSink sink(m);
    std::vector<double> r;
    assemble(next, prev, dt, prm, r, &sink);
    return m;
}

StepResult step(const SimState& s, double dt, const SimParams& prm) {
    check_state(s, prm);
    const int n = prm.N;
    const double floor = kMinHeightFactor * prm.potential.eps;
    SimState u = s;
    u.t = s.t + dt;
    std::vector<double> r;
    std::vector<lapack_int> ipiv(2 * static_cast<std::size_t>(n));
    double last_update = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        BandSink band(2 * n);
        try {
            assemble(u, s, dt, prm, r, &band);
        } catch (const DomainError& e) {
            throw StepRejected(std::string("invalid iterate: ") + e.what());
        }
        // The residual has a round-off floor growing with dt, so an update that has
        // already shrunk far below the tolerance also counts as converged.
        if (it > 0 && (dt * sup_norm(r) <= prm.newton_tol || last_update <= 1e-2 * prm.newton_tol)) return {u, it};
        if (it == prm.newton_max_iter)
            throw StepRejected("Newton did not converge in " + std::to_string(prm.newton_max_iter) + " iterations");
        for (double& v : r) v = -v;
        const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, 2 * n, kKl, kKu, 1, band.ab.data(), kLdab,
                                              ipiv.data(), r.data(), 2 * n);
        if (info != 0) throw StepRejected("singular Newton matrix");
        last_update = sup_norm(r);
        for (int i = 0; i < n; ++i) {
            u.h1[i] += r[2 * i];
            u.h[i] += r[2 * i + 1];
            if (!(u.h1[i] >= floor) || !(u.h[i] >= floor)) throw StepRejected("positivity lost");
        }
    }
}

double energy(const SimState& s, const SimParams& prm) {
    check_state(s, prm);
    const int n = prm.N;
    const double dx = prm.dx();
    double e = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double d1 = (s.h1[i + 1] - s.h1[i]) / dx;
        const double dH = (s.h1[i + 1] + s.h[i + 1] - s.h1[i] - s.h[i]) / dx;
        e += dx * (0.5 * prm.sigma * d1 * d1 + 0.5 * dH * dH);
    }
    for (int i = 0; i < n; ++i) e += node_weight(i, n, dx) * phi_eps(prm.potential, s.h1[i], s.h[i]);
    return e;
}

std::pair<double, double> masses(const SimState& s, const SimParams& prm) {
    check_state(s, prm);
    const double dx = prm.dx();
    double m1 = 0.0, m = 0.0;
    for (int i = 0; i < prm.N; ++i) {
        const double w = node_weight(i, prm.N, dx);
        m1 += w * s.h1[i];
        m += w * s.h[i];
    }
    return {m1, m};
}

double symmetry_metric(const SimState& s, const SimParams& prm) {
    check_state(s, prm);
    const int n = prm.N;
    const double dx = prm.dx();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = s.h1[i] - s.h1[n - 1 - i];
        const double b = s.h[i] - s.h[n - 1 - i];
        acc += node_weight(i, n, dx) * (a * a + b * b);
    }
    return std::sqrt(acc);
}

std::vector<CLPosition> detect_cls(const SimState& s, const SimParams& prm) {
    check_state(s, prm);
    const double level = 2.0 * prm.potential.eps;
    std::vector<CLPosition> out;
    for (int layer = 0; layer < 2; ++layer) {
        const std::vector<double>& v = layer == 0 ? s.h1 : s.h;
        for (int i = 0; i + 1 < prm.N; ++i) {
            const double a = v[i] - level, b = v[i + 1] - level;
            if ((a < 0.0) != (b < 0.0)) {
                const double x0 = node_x(i, prm), x1 = node_x(i + 1, prm);
                out.push_back({layer, x0 + (x1 - x0) * a / (a - b)});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const CLPosition& p, const CLPosition& q) {
        return p.layer != q.layer ? p.layer < q.layer : p.x < q.x;
    });
    return out;
}

Diagnostics diagnose(const SimState& s, const SimParams& prm, double dt, int newton_iters) {
    Diagnostics d;
    d.t = s.t;
    d.dt = dt;
    d.energy = energy(s, prm);
    std::tie(d.mass1, d.mass) = masses(s, prm);
    d.min_h1 = *std::min_element(s.h1.begin(), s.h1.end());
    d.min_h = *std::min_element(s.h.begin(), s.h.end());
    d.newton_iters = newton_iters;
    d.symmetry_metric = symmetry_metric(s, prm);
    d.cls = detect_cls(s, prm);
    return d;
}

double stationary_residual(const Profile& prof, double lambda1, double lambda2, const SimParams& prm) {
    SimState s = state_from_profile(prof, prm);
    const double inv_dx2 = 1.0 / (prm.dx() * prm.dx());
    const double sg = prm.sigma;
    const PotentialParams& pp = prm.potential;
    const std::vector<CLPosition> cls = detect_cls(s, prm);
    const double guard = 10.0 * pp.eps;
    double worst = 0.0;
    for (int i = 0; i < prm.N; ++i) {
        const double x = node_x(i, prm);
        bool near = false;
        for (const auto& c : cls) near = near || std::abs(x - c.x) <= guard;
        if (near) continue;
        const double P1 = pi_eps(pp, s.h1[i]), P = pi_eps(pp, s.h[i]);
        const double ra = sg * lap(s.h1, i, inv_dx2) - P1 + P + lambda2 - lambda1;
        const double rb = sg * lap(s.h, i, inv_dx2) + P1 - (sg + 1.0) * P - lambda2 + (sg + 1.0) * lambda1;
        worst = std::max({worst, std::abs(ra), std::abs(rb)});
    }
    return worst;
}

SimState state_from_profile(const Profile& p, const SimParams& prm) {
    if (p.size() < 2) throw UsageError("initial profile needs at least two nodes");
    if (std::abs(p.length() - prm.L) > 1e-9 * prm.L)
        throw UsageError("initial profile spans " + format_double(p.length()) + ", expected L=" + format_double(prm.L));
    const Profile q = p.size() == static_cast<std::size_t>(prm.N) ? p : resample(p, prm.N);
    SimState s;
    s.h1 = q.h1;
    s.h = q.h;
    for (int i = 0; i < prm.N; ++i)
        if (!(s.h1[i] > 0.0) || !(s.h[i] > 0.0)) throw DomainError("initial profile must be positive");
    return s;
}

Profile profile_from_state(const SimState& s, const SimParams& prm) {
    check_state(s, prm);
    Profile p;
    for (int i = 0; i < prm.N; ++i) p.x.push_back(node_x(i, prm));
    p.h1 = s.h1;
    p.h = s.h;
    p.resolution_warning = prm.N < 16.0 * prm.L / prm.potential.eps;
    return p;
}

RunResult run(const SimParams& prm, const Profile& initial, const RunCallbacks& cb) {
    prm.validate();
    RunResult res;
    SimState s = state_from_profile(initial, prm);
    s.t = 0.0;

    auto emit = [&](const Diagnostics& d) {
        res.trajectory.push_back(d);
        if (cb.on_diagnostics) cb.on_diagnostics(d);
    };
    Diagnostics d = diagnose(s, prm);
    emit(d);
    double e_prev = d.energy;
    double dt = prm.dt_init;
    bool last_emitted = true;
    while (s.t < prm.t_end && (prm.max_steps == 0 || res.accepted < prm.max_steps)) {
        const double remaining = prm.t_end - s.t;
        const double h = std::min(dt, remaining);
        StepResult sr;
        try {
            sr = step(s, h, prm);
        } catch (const StepRejected& e) {
            ++res.rejected;
            dt *= 0.5;
            if (dt < prm.dt_min) {
                res.aborted = true;
                res.abort_reason = "time step fell below dt_min at t=" + format_double(s.t) + " (" + e.what() + ")";
                break;
            }
            continue;
        }
        if (h == remaining) sr.state.t = prm.t_end;
        s = std::move(sr.state);
        ++res.accepted;
        const double e = energy(s, prm);
        res.max_energy_increase = std::max(res.max_energy_increase, (e - e_prev) / std::abs(e_prev));
        e_prev = e;
        if (sr.newton_iters <= 5 && h == dt) dt = std::min(1.2 * dt, prm.dt_max);
        last_emitted = res.accepted % prm.output_every == 0;
        if (last_emitted) emit(diagnose(s, prm, h, sr.newton_iters));
        if (cb.on_snapshot && cb.snapshot_every > 0 && res.accepted % cb.snapshot_every == 0)
            cb.on_snapshot(s, diagnose(s, prm, h, sr.newton_iters));
    }
    if (!last_emitted) emit(diagnose(s, prm, dt));
    if (cb.on_snapshot) cb.on_snapshot(s, res.trajectory.back());
    res.final_state = std::move(s);
    return res;
}

const char* to_string(RunClass c) {
    switch (c) {
        case RunClass::Stationary: return "stationary";
        case RunClass::Translating: return "translating";
        case RunClass::Coarsening: return "coarsening";
    }
    return "?";
}

RunClass classify_run(const SimState& initial, const SimState& final_state, const SimParams& prm) {
    check_state(initial, prm);
    check_state(final_state, prm);
    const double eps = prm.potential.eps;
    double drift = 0.0;
    for (int i = 0; i < prm.N; ++i)
        drift = std::max({drift, std::abs(final_state.h1[i] - initial.h1[i]), std::abs(final_state.h[i] - initial.h[i])});
    if (drift <= 5.0 * eps) return RunClass::Stationary;

    const auto a = detect_cls(initial, prm);
    const auto b = detect_cls(final_state, prm);
    if (a.size() != b.size() || a.empty()) return RunClass::Coarsening;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].layer != b[k].layer) return RunClass::Coarsening;
        const double shift = b[k].x - a[k].x;
        lo = std::min(lo, shift);
        hi = std::max(hi, shift);
    }
    return hi - lo <= 10.0 * eps ? RunClass::Translating : RunClass::Coarsening;
}

}  // namespace bilayer
