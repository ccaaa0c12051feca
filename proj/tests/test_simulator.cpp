#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bilayer/composites.hpp"
#include "bilayer/simulator.hpp"

using namespace bilayer;

namespace {

SimParams small_params(int N = 40) {
    SimParams p;
    p.sigma = 0.7;
    p.mu = 1.3;
    p.L = 1.0;
    p.N = N;
    p.potential.eps = 0.05;
    return p;
}

SimState random_state(const SimParams& p, unsigned seed) {
    std::mt19937 g(seed);
    std::uniform_real_distribution<double> u(0.05, 0.5);
    SimState s;
    for (int i = 0; i < p.N; ++i) {
        s.h1.push_back(u(g));
        s.h.push_back(u(g));
    }
    return s;
}

SimState smooth_state(const SimParams& p) {
    SimState s;
    for (int i = 0; i < p.N; ++i) {
        const double x = -p.L + i * p.dx();
        s.h1.push_back(0.2 + 0.05 * std::cos(M_PI * x / p.L));
        s.h.push_back(0.3 - 0.04 * std::cos(2.0 * M_PI * x / p.L));
    }
    return s;
}

SimState constant_state(const SimParams& p, double c1, double c) {
    SimState s;
    s.h1.assign(p.N, c1);
    s.h.assign(p.N, c);
    return s;
}

double sup_diff(const SimState& a, const SimState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.h1.size(); ++i)
        m = std::max({m, std::abs(a.h1[i] - b.h1[i]), std::abs(a.h[i] - b.h[i])});
    return m;
}

}  // namespace

TEST(Simulator, MobilityExamples) {
    const Eigen::Matrix2d q = mobility(1.0, 1.0, 1.0);
    EXPECT_NEAR(q(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(q(0, 1), 0.5, 1e-15);
    EXPECT_NEAR(q(1, 0), 0.5, 1e-15);
    EXPECT_NEAR(q(1, 1), 4.0 / 3.0, 1e-15);
    const Eigen::Matrix2d t = mobility(2.0, 1e-8, 0.5);
    EXPECT_LT(std::abs(t(0, 0)), 1e-20);
    EXPECT_LT(std::abs(t(0, 1)), 1e-16);
    EXPECT_NEAR(t(1, 1), 0.125 / 3.0, 1e-8);
    std::mt19937 g(5);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Matrix2d m = mobility(u(g), u(g), u(g));
        EXPECT_EQ(m(0, 1), m(1, 0));
        EXPECT_GT(m.trace(), 0.0);
        EXPECT_GT(m.determinant(), 0.0);
    }
    EXPECT_THROW(mobility(1.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(mobility(1.0, 1.0, -1.0), DomainError);
}

TEST(Simulator, ConstantStatePressuresAndResidual) {
    const auto p = small_params();
    const auto s = constant_state(p, 0.1, 0.2);
    const auto [p1, p2] = pressures(s, p);
    for (int i = 0; i < p.N; ++i) {
        EXPECT_NEAR(p1[i], pi_eps(p.potential, 0.1), 1e-12);
        EXPECT_NEAR(p2[i], pi_eps(p.potential, 0.2), 1e-12);
    }
    for (double r : residual(s, s, 0.1, p)) EXPECT_EQ(r, 0.0);
    const StepResult st = step(s, 0.1, p);
    EXPECT_LE(st.newton_iters, 1);
    EXPECT_EQ(sup_diff(st.state, s), 0.0);
}

TEST(Simulator, PressuresMatchDefinition) {
    const auto p = small_params();
    const auto s = smooth_state(p);
    const auto [p1, p2] = pressures(s, p);
    const double dx2 = p.dx() * p.dx();
    for (int i = 1; i + 1 < p.N; ++i) {
        const double d1 = (s.h1[i - 1] - 2 * s.h1[i] + s.h1[i + 1]) / dx2;
        const double d = (s.h[i - 1] - 2 * s.h[i] + s.h[i + 1]) / dx2;
        EXPECT_NEAR(p1[i], -(p.sigma + 1) * d1 - d + pi_eps(p.potential, s.h1[i]), 1e-9);
        EXPECT_NEAR(p2[i], -d1 - d + pi_eps(p.potential, s.h[i]), 1e-9);
    }
    // Ghost reflection at the ends.
    const double d1 = 2 * (s.h1[1] - s.h1[0]) / dx2, d = 2 * (s.h[1] - s.h[0]) / dx2;
    EXPECT_NEAR(p2[0], -d1 - d + pi_eps(p.potential, s.h[0]), 1e-9);
}

TEST(Simulator, ResidualTelescopes) {
    const auto p = small_params();
    const auto a = random_state(p, 2), b = random_state(p, 3);
    const auto r = residual(a, b, 1e-3, p);
    // Node control volumes are dx with half cells at the ends.
    double s1 = 0.0, s = 0.0, d1 = 0.0, d = 0.0;
    for (int i = 0; i < p.N; ++i) {
        const double w = (i == 0 || i == p.N - 1) ? 0.5 : 1.0;
        s1 += w * r[2 * i];
        s += w * r[2 * i + 1];
        d1 += w * (a.h1[i] - b.h1[i]) / 1e-3;
        d += w * (a.h[i] - b.h[i]) / 1e-3;
    }
    const double scale = std::accumulate(r.begin(), r.end(), 0.0, [](double m, double v) { return std::max(m, std::abs(v)); });
    EXPECT_LE(std::abs(s1 - d1), 1e-13 * scale * p.N);
    EXPECT_LE(std::abs(s - d), 1e-13 * scale * p.N);
}

TEST(Simulator, JacobianMatchesFiniteDifferences) {
    const auto p = small_params(12);
    for (unsigned seed : {1u, 7u, 19u}) {
        const auto a = random_state(p, seed), b = random_state(p, seed + 100);
        const double dt = 1e-3;
        const Eigen::MatrixXd J = residual_jacobian(a, b, dt, p);
        double worst = 0.0;
        for (int c = 0; c < 2 * p.N; ++c) {
            SimState up = a, dn = a;
            double& vu = c % 2 ? up.h[c / 2] : up.h1[c / 2];
            double& vd = c % 2 ? dn.h[c / 2] : dn.h1[c / 2];
            const double hh = 1e-6 * vu;
            vu += hh;
            vd -= hh;
            const auto rp = residual(up, b, dt, p), rm = residual(dn, b, dt, p);
            const double colscale = std::max(1.0, J.col(c).cwiseAbs().maxCoeff());
            for (int r = 0; r < 2 * p.N; ++r)
                worst = std::max(worst, std::abs((rp[r] - rm[r]) / (2 * hh) - J(r, c)) / colscale);
        }
        EXPECT_LE(worst, 1e-6) << seed;
        // Coupled 2x2 blocks within three nodes of the diagonal.
        for (int r = 0; r < 2 * p.N; ++r)
            for (int c = 0; c < 2 * p.N; ++c)
                if (std::abs(r / 2 - c / 2) > 2) EXPECT_EQ(J(r, c), 0.0);
    }
}

TEST(Simulator, EnergyAndMassesOfConstantStates) {
    auto p = small_params();
    p.L = 2.0;
    p.potential.eps = 0.01;
    EXPECT_NEAR(energy(constant_state(p, 0.01, 0.01), p), -2.0 / 3.0, 1e-12);
    const auto [m1, m] = masses(constant_state(p, 0.1, 0.3), p);
    EXPECT_NEAR(m1, 0.2, 1e-14);
    EXPECT_NEAR(m, 0.6, 1e-14);
    // Reflection preserves masses and energy exactly.
    const auto s = smooth_state(p);
    SimState r = s;
    std::reverse(r.h1.begin(), r.h1.end());
    std::reverse(r.h.begin(), r.h.end());
    EXPECT_NEAR(masses(r, p).first, masses(s, p).first, 1e-15);
    EXPECT_NEAR(energy(r, p), energy(s, p), 1e-13);
}

TEST(Simulator, EnergyQuadratureConvergesSecondOrder) {
    auto base = small_params(41);
    auto at = [&](int N) {
        SimParams p = base;
        p.N = N;
        return energy(smooth_state(p), p);
    };
    const double e1 = at(41), e2 = at(81), e3 = at(161);
    const double ratio = (e1 - e2) / (e2 - e3);
    EXPECT_GT(ratio, 3.0);
    EXPECT_LT(ratio, 5.0);
}

TEST(Simulator, ImplicitStepIsConsistentWithExplicitEuler) {
    const auto p = small_params();
    const auto s = smooth_state(p);
    auto gap = [&](double dt) {
        const auto r = residual(s, s, dt, p);  // equals minus the spatial operator at s
        SimState e = s;
        for (int i = 0; i < p.N; ++i) {
            e.h1[i] -= dt * r[2 * i];
            e.h[i] -= dt * r[2 * i + 1];
        }
        return sup_diff(step(s, dt, p).state, e);
    };
    const double g1 = gap(1e-5), g2 = gap(5e-6);
    EXPECT_GT(g1 / g2, 3.0);
    EXPECT_LT(g1 / g2, 5.0);
}

TEST(Simulator, ShortRunConservesMassAndDissipatesEnergy) {
    auto p = small_params(80);
    p.dt_init = 1e-6;
    p.dt_max = 1e-3;
    p.t_end = 0.05;
    p.output_every = 1;
    const auto s = smooth_state(p);
    const Profile prof = profile_from_state(s, p);
    double prev_e = INFINITY;
    std::vector<Diagnostics> seen;
    RunCallbacks cb;
    cb.on_diagnostics = [&](const Diagnostics& d) { seen.push_back(d); };
    const RunResult r = run(p, prof, cb);
    ASSERT_FALSE(r.aborted) << r.abort_reason;
    EXPECT_GT(r.accepted, 20);
    EXPECT_NEAR(r.final_state.t, p.t_end, 1e-12);
    const auto [m10, m0] = masses(s, p);
    for (const auto& d : seen) {
        EXPECT_LE(std::abs(d.mass1 - m10), 1e-9 * m10);
        EXPECT_LE(std::abs(d.mass - m0), 1e-9 * m0);
        EXPECT_LE(d.energy, prev_e + 1e-12 * std::abs(d.energy));
        prev_e = d.energy;
    }
    EXPECT_LE(r.max_energy_increase, 1e-12);
}

TEST(Simulator, ConstantRunStaysConstant) {
    auto p = small_params();
    p.t_end = 1.0;
    p.dt_init = 1e-3;
    p.dt_max = 0.1;
    const auto s = constant_state(p, 0.1, 0.2);
    const RunResult r = run(p, profile_from_state(s, p));
    ASSERT_FALSE(r.aborted);
    EXPECT_EQ(sup_diff(r.final_state, s), 0.0);
    EXPECT_TRUE(detect_cls(r.final_state, p).empty());
    EXPECT_EQ(classify_run(s, r.final_state, p), RunClass::Stationary);
}

TEST(Simulator, StationaryResidual) {
    auto p = small_params();
    p.potential.eps = 0.01;
    const auto s = constant_state(p, 0.1, 0.2);
    const Profile prof = profile_from_state(s, p);
    EXPECT_NEAR(stationary_residual(prof, pi_eps(p.potential, 0.2), pi_eps(p.potential, 0.1), p), 0.0, 1e-12);

    // Bulk residual of a sampled lens is O(eps).
    CompositeSpec spec;
    spec.kind = Kind::Lens;
    spec.sigma = 0.2;
    spec.h1_m = 0.4;
    spec.h_m = 0.2;
    const auto sol = build(spec);
    auto lens_res = [&](double eps) {
        SimParams q;
        q.sigma = 0.2;
        q.L = 2.0;
        q.potential.eps = eps;
        q.N = static_cast<int>(std::lround(16 * q.L / eps)) + 1;
        return stationary_residual(sample_profile(sol, q.potential, q.N, true), *sol.lambda1_0, *sol.lambda2_0, q);
    };
    const double r1 = lens_res(0.01), r2 = lens_res(0.005);
    EXPECT_LT(r1, 10 * 0.01);
    const double ratio = r1 / r2;
    EXPECT_GE(ratio, 1.5);
    EXPECT_LE(ratio, 2.5);
}

TEST(Simulator, DetectsContactLines) {
    auto p = small_params(201);
    p.potential.eps = 0.01;
    SimState s = constant_state(p, 0.01, 0.01);
    for (int i = 0; i < p.N; ++i) {
        const double x = -p.L + i * p.dx();
        if (x > -0.6 && x < -0.4) s.h[i] = 0.2;
    }
    const auto cls = detect_cls(s, p);
    ASSERT_EQ(cls.size(), 2u);
    EXPECT_EQ(cls[0].layer, 1);
    EXPECT_GT(cls[0].x, -0.61);
    EXPECT_LT(cls[0].x, -0.59);
    EXPECT_GT(cls[1].x, -0.41);
    EXPECT_LT(cls[1].x, -0.39);
}

TEST(Simulator, ClassifiesRuns) {
    auto p = small_params(201);
    p.potential.eps = 0.01;
    SimState a = constant_state(p, 0.01, 0.01);
    auto bump = [&](SimState& s, double c, double w) {
        for (int i = 0; i < p.N; ++i) {
            const double x = -p.L + i * p.dx();
            if (std::abs(x - c) < w) s.h[i] = 0.2;
        }
    };
    SimState start = a, moved = a, merged = a;
    bump(start, -0.5, 0.1);
    bump(moved, -0.45, 0.1);
    bump(merged, -0.5, 0.1);
    bump(merged, -0.2, 0.05);
    EXPECT_EQ(classify_run(start, start, p), RunClass::Stationary);
    EXPECT_EQ(classify_run(start, moved, p), RunClass::Translating);
    EXPECT_EQ(classify_run(start, merged, p), RunClass::Coarsening);
}

TEST(Simulator, RejectsBadParameters) {
    auto p = small_params();
    p.N = 3;
    EXPECT_THROW(p.validate(), UsageError);
    p = small_params();
    p.dt_min = 1.0;
    p.dt_init = 0.5;
    EXPECT_THROW(p.validate(), UsageError);
    p = small_params();
    SimState bad = constant_state(p, 0.1, 0.2);
    bad.h[3] = -0.1;
    EXPECT_THROW(residual(bad, bad, 1e-3, p), std::exception);
}
