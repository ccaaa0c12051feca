#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bilayer/potential.hpp"

using namespace bilayer;

namespace {

PotentialParams make(int n, int l, double eps) {
    PotentialParams p;
    p.n = n;
    p.l = l;
    p.eps = eps;
    return p;
}

}  // namespace

TEST(Potential, PhiValues) {
    EXPECT_NEAR(phi(make(2, 3, 1.0), 1.0), -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(phi(make(2, 8, 1.0), 1.0), -0.375, 1e-15);
    EXPECT_LT(std::abs(phi(make(2, 3, 1.0), 1e6)), 1e-12);
}

TEST(Potential, PhiTailIsMonotone) {
    const auto p = make(2, 3, 1.0);
    double prev = phi(p, 1.0);
    for (double h = 1.1; h < 100.0; h *= 1.1) {
        const double v = phi(p, h);
        EXPECT_GT(v, prev);
        EXPECT_LT(v, 0.0);
        prev = v;
    }
}

TEST(Potential, PhiMinimumAtOne) {
    for (auto [n, l] : {std::pair{2, 3}, {2, 8}, {3, 9}}) {
        const auto p = make(n, l, 1.0);
        const double m = phi(p, 1.0);
        EXPECT_NEAR(m, 1.0 / l - 1.0 / n, 1e-15);
        for (double h = 0.3; h < 20.0; h += 0.01) EXPECT_GE(phi(p, h), m);
        EXPECT_LT(phi_deriv(p, 0.999), 0.0);
        EXPECT_GT(phi_deriv(p, 1.001), 0.0);
    }
}

TEST(Potential, PhiEps) {
    EXPECT_NEAR(phi_eps(make(2, 3, 0.01), 0.01, 0.01), -1.0 / 3.0, 1e-14);
    EXPECT_NEAR(phi_eps(make(2, 3, 1.0), 1.0, 2.0), -0.25, 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.005, 0.5);
    const auto p = make(2, 3, 0.01);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        EXPECT_EQ(phi_eps(p, a, b), phi_eps(p, b, a));
        EXPECT_GE(phi_eps(p, a, b), phi_eps(p, p.eps, p.eps));
    }
}

TEST(Potential, PiValuesAndSigns) {
    const auto p = make(2, 3, 0.01);
    EXPECT_NEAR(pi_eps(p, 0.01), 0.0, 1e-12);
    EXPECT_NEAR(pi_eps(p, 0.02), 6.25, 1e-12);
    EXPECT_GT(pi_eps(p, 0.015), 0.0);
    EXPECT_GT(pi_eps(p, 1.0), 0.0);
    EXPECT_LT(pi_eps(p, 0.005), 0.0);
}

TEST(Potential, PiIsScaledPhiDerivative) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 50.0);
    for (auto eps : {1.0, 0.01, 0.003}) {
        const auto p = make(2, 3, eps);
        for (int i = 0; i < 200; ++i) {
            const double h = u(rng) * eps;
            const double a = pi_eps(p, h);
            const double b = phi_deriv(p, h / eps) / eps;
            EXPECT_LE(std::abs(a - b), 1e-12 * std::max(std::abs(b), 1e-300)) << h;
        }
    }
}

TEST(Potential, PiDerivativeMatchesFiniteDifference) {
    const auto p = make(2, 3, 0.01);
    for (double f : {0.5, 1.0, 2.0, 3.0, 10.0}) {
        const double h = f * p.eps;
        const double d = 1e-6 * p.eps;
        const double fd = (pi_eps(p, h + d) - pi_eps(p, h - d)) / (2.0 * d);
        EXPECT_LE(std::abs(pi_eps_deriv(p, h) - fd), 1e-6 * std::abs(fd)) << f;
    }
    EXPECT_NEAR(pi_eps_deriv(make(2, 3, 1.0), 1.0), 1.0, 1e-14);
    // The maximum of Pi sits at h = eps (l+1)/(n+1) for (n, l) = (2, 3).
    EXPECT_LT(pi_eps_deriv(p, 1.4 * p.eps), 0.0);
    EXPECT_GT(pi_eps_deriv(p, 1.2 * p.eps), 0.0);
}

TEST(Potential, ExpansionNearEpsConvergesLinearly) {
    auto err = [](double eps) {
        const auto p = make(2, 3, eps);
        double m = 0.0;
        for (double u = -1.0; u <= 1.0; u += 0.01)
            m = std::max(m, std::abs(pi_eps(p, eps + eps * eps * u) - (p.l - p.n) * u));
        return m;
    };
    for (double eps : {0.01, 0.004}) {
        const double ratio = err(eps) / err(eps / 2.0);
        EXPECT_GE(ratio, 1.5) << eps;
        EXPECT_LE(ratio, 2.5) << eps;
    }
}

TEST(Potential, RejectsBadInput) {
    const auto p = make(2, 3, 0.01);
    EXPECT_THROW(phi(p, 0.0), DomainError);
    EXPECT_THROW(phi(p, -1.0), DomainError);
    EXPECT_THROW(pi_eps(p, 0.0), DomainError);
    EXPECT_THROW(pi_eps(p, 0.5 * kMinHeightFactor * p.eps), DomainError);
    EXPECT_THROW(phi_eps(p, 0.01, -0.01), DomainError);
    EXPECT_THROW(make(3, 3, 0.01).validate(), DomainError);
    EXPECT_THROW(make(1, 3, 0.01).validate(), DomainError);
    EXPECT_THROW(make(2, 3, 0.0).validate(), DomainError);
    EXPECT_NEAR(make(2, 3, 0.01).well_depth(), 1.0 / 6.0, 1e-15);
}
