#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bilayer/diagrams.hpp"

using namespace bilayer;

namespace {

constexpr double kW = 1.0 / 6.0;

DiagramConfig cfg_at(double sigma, double L = 2.0, int res = 200) {
    DiagramConfig c = DiagramConfig::around_symmetric_points(sigma, L, kW, res);
    return c;
}

double dist_to_segment(const DiagramPoint& p, const DiagramPoint& a, const DiagramPoint& b) {
    const double dx = b.h_max - a.h_max, dy = b.h1_max - a.h1_max;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.h_max - a.h_max) * dx + (p.h1_max - a.h1_max) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.h_max - (a.h_max + t * dx), p.h1_max - (a.h1_max + t * dy));
}

double dist_to_id(const std::vector<EDBoundary>& bs, int id, const DiagramPoint& p) {
    double best = INFINITY;
    for (const auto& b : bs)
        if (b.solution_id == id)
            for (std::size_t i = 1; i < b.points.size(); ++i)
                best = std::min(best, dist_to_segment(p, b.points[i - 1], b.points[i]));
    return best;
}

}  // namespace

TEST(Diagrams, SymmetricPointsAndPentagonConstant) {
    const auto c = cfg_at(0.2);
    const auto [I, II] = symmetric_points(c);
    EXPECT_NEAR(I.h1_max, 0.527046, 1e-6);
    EXPECT_EQ(I.h_max, 0.0);
    EXPECT_NEAR(II.h_max, 0.577350, 1e-6);
    EXPECT_EQ(II.h1_max, 0.0);
    EXPECT_NEAR(pentagon_constant(c), 0.258199, 1e-6);
    // Both points scale linearly with L, and I tends to the origin as sigma grows.
    const auto [I4, II4] = symmetric_points(cfg_at(0.2, 4.0));
    EXPECT_NEAR(I4.h1_max, 2.0 * I.h1_max, 1e-14);
    EXPECT_NEAR(II4.h_max, 2.0 * II.h_max, 1e-14);
    EXPECT_LT(symmetric_points(cfg_at(1e6)).first.h1_max, 1e-3);
    EXPECT_NEAR(symmetric_points(cfg_at(1e6)).second.h_max, II.h_max, 1e-14);
}

TEST(Diagrams, MembershipExamples) {
    DiagramConfig c;
    c.sigma = 0.2;
    c.L = 2.0;
    EXPECT_TRUE(ed_membership(Kind::Lens, 0.2, 0.4, c));

    // Upper merge line of the zig-zag pentagon meets hbar = sqrt(sigma+1) here.
    const double rt = std::sqrt(1.2);
    const double v1 = c.L * std::sqrt(0.2 * kW / 2.0) / (2.0 * (1.2 + rt));
    EXPECT_NEAR(v1, 0.056241, 1e-6);
    EXPECT_NEAR(rt * v1, 0.061610, 1e-6);
    EXPECT_FALSE(ed_membership(Kind::ZigZag, rt * v1, v1, c));
    EXPECT_FALSE(ed_membership(Kind::ZigZag, 0.999 * rt * v1, 0.999 * v1, c));
    EXPECT_TRUE(ed_membership(Kind::ZigZag, 1.001 * rt * v1, 1.001 * v1, c));

    // Two drops: sqrt(2/w) (h + sqrt(sigma+1) h1) = L.
    const double h1 = 0.2, h = c.L / std::sqrt(2.0 / kW) - rt * h1;
    EXPECT_FALSE(ed_membership(Kind::TwoDrops, h, h1, c));
    EXPECT_FALSE(ed_membership(Kind::TwoDrops, 1.001 * h, 1.001 * h1, c));
    EXPECT_TRUE(ed_membership(Kind::TwoDrops, 0.9 * h, 0.9 * h1, c));
    EXPECT_FALSE(ed_membership(Kind::Lens, 0.0, 0.4, c));
}

TEST(Diagrams, ReflectionMapsPointsAndIds) {
    for (double sigma : {0.2, 1.0, 9.0}) {
        const auto c = cfg_at(sigma);
        const auto [I, II] = symmetric_points(c);
        const DiagramPoint r = reflect(I, sigma);
        EXPECT_NEAR(r.h_max, II.h_max, 1e-14);
        EXPECT_NEAR(r.h1_max, 0.0, 1e-14);
        const DiagramPoint back = reflect(r, sigma);
        EXPECT_NEAR(back.h1_max, I.h1_max, 1e-14);
        const DiagramPoint fixed{std::sqrt(sigma + 1.0) * 0.3, 0.3};
        EXPECT_NEAR(reflect(fixed, sigma).h_max, fixed.h_max, 1e-14);
        EXPECT_NEAR(reflect(fixed, sigma).h1_max, fixed.h1_max, 1e-14);
    }
    for (int id = 1; id <= 11; ++id) EXPECT_EQ(reflected_id(reflected_id(id)), id);
    EXPECT_EQ(reflected_id(5), 5);
    EXPECT_EQ(reflected_id(1), 2);
    EXPECT_EQ(reflected_id(10), 11);
}

TEST(Diagrams, PentagonMapsToItself) {
    const double sigma = 0.2;
    const auto c = cfg_at(sigma, 2.0, 60);
    const auto g = membership_grid(c);
    long agree = 0, total = 0;
    for (std::size_t i1 = 0; i1 < g.h1_max.size(); ++i1)
        for (std::size_t i = 0; i < g.h_max.size(); ++i) {
            if (!g.at(4, i1, i)) continue;
            const DiagramPoint r = reflect({g.h_max[i], g.h1_max[i1]}, sigma);
            ++total;
            if (ed_membership(Kind::ZigZag, r.h_max, r.h1_max, c)) ++agree;
        }
    ASSERT_GT(total, 20);
    EXPECT_GE(static_cast<double>(agree) / total, 0.9);
}

TEST(Diagrams, ReflectCheckHasNoInteriorViolationsAtSigmaOne) {
    const auto rep = reflect_check(cfg_at(1.0, 2.0, 200));
    EXPECT_EQ(rep.violations, 0);
    EXPECT_GT(rep.checked, 10000);
}

TEST(Diagrams, MembershipIsScaleInvariantInL) {
    const auto c5 = cfg_at(0.2, 5.0);
    const auto g = membership_grid(cfg_at(0.2, 2.0, 30));
    for (std::size_t k = 0; k < g.kinds.size(); ++k)
        for (std::size_t i1 = 1; i1 < g.h1_max.size(); i1 += 3)
            for (std::size_t i = 1; i < g.h_max.size(); i += 3)
                EXPECT_EQ(ed_membership(g.kinds[k], 2.5 * g.h_max[i], 2.5 * g.h1_max[i1], c5), g.at(k, i1, i))
                    << kind_name(g.kinds[k]) << " " << g.h_max[i] << " " << g.h1_max[i1];
}

TEST(Diagrams, CrossingABoundaryFlipsMembership) {
    for (double sigma : {0.2, 1.0, 9.0}) {
        const auto c = cfg_at(sigma);
        const double scale = std::hypot(c.h_max_range.second, c.h1_max_range.second);
        const double d = 1e-4 * scale;
        int probes = 0, flips = 0;
        for (const auto& b : ed_boundaries(c)) {
            const Kind k = kind_from_solution_id(b.solution_id);
            const std::size_t n = b.points.size();
            for (double f : {0.3, 0.5, 0.7}) {
                const std::size_t i = std::max<std::size_t>(1, static_cast<std::size_t>(f * (n - 1)));
                const auto& a = b.points[i - 1];
                const auto& e = b.points[i];
                const double tx = e.h_max - a.h_max, ty = e.h1_max - a.h1_max, tl = std::hypot(tx, ty);
                if (tl == 0.0) continue;
                const double mx = 0.5 * (a.h_max + e.h_max), my = 0.5 * (a.h1_max + e.h1_max);
                const double nx = -ty / tl * d, ny = tx / tl * d;
                if (mx - std::abs(nx) <= 0.0 || my - std::abs(ny) <= 0.0) continue;
                ++probes;
                if (ed_membership(k, mx + nx, my + ny, c) != ed_membership(k, mx - nx, my - ny, c)) ++flips;
                else ADD_FAILURE() << "sigma=" << sigma << " id=" << b.solution_id << " seg=" << b.segment
                                   << " at (" << mx << ", " << my << ")";
            }
        }
        EXPECT_GT(probes, 30) << sigma;
        EXPECT_EQ(flips, probes) << sigma;
    }
}

TEST(Diagrams, SharedPointsAtSigmaOne) {
    const auto c = cfg_at(1.0, 2.0, 400);
    const auto bs = ed_boundaries(c);
    const DiagramPoint p1{0.239146, 0.239146};
    for (int id : {2, 8, 11}) EXPECT_LE(dist_to_id(bs, id, p1), 2e-3) << id;
    const DiagramPoint p2{0.577350, 0.577350};
    for (int id : {2, 4, 5}) EXPECT_LE(dist_to_id(bs, id, p2), 2e-3) << id;
}

TEST(Diagrams, TwoSideSessileZigZagMatchesClosedCurve) {
    // Boundary curve in parameter heights, mapped to maxima.
    const double sigma = 1.0, L = 2.0;
    DiagramConfig c;
    c.sigma = sigma;
    c.L = L;
    const double Lt = L * std::sqrt(kW / 2.0);
    const double rs = std::sqrt(sigma + 1.0);
    for (double hb : {0.05, 0.5, 1.5, 3.0, 10.0}) {
        const double br = hb + rs +
                          (-rs * std::sqrt(sigma * hb * hb + (hb - sigma - 1.0) * (hb - sigma - 1.0)) +
                           hb * std::sqrt(sigma + (hb - 1.0) * (hb - 1.0))) /
                              (hb - sigma - 1.0);
        const double h1m = Lt / br;
        const HeightPair m = maxima_two_side(sigma, h1m, hb * h1m);
        EXPECT_TRUE(ed_membership(Kind::TwoSideSessileZigZag, m.h * (1 - 1e-3), m.h1 * (1 - 1e-3), c)) << hb;
        EXPECT_FALSE(ed_membership(Kind::TwoSideSessileZigZag, m.h * (1 + 1e-3), m.h1 * (1 + 1e-3), c)) << hb;
    }
}

TEST(Diagrams, SectorLinesForLargeSigma) {
    const auto c = cfg_at(9.0);
    const auto bs = ed_boundaries(c);
    for (int id : {6, 7}) {
        bool found = false;
        for (const auto& b : bs) {
            if (b.solution_id != id || b.curve_kind != CurveKind::Line) continue;
            const auto& a = b.points.front();
            const auto& e = b.points.back();
            if (std::hypot(a.h_max, a.h1_max) > 1e-9) continue;
            found = true;
            const double ratio = e.h_max / e.h1_max;
            // Sessile lens: hbar = (sigma+1)/(sqrt(sigma)-1); sessile internal drop: sqrt(sigma)-1.
            EXPECT_NEAR(ratio, id == 6 ? 5.0 : 2.0, 1e-3);
        }
        EXPECT_TRUE(found) << id;
    }
    for (const auto& b : bs) {
        const auto& a = b.points.front();
        const auto& e = b.points.back();
        EXPECT_GT(std::hypot(e.h_max - a.h_max, e.h1_max - a.h1_max), 0.0) << b.solution_id;
    }
}

TEST(Diagrams, CsvWriters) {
    const auto c = cfg_at(0.2, 2.0, 10);
    std::ostringstream m, b;
    write_membership_csv(m, membership_grid(c));
    write_boundary_csv(b, ed_boundaries(c));
    EXPECT_NE(m.str().find('\n'), std::string::npos);
    EXPECT_NE(b.str().find('\n'), std::string::npos);
}

TEST(Diagrams, RejectsBadConfig) {
    DiagramConfig c;
    c.h_max_range = {0.5, 0.4};
    EXPECT_THROW(membership_grid(c), UsageError);
    c = DiagramConfig{};
    c.sigma = -1.0;
    EXPECT_THROW(ed_boundaries(c), UsageError);
    EXPECT_THROW(reflect_check(cfg_at(1.0, 2.0, 20)), UsageError);
}
