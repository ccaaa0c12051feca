#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bilayer/blocks.hpp"

using namespace bilayer;

namespace {

PotentialParams pot(double eps = 0.01) {
    PotentialParams p;
    p.eps = eps;
    return p;
}

double end_slope(const std::vector<InnerSample>& s) {
    const auto& a = s[s.size() - 2];
    const auto& b = s.back();
    return (b.h - a.h) / (b.z - a.z);
}

}  // namespace

TEST(Blocks, BulkCoefficients) {
    const double l1 = 0.7, l2 = 0.3, s = 0.4;
    EXPECT_DOUBLE_EQ(bulk_coeff(BulkKind::TypeI_h1, l1, l2, s), (l1 - l2) / (2 * s));
    EXPECT_DOUBLE_EQ(bulk_coeff(BulkKind::TypeI_h, l1, l2, s), (l2 - (s + 1) * l1) / (2 * s));
    EXPECT_DOUBLE_EQ(bulk_coeff(BulkKind::TypeII_h1, l1, l2, s), -l2 / (2 * (s + 1)));
    EXPECT_DOUBLE_EQ(bulk_coeff(BulkKind::TypeIII_h, l1, l2, s), -l1 / 2);
}

TEST(Blocks, BulkPieceReproducesItsQuadratic) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double c = u(rng), x0 = u(rng), v = u(rng), sl = u(rng);
        const BulkPiece b = BulkPiece::anchored(BulkKind::TypeI_h1, c, x0, v, sl);
        EXPECT_NEAR(b.value(x0), v, 1e-12);
        EXPECT_NEAR(b.derivative(x0), sl, 1e-12);
        for (double x = -2.0; x <= 2.0; x += 0.25) {
            const double d = x - x0;
            EXPECT_NEAR(b.value(x), v + sl * d + c * d * d, 1e-11);
        }
    }
    const BulkPiece line = BulkPiece::anchored(BulkKind::TypeIII_h, 0.0, 1.0, 2.0, -0.5);
    EXPECT_DOUBLE_EQ(line.value(3.0), 1.0);
}

TEST(Blocks, ContactAngles) {
    const double w = 1.0 / 6.0;
    EXPECT_NEAR(contact_angle(CLType::III, 0.2, w), 0.527046276694730, 1e-12);
    EXPECT_NEAR(contact_angle(CLType::IV, 0.2, w), std::sqrt(1.0 / 3.0), 1e-14);
    EXPECT_NEAR(contact_angle(CLType::IV, 7.0, w), std::sqrt(1.0 / 3.0), 1e-14);
    EXPECT_NEAR(contact_angle(CLType::I, 0.2, w), 1.290994448735806, 1e-12);
    EXPECT_NEAR(contact_angle(CLType::II, 0.2, w), std::sqrt(2 * 1.2 * w / 0.2), 1e-14);
    for (double s : {0.2, 1.0, 9.0})
        EXPECT_NEAR(contact_angle(CLType::II, s, w) / contact_angle(CLType::I, s, w), std::sqrt(s + 1), 1e-13);
    EXPECT_THROW(cl_type_from_string("V"), UsageError);
    EXPECT_EQ(cl_type_from_string(to_string(CLType::III)), CLType::III);
}

TEST(Blocks, UtfFloors) {
    const auto p = pot();
    const UTFFloor f0 = utf_floor(0.0, 0.0, 0.2, p);
    EXPECT_DOUBLE_EQ(f0.h1_floor, p.eps);
    EXPECT_DOUBLE_EQ(f0.h_floor, p.eps);
    EXPECT_NEAR(utf_floor(1.0, 0.0, 0.2, p).h_floor, 0.0101, 1e-15);
    double prev1 = 0.0, prev2 = 0.0;
    for (double lam = -1.0; lam <= 3.0; lam += 0.5) {
        const UTFFloor f = utf_floor(lam, lam, 0.2, p);
        EXPECT_GT(f.h_floor, prev1);
        EXPECT_GT(f.h1_floor, prev2);
        prev1 = f.h_floor;
        prev2 = f.h1_floor;
    }
}

TEST(Blocks, InnerProfileShape) {
    const auto p = pot();
    for (CLType t : {CLType::I, CLType::II, CLType::III, CLType::IV}) {
        for (double sigma : {0.2, 1.2}) {
            // The slope approaches the angle like sqrt(1 - phi(h)/phi(1)); by |z| = 60 the gap is well under 1%.
            const auto s = cl_inner_profile(t, sigma, p, 60.0, 12001);
            const double angle = contact_angle(t, sigma, p.well_depth());
            EXPECT_NEAR(s.front().h, 1.0, 1e-3) << to_string(t);
            EXPECT_LE(std::abs(end_slope(s) - angle), 0.01 * angle) << to_string(t) << " sigma=" << sigma;
            for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i].h, s[i - 1].h) << to_string(t);
        }
    }
}

TEST(Blocks, InnerProfileRefinementReducesSlopeError) {
    const auto p = pot();
    for (CLType t : {CLType::I, CLType::II}) {
        const double angle = contact_angle(t, 0.2, p.well_depth());
        const double e10 = std::abs(end_slope(cl_inner_profile(t, 0.2, p, 10.0, 2001)) - angle);
        const double e20 = std::abs(end_slope(cl_inner_profile(t, 0.2, p, 20.0, 4001)) - angle);
        EXPECT_LT(e20, e10) << to_string(t);
    }
}

TEST(Blocks, InnerProfileSlopeRatioTypeIIOverTypeI) {
    const auto p = pot();
    for (double sigma : {0.2, 1.0, 3.0}) {
        const double r = end_slope(cl_inner_profile(CLType::II, sigma, p, 60.0, 12001)) /
                         end_slope(cl_inner_profile(CLType::I, sigma, p, 60.0, 12001));
        EXPECT_NEAR(r, std::sqrt(sigma + 1.0), 0.01 * std::sqrt(sigma + 1.0)) << sigma;
    }
}

TEST(Blocks, CompanionLayerDecays) {
    const auto p = pot();
    const InnerTable iii(CLType::III, 0.2, p);
    const InnerTable i(CLType::I, 0.2, p);
    EXPECT_EQ(i.companion(0.0), 0.0);
    EXPECT_LT(std::abs(iii.companion(-50.0)), 1e-3);
    EXPECT_LT(std::abs(iii.companion(iii.z_max())), 1e-3);
}

TEST(Blocks, InnerProfileRejectsNarrowWindow) {
    EXPECT_THROW(cl_inner_profile(CLType::I, 0.2, pot(), 4.0), UsageError);
}
