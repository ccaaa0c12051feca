#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bilayer/chain.hpp"
#include "bilayer/config.hpp"

using namespace bilayer;

TEST(Chain, ParsesShortcuts) {
    const ChainExpr zz = parse_chain("(1-0)");
    ASSERT_EQ(zz.blocks.size(), 2u);
    EXPECT_EQ(zz.blocks[0], (ChainBlock{1, true}));
    EXPECT_EQ(zz.blocks[1], (ChainBlock{0, false}));
    EXPECT_EQ(parse_chain("(2-0-13)").blocks.size(), 4u);
    const ChainExpr plus = parse_chain("(1-0+0-)");
    ASSERT_EQ(plus.blocks.size(), 3u);
    EXPECT_FALSE(plus.blocks[1].inverted);
    EXPECT_TRUE(plus.blocks[2].inverted);
}

TEST(Chain, RoundTripsThroughFormatter) {
    for (const char* t : {"(2-0-11-02)", "(3-1-00-13)", "(1-0+0-)", "(0)", "(2-0-02)"}) {
        const ChainExpr c = parse_chain(t);
        EXPECT_EQ(parse_chain(format_chain(c)), c) << t;
    }
}

TEST(Chain, ReportsErrorPositions) {
    try {
        parse_chain("(4)");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position, 1u);
    }
    for (const char* bad : {"", "()", "(1", "1-0", "(1--0)", "(1-0)x", "(a)"})
        EXPECT_THROW(parse_chain(bad), ParseError) << bad;
}

TEST(Chain, DigitKinds) {
    EXPECT_EQ(chain_digit_kind(0), Kind::Lens);
    EXPECT_EQ(chain_digit_kind(1), Kind::InternalDrop);
    EXPECT_EQ(chain_digit_kind(2), Kind::H1Drop);
    EXPECT_EQ(chain_digit_kind(3), Kind::HDrop);
}

TEST(Chain, SymmetricChainGivesSymmetricProfile) {
    PotentialParams p;
    p.eps = 0.005;
    const int n = 1601;
    const Profile prof = assemble_chain(parse_chain("(2-0-02)"), p, 1.2, 2.0, {{0.08, 0.15}}, n);
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(prof.h1[i], prof.h1[n - 1 - i], 1e-10) << i;
        EXPECT_NEAR(prof.h[i], prof.h[n - 1 - i], 1e-10) << i;
    }
}

TEST(Chain, SingleLensIsMirroredLens) {
    PotentialParams p;
    p.eps = 0.01;
    CompositeSpec spec;
    spec.kind = Kind::Lens;
    spec.h1_m = 0.4;
    spec.h_m = 0.2;
    const Profile a = assemble_chain(parse_chain("(0)"), p, 0.2, 2.0, {{0.4, 0.2}}, 801);
    const Profile b = sample_profile(mirrored(build(spec)), p, 801, true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a.h1[i], b.h1[i], 1e-12);
        EXPECT_NEAR(a.h[i], b.h[i], 1e-12);
    }
}

TEST(Chain, FootprintOverflowIsReported) {
    PotentialParams p;
    EXPECT_THROW(layout_chain(parse_chain("(0000)"), 0.2, p.well_depth(), 0.5, {{0.4, 0.2}}), LayoutError);
    try {
        layout_chain(parse_chain("(0000)"), 0.2, p.well_depth(), 0.5, {{0.4, 0.2}});
    } catch (const LayoutError& e) {
        EXPECT_NE(std::string(e.what()).find("0.28"), std::string::npos) << e.what();
    }
}

TEST(Chain, LayoutCoversInterval) {
    PotentialParams p;
    const auto lay = layout_chain(parse_chain("(2-0-11-02)"), 0.2, p.well_depth(), 12.0, {{0.45, 0.5}});
    ASSERT_EQ(lay.starts.size(), 6u);
    EXPECT_NEAR(lay.starts.front(), -12.0, 1e-12);
    EXPECT_NEAR(lay.starts.back() + lay.lengths.back(), 0.0, 1e-12);
    for (std::size_t i = 1; i < lay.starts.size(); ++i)
        EXPECT_NEAR(lay.starts[i], lay.starts[i - 1] + lay.lengths[i - 1], 1e-12);
}

TEST(Config, KeyValueFormat) {
    std::istringstream is("# comment\nsigma = 0.2\nL: 2   # trailing\n\nkind = \"lens\"\n");
    const auto e = parse_config(is);
    ASSERT_EQ(e.size(), 3u);
    EXPECT_EQ(e[0].key, "sigma");
    EXPECT_EQ(e[0].values.at(0), "0.2");
    EXPECT_EQ(e[0].line, 2);
    EXPECT_EQ(e[1].values.at(0), "2");
    EXPECT_EQ(e[2].values.at(0), "lens");
}

TEST(Config, JsonFormat) {
    std::istringstream is(R"({"sigma": 0.2, "kind": "lens", "inverted": true, "nl": [2, 3]})");
    const auto e = parse_config(is);
    ASSERT_EQ(e.size(), 4u);
    for (const auto& x : e) {
        if (x.key == "sigma") EXPECT_DOUBLE_EQ(std::stod(x.values.at(0)), 0.2);
        if (x.key == "inverted") EXPECT_EQ(x.values.at(0), "true");
        if (x.key == "nl") EXPECT_EQ(x.values, (std::vector<std::string>{"2", "3"}));
    }
}

TEST(Config, RejectsMalformedInput) {
    std::istringstream dup("a = 1\na = 2\n");
    EXPECT_THROW(parse_config(dup), UsageError);
    std::istringstream nested(R"({"a": {"b": 1}})");
    EXPECT_THROW(parse_config(nested), UsageError);
    std::istringstream noeq("just words\n");
    EXPECT_THROW(parse_config(noeq), UsageError);
    std::istringstream badjson("{\"a\": }");
    EXPECT_THROW(parse_config(badjson), UsageError);
    EXPECT_THROW(read_config_file("/nonexistent/file.cfg"), UsageError);
}

TEST(Config, UnknownKeys) {
    std::istringstream is("sigma = 1\nbogus = 2\n");
    const auto e = parse_config(is);
    EXPECT_NO_THROW(reject_unknown_keys(e, {"sigma", "bogus"}));
    try {
        reject_unknown_keys(e, {"sigma"});
        FAIL();
    } catch (const UsageError& err) {
        EXPECT_NE(std::string(err.what()).find("bogus"), std::string::npos);
    }
}

TEST(Profile, AntisymmetricSeedIsOddAndMassNeutral) {
    PotentialParams p;
    p.eps = 0.005;
    const int n = 801;
    const Profile base = assemble_chain(parse_chain("(2-0-02)"), p, 1.2, 2.0, {{0.08, 0.15}}, n);
    Profile seeded = base;
    perturb_antisymmetric(seeded, 1e-4);
    double dm1 = 0.0, dm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d1 = seeded.h1[i] - base.h1[i];
        const double d = seeded.h[i] - base.h[i];
        EXPECT_NEAR(d1, d, 1e-15);
        EXPECT_NEAR(d1, -(seeded.h1[n - 1 - i] - base.h1[n - 1 - i]), 1e-15) << i;
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        dm1 += w * d1;
        dm += w * d;
    }
    EXPECT_NEAR(seeded.h1.front() - base.h1.front(), 1e-4, 1e-15);
    EXPECT_NEAR(dm1, 0.0, 1e-15);
    EXPECT_NEAR(dm, 0.0, 1e-15);
    Profile broken = base;
    EXPECT_THROW(perturb_antisymmetric(broken, 1.0), UsageError);
}
