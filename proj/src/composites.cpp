#include "bilayer/composites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bilayer {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Lens: return "lens";
        case Kind::InternalDrop: return "internal_drop";
        case Kind::H1Drop: return "h1drop";
        case Kind::HDrop: return "hdrop";
        case Kind::ZigZag: return "zigzag";
        case Kind::SessileLens: return "sessile_lens";
        case Kind::SessileInternalDrop: return "sessile_internal_drop";
        case Kind::TwoDrops: return "two_drops";
        case Kind::TwoSideSessileZigZag: return "two_side_sessile_zigzag";
        case Kind::H1SessileZigZag: return "h1_sessile_zigzag";
        case Kind::HSessileZigZag: return "h_sessile_zigzag";
        case Kind::LensOnZigZag: return "lens_on_zigzag";
    }
    return "?";
}

Kind kind_from_string(const std::string& s) {
    for (Kind k : kAllKinds)
        if (s == kind_name(k)) return k;
    throw UsageError("unknown solution kind '" + s + "'");
}

int solution_id(Kind k) {
    switch (k) {
        case Kind::Lens: return 1;
        case Kind::InternalDrop: return 2;
        case Kind::H1Drop: return 3;
        case Kind::HDrop: return 4;
        case Kind::ZigZag: return 5;
        case Kind::SessileLens: return 6;
        case Kind::SessileInternalDrop: return 7;
        case Kind::TwoDrops: return 8;
        case Kind::TwoSideSessileZigZag: return 9;
        case Kind::H1SessileZigZag: return 10;
        case Kind::HSessileZigZag: return 11;
        case Kind::LensOnZigZag: return 0;
    }
    return 0;
}

Kind kind_from_solution_id(int id) {
    for (Kind k : kAllKinds)
        if (solution_id(k) == id && id != 0) return k;
    throw UsageError("no solution with id " + std::to_string(id));
}

bool ConstraintReport::ok() const {
    return std::all_of(items.begin(), items.end(), [](const Constraint& c) { return c.satisfied(); });
}

const Constraint* ConstraintReport::first_violation() const {
    for (const auto& c : items)
        if (!c.satisfied()) return &c;
    return nullptr;
}

std::string ConstraintReport::to_text() const {
    std::string out;
    for (const auto& c : items) out += c.id + "=" + format_double(c.margin) + "\n";
    return out;
}

double LeadingOrderSolution::h1_at(double x) const {
    for (auto it = h1_segments.rbegin(); it != h1_segments.rend(); ++it)
        if (x >= it->x0) return it->utf ? 0.0 : it->piece.value(x);
    return h1_segments.empty() || h1_segments.front().utf ? 0.0 : h1_segments.front().piece.value(x);
}

double LeadingOrderSolution::h_at(double x) const {
    for (auto it = h_segments.rbegin(); it != h_segments.rend(); ++it)
        if (x >= it->x0) return it->utf ? 0.0 : it->piece.value(x);
    return h_segments.empty() || h_segments.front().utf ? 0.0 : h_segments.front().piece.value(x);
}

bool LeadingOrderSolution::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::vector<double> LeadingOrderSolution::cl_distances() const {
    std::vector<double> out;
    for (const char* name : {"s", "s1", "s2", "s3"}) {
        auto it = constants.find(name);
        if (it != constants.end()) out.push_back(it->second);
    }
    return out;
}

namespace {

constexpr double kGuard = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Model parameters with the derived slope constants.
struct Ctx {
    double sg, L, p, h1m, hm;
    double k1, k2, k3, k4, kj;  // type I, II, III, IV angles; h1 slope jump at type II CLs

    explicit Ctx(const CompositeSpec& s)
        : sg(s.sigma), L(s.L), p(s.well_depth), h1m(s.h1_m), hm(s.h_m) {
        k1 = std::sqrt(2.0 * p / sg);
        k2 = std::sqrt(2.0 * (sg + 1.0) * p / sg);
        k3 = std::sqrt(2.0 * p / (sg + 1.0));
        k4 = std::sqrt(2.0 * p);
        kj = std::sqrt(2.0 * p / (sg * (sg + 1.0)));
    }
    double hbar() const { return hm / h1m; }
    double a(double l1, double l2) const { return (l1 - l2) / (2.0 * sg); }
    double b(double l1, double l2) const { return (l2 - (sg + 1.0) * l1) / (2.0 * sg); }
    double g(double l2) const { return -l2 / (2.0 * (sg + 1.0)); }
};

void check_model(const CompositeSpec& s) {
    if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) throw DomainError("sigma must be positive");
    if (!(s.L > 0.0) || !std::isfinite(s.L)) throw DomainError("L must be positive");
    if (!(s.well_depth > 0.0) || !std::isfinite(s.well_depth))
        throw DomainError("well_depth must be positive");
    if (s.shift && s.kind != Kind::TwoSideSessileZigZag)
        throw UsageError("shift is only meaningful for two_side_sessile_zigzag");
}

bool needs_h1(Kind k) { return k != Kind::HDrop; }
bool needs_h(Kind k) { return k != Kind::H1Drop; }

void check_heights(const CompositeSpec& s) {
    if (needs_h1(s.kind) && !(s.h1_m > 0.0)) throw DomainError("h1_m must be positive for this kind");
    if (needs_h(s.kind) && !(s.h_m > 0.0)) throw DomainError("h_m must be positive for this kind");
}

// Width d of a type I region, given the h1 height c at the far end, h1 vanishing
// at the near end with the type I angle: a d^2 + k1 d = c (stable positive root).
double type_one_width(double a, double k, double c) {
    const double disc = k * k + 4.0 * a * c;
    if (disc < 0.0) throw NumericError("type I region has no real width");
    return 2.0 * c / (k + std::sqrt(disc));
}

CLDescriptor make_cl(CLType t, double pos, Orientation o, const Ctx& c) {
    CLDescriptor d;
    d.cl_type = t;
    d.position = pos;
    d.orientation = o;
    const double angle = contact_angle(t, c.sg, c.p);
    d.slope_jump = o == Orientation::Rising ? angle : -angle;
    d.layer = (t == CLType::I || t == CLType::III) ? 0 : 1;
    return d;
}

Segment utf(double x0, double x1) { return Segment{x0, x1, true, BulkPiece{}}; }

Segment bulk(double x0, double x1, BulkPiece b) { return Segment{x0, x1, false, b}; }

BulkPiece vertex(BulkKind k, double coeff, double center, double offset) {
    BulkPiece b;
    b.kind = k;
    b.coeff = coeff;
    b.center = center;
    b.offset = offset;
    return b;
}

double segment_max(const Segment& s) {
    if (s.utf) return 0.0;
    double m = std::max(s.piece.value(s.x0), s.piece.value(s.x1));
    if (s.piece.coeff != 0.0) {
        const double xv = s.piece.center - s.piece.slope / (2.0 * s.piece.coeff);
        if (xv > s.x0 && xv < s.x1) m = std::max(m, s.piece.value(xv));
    }
    return m;
}

void finish(LeadingOrderSolution& sol) {
    sol.max_h1 = 0.0;
    sol.max_h = 0.0;
    for (const auto& s : sol.h1_segments) sol.max_h1 = std::max(sol.max_h1, segment_max(s));
    for (const auto& s : sol.h_segments) sol.max_h = std::max(sol.max_h, segment_max(s));
}

LeadingOrderSolution base(const CompositeSpec& spec) {
    LeadingOrderSolution sol;
    sol.spec = spec;
    sol.spec.inverted = false;
    return sol;
}

// One-CL blocks ----------------------------------------------------------------

LeadingOrderSolution compute_lens(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double l1 = c.p / c.hm, l2 = 0.0;
    const double s = c.hm * std::sqrt(2.0 * c.sg / ((c.sg + 1.0) * c.p));
    const double C1 = c.h1m - c.hm / (c.sg + 1.0);
    sol.lambda1_0 = l1;
    sol.lambda2_0 = l2;
    sol.constants = {{"lambda1", l1}, {"lambda2", l2}, {"s", s}, {"C", c.hm}, {"C1", C1},
                     {"C4", c.h1m}, {"C5", 0.0}, {"Ct1", c.h1m}};
    sol.cls = {make_cl(CLType::II, -s, Orientation::Rising, c)};
    sol.h1_segments = {bulk(-c.L, -s, vertex(BulkKind::TypeII_h1, c.g(l2), 0.0, c.h1m)),
                       bulk(-s, 0.0, vertex(BulkKind::TypeI_h1, c.a(l1, l2), 0.0, C1))};
    sol.h_segments = {utf(-c.L, -s), bulk(-s, 0.0, vertex(BulkKind::TypeI_h, c.b(l1, l2), 0.0, c.hm))};
    return sol;
}

LeadingOrderSolution compute_internal_drop(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double l1 = 0.0, l2 = c.p / c.h1m;
    const double s = c.h1m * std::sqrt(2.0 * c.sg / c.p);
    const double C = c.hm - c.h1m;
    sol.lambda1_0 = l1;
    sol.lambda2_0 = l2;
    sol.constants = {{"lambda1", l1}, {"lambda2", l2}, {"s", s}, {"C", C}, {"C1", c.h1m},
                     {"C2", c.hm}, {"C3", 0.0}, {"Ct", c.hm}};
    sol.cls = {make_cl(CLType::I, -s, Orientation::Rising, c)};
    sol.h1_segments = {utf(-c.L, -s), bulk(-s, 0.0, vertex(BulkKind::TypeI_h1, c.a(l1, l2), 0.0, c.h1m))};
    sol.h_segments = {bulk(-c.L, -s, vertex(BulkKind::TypeIII_h, -l1 / 2.0, 0.0, c.hm)),
                      bulk(-s, 0.0, vertex(BulkKind::TypeI_h, c.b(l1, l2), 0.0, C))};
    return sol;
}

LeadingOrderSolution compute_h1drop(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double l2 = c.p / c.h1m;
    const double s = c.L - c.h1m * std::sqrt(2.0 * (c.sg + 1.0) / c.p);
    sol.lambda2_0 = l2;
    sol.constants = {{"lambda2", l2}, {"s", s}, {"xt1", -c.L}, {"Ct1", c.h1m}};
    sol.cls = {make_cl(CLType::III, -s, Orientation::Falling, c)};
    sol.h1_segments = {bulk(-c.L, -s, vertex(BulkKind::TypeII_h1, c.g(l2), -c.L, c.h1m)), utf(-s, 0.0)};
    sol.h_segments = {utf(-c.L, 0.0)};
    return sol;
}

LeadingOrderSolution compute_hdrop(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double l1 = c.p / c.hm;
    const double s = c.L - c.hm * std::sqrt(2.0 / c.p);
    sol.lambda1_0 = l1;
    sol.constants = {{"lambda1", l1}, {"s", s}, {"xt", -c.L}, {"Ct", c.hm}};
    sol.cls = {make_cl(CLType::IV, -s, Orientation::Falling, c)};
    sol.h1_segments = {utf(-c.L, 0.0)};
    sol.h_segments = {bulk(-c.L, -s, vertex(BulkKind::TypeIII_h, -l1 / 2.0, -c.L, c.hm)), utf(-s, 0.0)};
    return sol;
}

// Zig-zag ------------------------------------------------------------------------

struct ZigZagCore {
    double l1, l2, s, s1, C2, C3, C4, C5;
    double a, b;
    bool linear_h1, linear_h;
};

ZigZagCore zigzag_core(const Ctx& c) {
    ZigZagCore z{};
    double hb = c.hbar();
    z.linear_h1 = std::abs(hb - 1.0) <= kGuard;
    z.linear_h = std::abs(hb - (c.sg + 1.0)) <= kGuard * (c.sg + 1.0);
    if (z.linear_h1) hb = 1.0;
    if (z.linear_h) hb = c.sg + 1.0;

    // Positive root of L^2 x^2 - 2 B x - 2 sigma |phi1| hbar = 0, cancellation-free.
    const double B = c.h1m * (hb - 1.0) * (hb - c.sg - 1.0);
    const double q = 2.0 * c.sg * c.p * hb;
    const double disc = std::sqrt(B * B + c.L * c.L * q);
    z.l2 = B >= 0.0 ? (B + disc) / (c.L * c.L) : q / (disc - B);
    z.l1 = z.l2 / hb;
    z.a = z.linear_h1 ? 0.0 : c.a(z.l1, z.l2);
    z.b = z.linear_h ? 0.0 : c.b(z.l1, z.l2);
    const double D = z.l2 - (c.sg + 1.0) * z.l1;
    const double E = z.l2 - z.l1;

    if (std::abs(hb - 1.0) <= std::abs(hb - c.sg - 1.0)) {
        // Away from the D = 0 degeneracy: s directly, then the type I width.
        z.s = (std::sqrt(2.0 * c.sg * (c.sg + 1.0) * c.p) - (c.sg + 1.0) * z.l1 * c.L) / D;
        z.C4 = c.g(z.l2) * z.s * z.s + c.h1m;
        z.s1 = z.s + type_one_width(z.a, c.k1, z.C4);
        z.C2 = -z.l1 / 2.0 * (c.L - z.s1) * (c.L - z.s1) + c.hm;
    } else {
        z.s1 = (std::sqrt(2.0 * c.sg * c.p) - z.l1 * c.L) / E;
        z.C2 = -z.l1 / 2.0 * (c.L - z.s1) * (c.L - z.s1) + c.hm;
        z.s = z.s1 - type_one_width(z.b, c.k2, z.C2);
        z.C4 = c.g(z.l2) * z.s * z.s + c.h1m;
    }
    z.C3 = -z.l1 * (c.L - z.s1);
    z.C5 = z.l2 * z.s / (c.sg + 1.0);
    return z;
}

// Type I region between x_left (where one layer vanishes rising) and x_right.
// Pieces anchored at their vanishing CLs so the linear limits need no special case.
void zigzag_constants(const Ctx& c, const ZigZagCore& z, std::map<std::string, double>& k) {
    k["lambda1"] = z.l1;
    k["lambda2"] = z.l2;
    k["C2"] = z.C2;
    k["C3"] = z.C3;
    k["C4"] = z.C4;
    k["C5"] = z.C5;
    k["xt"] = -c.L;
    k["Ct"] = c.hm;
    k["xt1"] = 0.0;
    k["Ct1"] = c.h1m;
    const double D = z.l2 - (c.sg + 1.0) * z.l1;
    const double E = z.l2 - z.l1;
    if (!z.linear_h && D != 0.0) {
        const double xc = z.l1 * c.L * (c.sg + 1.0) / D;
        k["xc"] = xc;
        k["C"] = z.C2 - z.b * (z.s1 + xc) * (z.s1 + xc);
    }
    if (!z.linear_h1 && E != 0.0) {
        const double xc1 = z.l1 * c.L / E;
        k["xc1"] = xc1;
        k["C1"] = -z.a * (z.s1 + xc1) * (z.s1 + xc1);
    }
}

LeadingOrderSolution compute_zigzag(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const ZigZagCore z = zigzag_core(c);
    sol.lambda1_0 = z.l1;
    sol.lambda2_0 = z.l2;
    zigzag_constants(c, z, sol.constants);
    sol.constants["s"] = z.s;
    sol.constants["s1"] = z.s1;
    if (z.linear_h1) sol.flags.push_back("linear_h1_segment");
    if (z.linear_h) sol.flags.push_back("linear_h_segment");
    sol.cls = {make_cl(CLType::I, -z.s1, Orientation::Rising, c),
               make_cl(CLType::II, -z.s, Orientation::Falling, c)};
    sol.h1_segments = {utf(-c.L, -z.s1),
                       bulk(-z.s1, -z.s, BulkPiece::anchored(BulkKind::TypeI_h1, z.a, -z.s1, 0.0, c.k1)),
                       bulk(-z.s, 0.0, vertex(BulkKind::TypeII_h1, c.g(z.l2), 0.0, c.h1m))};
    sol.h_segments = {bulk(-c.L, -z.s1, vertex(BulkKind::TypeIII_h, -z.l1 / 2.0, -c.L, c.hm)),
                      bulk(-z.s1, -z.s, BulkPiece::anchored(BulkKind::TypeI_h, z.b, -z.s, 0.0, -c.k2)),
                      utf(-z.s, 0.0)};
    return sol;
}

// Two-CL sessile solutions ------------------------------------------------------------

LeadingOrderSolution compute_sessile_lens(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double sg = c.sg, y = (sg + 1.0) * c.h1m;
    const double l2 = (sg + 1.0) * c.p / (y + c.hm);
    const double l1 = (y + 2.0 * c.hm) / (y + c.hm) * c.p / c.hm;
    const double s1 = c.L - c.hm * std::sqrt(2.0 * sg / ((sg + 1.0) * c.p));
    const double s = c.L - (y + c.hm) * std::sqrt(2.0 / ((sg + 1.0) * c.p));
    const double C4 = c.hm / (sg + 1.0) * ((1.0 - sg) * c.hm + y) / (y + c.hm) + c.h1m;
    const double Ct1 = c.p / l2;
    const double C5 = (l1 - l2) / sg * (c.L - s1) - c.kj;
    double a = c.a(l1, l2);
    if (sg > 1.0 && std::abs(c.hbar() - (sg + 1.0) / (sg - 1.0)) <= kGuard * (sg + 1.0) / (sg - 1.0)) {
        sol.flags.push_back("flat_h1_bulk");
        a = 0.0;
    }
    sol.lambda1_0 = l1;
    sol.lambda2_0 = l2;
    sol.constants = {{"lambda1", l1}, {"lambda2", l2}, {"s", s}, {"s1", s1}, {"xt1", -c.L},
                     {"xc", -c.L}, {"xc1", -c.L}, {"C4", C4}, {"C5", C5}, {"Ct1", Ct1},
                     {"C", c.hm}, {"C1", c.h1m}};
    sol.cls = {make_cl(CLType::II, -s1, Orientation::Falling, c),
               make_cl(CLType::III, -s, Orientation::Falling, c)};
    sol.h1_segments = {bulk(-c.L, -s1, vertex(BulkKind::TypeI_h1, a, -c.L, c.h1m)),
                       bulk(-s1, -s, vertex(BulkKind::TypeII_h1, c.g(l2), -c.L, Ct1)), utf(-s, 0.0)};
    sol.h_segments = {bulk(-c.L, -s1, vertex(BulkKind::TypeI_h, c.b(l1, l2), -c.L, c.hm)), utf(-s1, 0.0)};
    return sol;
}

LeadingOrderSolution compute_sessile_internal_drop(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double sg = c.sg;
    const double l1 = c.p / (c.h1m + c.hm);
    const double l2 = (c.hm + 2.0 * c.h1m) / (c.h1m + c.hm) * c.p / c.h1m;
    const double s1 = c.L - c.h1m * std::sqrt(2.0 * sg / c.p);
    const double s = c.L - (c.h1m + c.hm) * std::sqrt(2.0 / c.p);
    double b = c.b(l1, l2);
    if (sg > 1.0 && std::abs(c.hbar() - (sg - 1.0)) <= kGuard * (sg - 1.0)) {
        sol.flags.push_back("flat_h_bulk");
        b = 0.0;
    }
    const double C2 = b * (c.L - s1) * (c.L - s1) + c.hm;
    const double C3 = 2.0 * b * (c.L - s1) - c.k1;
    const double Ct0 = c.p / l1;
    sol.lambda1_0 = l1;
    sol.lambda2_0 = l2;
    sol.constants = {{"lambda1", l1}, {"lambda2", l2}, {"s", s}, {"s1", s1}, {"xt", -c.L},
                     {"xc", -c.L}, {"xc1", -c.L}, {"C2", C2}, {"C3", C3}, {"Ct0", Ct0},
                     {"C", c.hm}, {"C1", c.h1m}};
    sol.cls = {make_cl(CLType::I, -s1, Orientation::Falling, c),
               make_cl(CLType::IV, -s, Orientation::Falling, c)};
    sol.h1_segments = {bulk(-c.L, -s1, vertex(BulkKind::TypeI_h1, c.a(l1, l2), -c.L, c.h1m)), utf(-s1, 0.0)};
    sol.h_segments = {bulk(-c.L, -s1, vertex(BulkKind::TypeI_h, b, -c.L, c.hm)),
                      bulk(-s1, -s, vertex(BulkKind::TypeIII_h, -l1 / 2.0, -c.L, Ct0)), utf(-s, 0.0)};
    return sol;
}

LeadingOrderSolution compute_two_drops(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const double l1 = c.p / c.hm, l2 = c.p / c.h1m;
    const double s1 = c.L - std::sqrt(2.0 / c.p) * c.hm;
    const double s = std::sqrt(2.0 * (c.sg + 1.0) / c.p) * c.h1m;
    sol.lambda1_0 = l1;
    sol.lambda2_0 = l2;
    sol.constants = {{"lambda1", l1}, {"lambda2", l2}, {"s", s}, {"s1", s1},
                     {"xt", -c.L}, {"Ct", c.hm}, {"xt1", 0.0}, {"Ct1", c.h1m}};
    sol.cls = {make_cl(CLType::IV, -s1, Orientation::Falling, c),
               make_cl(CLType::III, -s, Orientation::Rising, c)};
    sol.h1_segments = {utf(-c.L, -s), bulk(-s, 0.0, vertex(BulkKind::TypeII_h1, c.g(l2), 0.0, c.h1m))};
    sol.h_segments = {bulk(-c.L, -s1, vertex(BulkKind::TypeIII_h, -l1 / 2.0, -c.L, c.hm)), utf(-s1, 0.0)};
    return sol;
}

// Sessile zig-zags ------------------------------------------------------------------------

struct SharedConstants {
    double l1, l2, D, C1, C, C2, C3, C4, C5;
};

SharedConstants shared_constants(const Ctx& c, double sign) {
    SharedConstants k{};
    k.l1 = c.p / c.hm;
    k.l2 = c.p / c.h1m;
    k.D = k.l2 - (c.sg + 1.0) * k.l1;
    k.C4 = two_side_C4(c.sg, c.h1m, c.hm);
    k.C2 = two_side_C2(c.sg, c.h1m, c.hm);
    k.C5 = sign * k.C4 * k.D / std::sqrt(2.0 * c.sg * (c.sg + 1.0) * c.p);
    k.C3 = sign * k.C2 * (k.l2 - k.l1) / std::sqrt(2.0 * c.sg * c.p);
    k.C1 = k.l2 != k.l1 ? c.p / (k.l2 - k.l1) : kInf;
    k.C = k.D != 0.0 ? -(c.sg + 1.0) * c.p / k.D : kInf;
    return k;
}

void store_shared(const SharedConstants& k, std::map<std::string, double>& m) {
    m["lambda1"] = k.l1;
    m["lambda2"] = k.l2;
    m["C2"] = k.C2;
    m["C3"] = k.C3;
    m["C4"] = k.C4;
    m["C5"] = k.C5;
    if (std::isfinite(k.C1)) m["C1"] = k.C1;
    if (std::isfinite(k.C)) m["C"] = k.C;
}

bool near_one(const Ctx& c) { return std::abs(c.hbar() - 1.0) <= kGuard; }
bool near_sp1(const Ctx& c) { return std::abs(c.hbar() - c.sg - 1.0) <= kGuard * (c.sg + 1.0); }

double limiting_shift(const Ctx& c) { return -c.k4 / (c.p / c.hm); }

LeadingOrderSolution compute_two_side(const CompositeSpec& spec, double xt) {
    const Ctx c(spec);
    auto sol = base(spec);
    const SharedConstants k = shared_constants(c, 1.0);
    const double a = near_one(c) ? 0.0 : c.a(k.l1, k.l2);
    const double b = near_sp1(c) ? 0.0 : c.b(k.l1, k.l2);
    const double s = -c.k4 / k.l1 - xt;
    const double s1 = k.C3 / k.l1 - xt;
    const double s2 = s1 + type_one_width(a, c.k1, k.C4);
    const double xt1 = (c.sg + 1.0) * k.C5 / k.l2 - s2;
    const double s3 = c.k3 * (c.sg + 1.0) / k.l2 - xt1;
    sol.lambda1_0 = k.l1;
    sol.lambda2_0 = k.l2;
    store_shared(k, sol.constants);
    sol.constants["s"] = s;
    sol.constants["s1"] = s1;
    sol.constants["s2"] = s2;
    sol.constants["s3"] = s3;
    sol.constants["xt"] = xt;
    sol.constants["xt1"] = xt1;
    if (k.D != 0.0 && b != 0.0) sol.constants["xc"] = -(std::sqrt(2.0 * c.sg * c.p) + c.sg * k.C3) / k.D - s1;
    if (k.l1 != k.l2 && a != 0.0) sol.constants["xc1"] = std::sqrt(2.0 * c.sg * c.p) / (k.l1 - k.l2) - s1;
    if (a == 0.0) sol.flags.push_back("linear_h1_segment");
    if (b == 0.0) sol.flags.push_back("linear_h_segment");
    sol.cls = {make_cl(CLType::III, -s3, Orientation::Rising, c), make_cl(CLType::II, -s2, Orientation::Rising, c),
               make_cl(CLType::I, -s1, Orientation::Falling, c), make_cl(CLType::IV, -s, Orientation::Falling, c)};
    sol.h1_segments = {utf(-c.L, -s3), bulk(-s3, -s2, vertex(BulkKind::TypeII_h1, c.g(k.l2), xt1, c.h1m)),
                       bulk(-s2, -s1, BulkPiece::anchored(BulkKind::TypeI_h1, a, -s1, 0.0, -c.k1)),
                       utf(-s1, 0.0)};
    sol.h_segments = {utf(-c.L, -s2), bulk(-s2, -s1, BulkPiece::anchored(BulkKind::TypeI_h, b, -s2, 0.0, c.k2)),
                      bulk(-s1, -s, vertex(BulkKind::TypeIII_h, -k.l1 / 2.0, xt, c.hm)), utf(-s, 0.0)};
    return sol;
}

// Shift that centres the four-CL structure when none is given.
double centred_shift(const Ctx& c, const CompositeSpec& spec) {
    const double xl = limiting_shift(c);
    const auto lim = compute_two_side(spec, xl);
    const double width = lim.constants.at("s3");  // s = 0 at the limiting shift
    return xl - 0.5 * (c.L - width);
}

LeadingOrderSolution compute_two_side_spec(const CompositeSpec& spec) {
    const Ctx c(spec);
    const double xt = spec.shift ? *spec.shift : centred_shift(c, spec);
    auto sol = compute_two_side(spec, xt);
    if (!spec.shift) sol.flags.push_back("centred_shift");
    sol.spec.shift = xt;
    return sol;
}

LeadingOrderSolution compute_h1_sessile(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const SharedConstants k = shared_constants(c, 1.0);
    const double a = near_one(c) ? 0.0 : c.a(k.l1, k.l2);
    const double b = c.b(k.l1, k.l2);
    const double s2 = (c.sg + 1.0) * k.C5 / k.l2 + c.L;
    const double s1 = s2 - type_one_width(a, c.k1, k.C4);
    const double xt = k.C3 / k.l1 - s1;
    const double s = -c.k4 / k.l1 - xt;
    sol.lambda1_0 = k.l1;
    sol.lambda2_0 = k.l2;
    store_shared(k, sol.constants);
    sol.constants["s"] = s;
    sol.constants["s1"] = s1;
    sol.constants["s2"] = s2;
    sol.constants["xt"] = xt;
    sol.constants["xt1"] = -c.L;
    if (k.D != 0.0) sol.constants["xc"] = -std::sqrt(2.0 * (c.sg + 1.0) * c.sg * c.p) / k.D - s2;
    if (k.l1 != k.l2 && a != 0.0)
        sol.constants["xc1"] = c.sg / (k.l1 - k.l2) * (c.kj - k.C5) - s2;
    if (a == 0.0) sol.flags.push_back("linear_h1_segment");
    sol.cls = {make_cl(CLType::II, -s2, Orientation::Rising, c), make_cl(CLType::I, -s1, Orientation::Falling, c),
               make_cl(CLType::IV, -s, Orientation::Falling, c)};
    sol.h1_segments = {bulk(-c.L, -s2, vertex(BulkKind::TypeII_h1, c.g(k.l2), -c.L, c.h1m)),
                       bulk(-s2, -s1, BulkPiece::anchored(BulkKind::TypeI_h1, a, -s1, 0.0, -c.k1)),
                       utf(-s1, 0.0)};
    sol.h_segments = {utf(-c.L, -s2), bulk(-s2, -s1, BulkPiece::anchored(BulkKind::TypeI_h, b, -s2, 0.0, c.k2)),
                      bulk(-s1, -s, vertex(BulkKind::TypeIII_h, -k.l1 / 2.0, xt, c.hm)), utf(-s, 0.0)};
    return sol;
}

LeadingOrderSolution compute_h_sessile(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const SharedConstants k = shared_constants(c, -1.0);
    const double a = c.a(k.l1, k.l2);
    const double b = near_sp1(c) ? 0.0 : c.b(k.l1, k.l2);
    const double s2 = k.C3 / k.l1 + c.L;
    const double s1 = s2 - type_one_width(a, c.k1, k.C4);
    const double xt1 = (c.sg + 1.0) * k.C5 / k.l2 - s1;
    const double s = -c.k3 * (c.sg + 1.0) / k.l2 - xt1;
    sol.lambda1_0 = k.l1;
    sol.lambda2_0 = k.l2;
    store_shared(k, sol.constants);
    sol.constants["s"] = s;
    sol.constants["s1"] = s1;
    sol.constants["s2"] = s2;
    sol.constants["xt"] = -c.L;
    sol.constants["xt1"] = xt1;
    if (k.D != 0.0 && b != 0.0) sol.constants["xc"] = (std::sqrt(2.0 * c.sg * c.p) - c.sg * k.C3) / k.D - s2;
    if (k.l1 != k.l2) sol.constants["xc1"] = -std::sqrt(2.0 * c.sg * c.p) / (k.l1 - k.l2) - s2;
    if (b == 0.0) sol.flags.push_back("linear_h_segment");
    sol.cls = {make_cl(CLType::I, -s2, Orientation::Rising, c), make_cl(CLType::II, -s1, Orientation::Falling, c),
               make_cl(CLType::III, -s, Orientation::Falling, c)};
    sol.h1_segments = {utf(-c.L, -s2), bulk(-s2, -s1, BulkPiece::anchored(BulkKind::TypeI_h1, a, -s2, 0.0, c.k1)),
                       bulk(-s1, -s, vertex(BulkKind::TypeII_h1, c.g(k.l2), xt1, c.h1m)), utf(-s, 0.0)};
    sol.h_segments = {bulk(-c.L, -s2, vertex(BulkKind::TypeIII_h, -k.l1 / 2.0, -c.L, c.hm)),
                      bulk(-s2, -s1, BulkPiece::anchored(BulkKind::TypeI_h, b, -s1, 0.0, -c.k2)),
                      utf(-s1, 0.0)};
    return sol;
}

// Lens resting on the h1 bulk of a zig-zag: chain 1-0+0-.
LeadingOrderSolution compute_lens_on_zigzag(const CompositeSpec& spec) {
    const Ctx c(spec);
    auto sol = base(spec);
    const ZigZagCore z = zigzag_core(c);
    const double D = z.l2 - (c.sg + 1.0) * z.l1;
    const double s = -std::sqrt(2.0 * (c.sg + 1.0) * c.sg * c.p) / D;
    const double Cl = -(c.sg + 1.0) * c.p / D;
    const double C1l = c.h1m + c.p / D;
    const double C4l = c.g(z.l2) * s * s + c.h1m;
    const double C5l = z.l2 * s / (c.sg + 1.0);
    sol.lambda1_0 = z.l1;
    sol.lambda2_0 = z.l2;
    std::map<std::string, double> zz;
    zigzag_constants(c, z, zz);
    sol.constants = zz;
    sol.constants["s2"] = z.s1;
    sol.constants["s1"] = z.s;
    sol.constants["s"] = s;
    sol.constants["Cl"] = Cl;
    sol.constants["C1l"] = C1l;
    sol.constants["C4l"] = C4l;
    sol.constants["C5l"] = C5l;
    if (z.linear_h1) sol.flags.push_back("linear_h1_segment");
    if (z.linear_h) sol.flags.push_back("linear_h_segment");
    sol.cls = {make_cl(CLType::I, -z.s1, Orientation::Rising, c), make_cl(CLType::II, -z.s, Orientation::Falling, c),
               make_cl(CLType::II, -s, Orientation::Rising, c)};
    sol.h1_segments = {utf(-c.L, -z.s1),
                       bulk(-z.s1, -z.s, BulkPiece::anchored(BulkKind::TypeI_h1, z.a, -z.s1, 0.0, c.k1)),
                       bulk(-z.s, -s, vertex(BulkKind::TypeII_h1, c.g(z.l2), 0.0, c.h1m)),
                       bulk(-s, 0.0, vertex(BulkKind::TypeI_h1, c.a(z.l1, z.l2), 0.0, C1l))};
    sol.h_segments = {bulk(-c.L, -z.s1, vertex(BulkKind::TypeIII_h, -z.l1 / 2.0, -c.L, c.hm)),
                      bulk(-z.s1, -z.s, BulkPiece::anchored(BulkKind::TypeI_h, z.b, -z.s, 0.0, -c.k2)),
                      utf(-z.s, -s), bulk(-s, 0.0, vertex(BulkKind::TypeI_h, c.b(z.l1, z.l2), 0.0, Cl))};
    return sol;
}

// Constraint reports ----------------------------------------------------------------------

void zigzag_margins(const Ctx& c, const std::string& prefix, ConstraintReport& r) {
    const double hb = c.hbar();
    const double rt = std::sqrt(c.sg + 1.0);
    const double F = std::sqrt(2.0) * c.h1m / std::sqrt(c.sg * c.p);
    if (hb <= rt)
        r.items.push_back({prefix + ".lower_merge_s1_to_L", c.L - F * (c.sg + 1.0 - hb)});
    else
        r.items.push_back({prefix + ".lower_merge_s_to_0", c.L - F * rt * (hb - 1.0)});
    r.items.push_back({prefix + ".upper_merge_s1_to_s", F * (rt + 1.0) * (hb + rt) - c.L});
}

double h1_sessile_min_length(const Ctx& c) {
    const SharedConstants k = shared_constants(c, 1.0);
    const double d = k.l1 - k.l2;
    return (2.0 * c.p * (c.sg * k.l1 + std::sqrt(c.sg) * k.l2) + k.C2 * d * d) /
           (std::sqrt(2.0 * c.sg * c.p) * k.l1 * k.l2);
}

double h_sessile_min_length(const Ctx& c) {
    const SharedConstants k = shared_constants(c, -1.0);
    return (2.0 * c.p * std::sqrt(c.sg) * ((c.sg + 1.0) * k.l1 + std::sqrt(c.sg) * k.l2) + k.C4 * k.D * k.D) /
           (std::sqrt(2.0 * c.sg * (c.sg + 1.0) * c.p) * k.l1 * k.l2);
}

ConstraintReport report_for(const CompositeSpec& spec) {
    const Ctx c(spec);
    ConstraintReport r;
    const double sg = c.sg;
    switch (spec.kind) {
        case Kind::Lens:
            r.items.push_back({"lens.length", c.L - c.hm * std::sqrt(2.0 * sg / ((sg + 1.0) * c.p))});
            r.items.push_back({"lens.C1", c.h1m - c.hm / (sg + 1.0)});
            break;
        case Kind::InternalDrop:
            r.items.push_back({"internal_drop.length", c.L - c.h1m * std::sqrt(2.0 * sg / c.p)});
            r.items.push_back({"internal_drop.C", c.hm - c.h1m});
            break;
        case Kind::H1Drop:
            r.items.push_back({"h1drop.s", c.L - c.h1m * std::sqrt(2.0 * (sg + 1.0) / c.p)});
            break;
        case Kind::HDrop:
            r.items.push_back({"hdrop.s", c.L - c.hm * std::sqrt(2.0 / c.p)});
            break;
        case Kind::ZigZag:
            zigzag_margins(c, "zigzag", r);
            break;
        case Kind::SessileLens:
            r.items.push_back({"sessile_lens.length",
                               c.L - ((sg + 1.0) * c.h1m + c.hm) * std::sqrt(2.0 / ((sg + 1.0) * c.p))});
            if (sg > 1.0)
                r.items.push_back({"sessile_lens.merge_s1_to_s", (sg + 1.0) / (std::sqrt(sg) - 1.0) - c.hbar()});
            break;
        case Kind::SessileInternalDrop:
            r.items.push_back({"sessile_internal_drop.length", c.L - (c.h1m + c.hm) * std::sqrt(2.0 / c.p)});
            if (sg > 1.0)
                r.items.push_back({"sessile_internal_drop.merge_s1_to_s", c.hbar() - (std::sqrt(sg) - 1.0)});
            break;
        case Kind::TwoDrops:
            r.items.push_back({"two_drops.length",
                               c.L - std::sqrt(2.0 / c.p) * (c.hm + std::sqrt(sg + 1.0) * c.h1m)});
            break;
        case Kind::TwoSideSessileZigZag: {
            const double xl = limiting_shift(c);
            if (spec.shift) {
                r.items.push_back({"two_side.shift", xl - *spec.shift});
                const auto sol = compute_two_side(spec, *spec.shift);
                r.items.push_back({"two_side.length", c.L - sol.constants.at("s3")});
            } else {
                const auto sol = compute_two_side(spec, xl);
                r.items.push_back({"two_side.length", c.L - sol.constants.at("s3")});
            }
            break;
        }
        case Kind::H1SessileZigZag:
            r.items.push_back({"h1_sessile.merge_s2_to_L", sg + 1.0 - c.hbar()});
            r.items.push_back({"h1_sessile.length", c.L - h1_sessile_min_length(c)});
            break;
        case Kind::HSessileZigZag:
            r.items.push_back({"h_sessile.merge_s2_to_L", c.hbar() - 1.0});
            r.items.push_back({"h_sessile.length", c.L - h_sessile_min_length(c)});
            break;
        case Kind::LensOnZigZag: {
            zigzag_margins(c, "lens_on_zigzag", r);
            const double hb = c.hbar();
            r.items.push_back({"lens_on_zigzag.lens_radius", sg + 1.0 - hb});
            if (hb < sg + 1.0) {
                const ZigZagCore z = zigzag_core(c);
                const double D = z.l2 - (sg + 1.0) * z.l1;
                const double s = -std::sqrt(2.0 * (sg + 1.0) * sg * c.p) / D;
                r.items.push_back({"lens_on_zigzag.order", z.s - s});
                r.items.push_back({"lens_on_zigzag.h1_center", c.h1m + c.p / D});
            } else {
                r.items.push_back({"lens_on_zigzag.order", -kInf});
                r.items.push_back({"lens_on_zigzag.h1_center", -kInf});
            }
            break;
        }
    }
    return r;
}

LeadingOrderSolution compute(const CompositeSpec& spec) {
    switch (spec.kind) {
        case Kind::Lens: return compute_lens(spec);
        case Kind::InternalDrop: return compute_internal_drop(spec);
        case Kind::H1Drop: return compute_h1drop(spec);
        case Kind::HDrop: return compute_hdrop(spec);
        case Kind::ZigZag: return compute_zigzag(spec);
        case Kind::SessileLens: return compute_sessile_lens(spec);
        case Kind::SessileInternalDrop: return compute_sessile_internal_drop(spec);
        case Kind::TwoDrops: return compute_two_drops(spec);
        case Kind::TwoSideSessileZigZag: return compute_two_side_spec(spec);
        case Kind::H1SessileZigZag: return compute_h1_sessile(spec);
        case Kind::HSessileZigZag: return compute_h_sessile(spec);
        case Kind::LensOnZigZag: return compute_lens_on_zigzag(spec);
    }
    throw UsageError("unknown kind");
}

void require_kind(const CompositeSpec& spec, std::initializer_list<Kind> kinds, const char* fn) {
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
        throw UsageError(std::string(fn) + " does not handle kind " + kind_name(spec.kind));
}

}  // namespace

ConstraintReport existence_report(const CompositeSpec& spec) {
    check_model(spec);
    ConstraintReport r;
    if (needs_h1(spec.kind) && !(spec.h1_m > 0.0)) r.items.push_back({"params.h1_m", spec.h1_m});
    if (needs_h(spec.kind) && !(spec.h_m > 0.0)) r.items.push_back({"params.h_m", spec.h_m});
    if (!r.items.empty()) return r;
    return report_for(spec);
}

LeadingOrderSolution build_unchecked(const CompositeSpec& spec) {
    check_model(spec);
    check_heights(spec);
    auto sol = compute(spec);
    finish(sol);
    if (spec.inverted) {
        sol = mirrored(sol);
        sol.spec.inverted = true;
    }
    return sol;
}

LeadingOrderSolution build(const CompositeSpec& spec) {
    check_model(spec);
    check_heights(spec);
    ConstraintReport r = report_for(spec);
    if (const Constraint* v = r.first_violation()) {
        std::ostringstream msg;
        msg << kind_name(spec.kind) << ": constraint " << v->id << " violated (margin "
            << format_double(v->margin) << ")";
        throw ConstraintViolation(msg.str(), std::move(r));
    }
    return build_unchecked(spec);
}

LeadingOrderSolution build_one_cl(const CompositeSpec& spec) {
    require_kind(spec, {Kind::Lens, Kind::InternalDrop, Kind::H1Drop, Kind::HDrop}, "build_one_cl");
    return build(spec);
}
LeadingOrderSolution build_zigzag(const CompositeSpec& spec) {
    require_kind(spec, {Kind::ZigZag}, "build_zigzag");
    return build(spec);
}
LeadingOrderSolution build_sessile_lens(const CompositeSpec& spec) {
    require_kind(spec, {Kind::SessileLens}, "build_sessile_lens");
    return build(spec);
}
LeadingOrderSolution build_sessile_internal_drop(const CompositeSpec& spec) {
    require_kind(spec, {Kind::SessileInternalDrop}, "build_sessile_internal_drop");
    return build(spec);
}
LeadingOrderSolution build_two_drops(const CompositeSpec& spec) {
    require_kind(spec, {Kind::TwoDrops}, "build_two_drops");
    return build(spec);
}
LeadingOrderSolution build_two_side_sessile_zigzag(const CompositeSpec& spec) {
    require_kind(spec, {Kind::TwoSideSessileZigZag}, "build_two_side_sessile_zigzag");
    return build(spec);
}
LeadingOrderSolution build_h1_sessile_zigzag(const CompositeSpec& spec) {
    require_kind(spec, {Kind::H1SessileZigZag}, "build_h1_sessile_zigzag");
    return build(spec);
}
LeadingOrderSolution build_h_sessile_zigzag(const CompositeSpec& spec) {
    require_kind(spec, {Kind::HSessileZigZag}, "build_h_sessile_zigzag");
    return build(spec);
}
LeadingOrderSolution build_lens_on_zigzag(const CompositeSpec& spec) {
    require_kind(spec, {Kind::LensOnZigZag}, "build_lens_on_zigzag");
    return build(spec);
}

LeadingOrderSolution mirrored(const LeadingOrderSolution& sol) {
    const double L = sol.spec.L;
    LeadingOrderSolution m = sol;
    m.spec.inverted = !sol.spec.inverted;
    auto flip = [L](std::vector<Segment>& segs) {
        std::reverse(segs.begin(), segs.end());
        for (auto& s : segs) {
            const double x0 = -L - s.x1, x1 = -L - s.x0;
            s.x0 = x0;
            s.x1 = x1;
            s.piece.center = -L - s.piece.center;
            s.piece.slope = -s.piece.slope;
        }
    };
    flip(m.h1_segments);
    flip(m.h_segments);
    std::reverse(m.cls.begin(), m.cls.end());
    for (auto& c : m.cls) {
        c.position = -L - c.position;
        c.orientation = c.orientation == Orientation::Rising ? Orientation::Falling : Orientation::Rising;
        c.slope_jump = -c.slope_jump;
    }
    return m;
}

}  // namespace bilayer
