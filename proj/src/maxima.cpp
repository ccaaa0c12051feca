#include <cmath>

#include "bilayer/composites.hpp"

namespace bilayer {

namespace {

void check(double sigma, double a, double b) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("max transformations need positive heights");
}

// Larger root of x^2 + B x + C = 0, written without cancellation.
double larger_root(double B, double C) {
    const double disc = std::sqrt(B * B - 4.0 * C);
    return B <= 0.0 ? 0.5 * (-B + disc) : -2.0 * C / (B + disc);
}

}  // namespace

double two_side_C4(double sigma, double h1_m, double h_m) {
    const double hb = h_m / h1_m, sg = sigma;
    return 4.0 * sg * h_m / (2.0 * sg * hb + std::sqrt(4.0 * sg * sg * hb * hb + 4.0 * sg * (hb - sg - 1.0) * (hb - sg - 1.0)));
}

double two_side_C2(double sigma, double h1_m, double h_m) {
    const double hb = h_m / h1_m, sg = sigma;
    return 4.0 * sg * h_m / (2.0 * sg + std::sqrt(4.0 * sg * sg + 4.0 * sg * (hb - 1.0) * (hb - 1.0)));
}

HeightPair maxima_two_side(double sigma, double h1_m, double h_m) {
    check(sigma, h1_m, h_m);
    const double hb = h_m / h1_m;
    if (hb <= 1.0) return {h1_m, two_side_C2(sigma, h1_m, h_m)};
    if (hb <= sigma + 1.0) return {h1_m, h_m};
    return {two_side_C4(sigma, h1_m, h_m), h_m};
}

namespace {

double hm_from_small_ratio(double sigma, double M, double ht) {
    return M / (ht - 2.0 * sigma + std::sqrt(4.0 * sigma * (sigma + 1.0 - ht)));
}

double h1m_from_large_ratio(double sigma, double M, double ht) {
    return M / (sigma + 1.0 - 2.0 * sigma * ht + std::sqrt(4.0 * sigma * (sigma + 1.0) * ht * (ht - 1.0)));
}

}  // namespace

HeightPair params_two_side(double sigma, double max_h1, double max_h) {
    check(sigma, max_h1, max_h);
    const double ht = max_h / max_h1;
    if (ht <= 1.0) return {max_h1, hm_from_small_ratio(sigma, max_h, ht)};
    if (ht <= sigma + 1.0) return {max_h1, max_h};
    return {h1m_from_large_ratio(sigma, max_h, ht), max_h};
}

HeightPair maxima_h1_sessile(double sigma, double h1_m, double h_m) {
    check(sigma, h1_m, h_m);
    if (h_m / h1_m <= 1.0) return {h1_m, two_side_C2(sigma, h1_m, h_m)};
    return {h1_m, h_m};
}

HeightPair params_h1_sessile(double sigma, double max_h1, double max_h) {
    check(sigma, max_h1, max_h);
    const double ht = max_h / max_h1;
    if (ht <= 1.0) return {max_h1, hm_from_small_ratio(sigma, max_h, ht)};
    return {max_h1, max_h};
}

// The h-sessile rule is stated for hbar > 1; the h1_m branch is extended below 1
// so the pair is defined on the whole quadrant.
HeightPair maxima_h_sessile(double sigma, double h1_m, double h_m) {
    check(sigma, h1_m, h_m);
    if (h_m / h1_m <= sigma + 1.0) return {h1_m, h_m};
    return {two_side_C4(sigma, h1_m, h_m), h_m};
}

HeightPair params_h_sessile(double sigma, double max_h1, double max_h) {
    check(sigma, max_h1, max_h);
    const double ht = max_h / max_h1;
    if (ht <= sigma + 1.0) return {max_h1, max_h};
    return {h1m_from_large_ratio(sigma, max_h, ht), max_h};
}

namespace {

double sessile_lens_C4(double sg, double h1m, double hm) {
    const double y = (sg + 1.0) * h1m;
    return hm / (sg + 1.0) * ((1.0 - sg) * hm + y) / (y + hm) + h1m;
}

double sessile_internal_drop_C2(double sg, double h1m, double hm) {
    return hm + h1m * (hm + (1.0 - sg) * h1m) / (h1m + hm);
}

bool sessile_lens_flat_branch(double sg, double ratio) { return sg > 1.0 && ratio >= (sg + 1.0) / (sg - 1.0); }

}  // namespace

HeightPair maxima_sessile_lens(double sigma, double h1_m, double h_m) {
    check(sigma, h1_m, h_m);
    if (sessile_lens_flat_branch(sigma, h_m / h1_m)) return {h1_m, h_m};
    return {sessile_lens_C4(sigma, h1_m, h_m), h_m};
}

HeightPair params_sessile_lens(double sigma, double max_h1, double max_h) {
    check(sigma, max_h1, max_h);
    if (sessile_lens_flat_branch(sigma, max_h / max_h1)) return {max_h1, max_h};
    // (sigma+1) C4 (y + a) = y^2 + 2 a y + (1 - sigma) a^2 with y = (sigma+1) h1_m, a = h_m.
    const double a = max_h, k = (sigma + 1.0) * max_h1;
    const double y = larger_root(2.0 * a - k, (1.0 - sigma) * a * a - k * a);
    return {y / (sigma + 1.0), max_h};
}

HeightPair maxima_sessile_internal_drop(double sigma, double h1_m, double h_m) {
    check(sigma, h1_m, h_m);
    if (h_m / h1_m >= sigma - 1.0) return {h1_m, sessile_internal_drop_C2(sigma, h1_m, h_m)};
    return {h1_m, h_m};
}

HeightPair params_sessile_internal_drop(double sigma, double max_h1, double max_h) {
    check(sigma, max_h1, max_h);
    // C2 (h1 + h) = h^2 + 2 h1 h + (1 - sigma) h1^2 solved for h.
    const double h1 = max_h1, C2 = max_h;
    const double hm = larger_root(2.0 * h1 - C2, (1.0 - sigma) * h1 * h1 - C2 * h1);
    if (hm > 0.0 && hm / h1 >= sigma - 1.0) return {h1, hm};
    return {h1, max_h};
}

HeightPair params_from_maxima(Kind k, double sigma, double max_h1, double max_h) {
    switch (k) {
        case Kind::TwoSideSessileZigZag: return params_two_side(sigma, max_h1, max_h);
        case Kind::H1SessileZigZag: return params_h1_sessile(sigma, max_h1, max_h);
        case Kind::HSessileZigZag: return params_h_sessile(sigma, max_h1, max_h);
        case Kind::SessileLens: return params_sessile_lens(sigma, max_h1, max_h);
        case Kind::SessileInternalDrop: return params_sessile_internal_drop(sigma, max_h1, max_h);
        default: return {max_h1, max_h};
    }
}

HeightPair maxima_from_params(Kind k, double sigma, double h1_m, double h_m) {
    switch (k) {
        case Kind::TwoSideSessileZigZag: return maxima_two_side(sigma, h1_m, h_m);
        case Kind::H1SessileZigZag: return maxima_h1_sessile(sigma, h1_m, h_m);
        case Kind::HSessileZigZag: return maxima_h_sessile(sigma, h1_m, h_m);
        case Kind::SessileLens: return maxima_sessile_lens(sigma, h1_m, h_m);
        case Kind::SessileInternalDrop: return maxima_sessile_internal_drop(sigma, h1_m, h_m);
        default: return {h1_m, h_m};
    }
}

}  // namespace bilayer
