#include "bilayer/blocks.hpp"

#include <algorithm>
#include <cmath>

namespace bilayer {

double bulk_coeff(BulkKind kind, double lambda1, double lambda2, double sigma) {
    switch (kind) {
        case BulkKind::TypeI_h1: return (lambda1 - lambda2) / (2.0 * sigma);
        case BulkKind::TypeI_h: return (lambda2 - (sigma + 1.0) * lambda1) / (2.0 * sigma);
        case BulkKind::TypeII_h1: return -lambda2 / (2.0 * (sigma + 1.0));
        case BulkKind::TypeIII_h: return -lambda1 / 2.0;
    }
    throw UsageError("unknown bulk kind");
}

BulkPiece BulkPiece::anchored(BulkKind kind, double coeff, double x0, double value, double slope) {
    BulkPiece b;
    b.kind = kind;
    b.coeff = coeff;
    // Convert to vertex form when the vertex is at a sane distance; otherwise keep
    // the anchor as reference point (linear or nearly linear segment).
    if (coeff != 0.0 && std::abs(slope / (2.0 * coeff)) < 1e8) {
        b.center = x0 - slope / (2.0 * coeff);
        b.offset = value - slope * slope / (4.0 * coeff);
        b.slope = 0.0;
    } else {
        b.center = x0;
        b.offset = value;
        b.slope = slope;
    }
    return b;
}

double utf_height(double pressure, const PotentialParams& p) {
    return p.eps + p.eps * p.eps * pressure / static_cast<double>(p.l - p.n);
}

UTFFloor utf_floor(double lambda1, double lambda2, double sigma, const PotentialParams& p) {
    return {utf_height(lambda2, p), utf_height(lambda1, p), utf_height(lambda2 - lambda1, p),
            utf_height(lambda1 - lambda2 / (sigma + 1.0), p)};
}

const char* to_string(CLType t) {
    switch (t) {
        case CLType::I: return "I";
        case CLType::II: return "II";
        case CLType::III: return "III";
        case CLType::IV: return "IV";
    }
    return "?";
}

CLType cl_type_from_string(const std::string& s) {
    if (s == "I") return CLType::I;
    if (s == "II") return CLType::II;
    if (s == "III") return CLType::III;
    if (s == "IV") return CLType::IV;
    throw UsageError("unknown contact line type '" + s + "'");
}

double contact_angle(CLType t, double sigma, double well_depth) {
    if (!(sigma > 0.0) || !(well_depth > 0.0)) throw DomainError("contact_angle needs sigma, well_depth > 0");
    switch (t) {
        case CLType::I: return std::sqrt(2.0 * well_depth / sigma);
        case CLType::II: return std::sqrt(2.0 * (sigma + 1.0) * well_depth / sigma);
        case CLType::III: return std::sqrt(2.0 * well_depth / (sigma + 1.0));
        case CLType::IV: return std::sqrt(2.0 * well_depth);
    }
    throw UsageError("unknown contact line type");
}

namespace {

constexpr double kDelta = 1e-6;     // start of the quadrature at H = 1 + delta
constexpr double kHeightMax = 1e4;  // table extent in eps units

// Cumulative trapezoid of dz/dt over a uniform t-grid, H = 1 + e^t.
std::vector<double> integrate(const PotentialParams& p, double k, double phi1, int m,
                              std::vector<double>* heights) {
    const double t0 = std::log(kDelta);
    const double t1 = std::log(kHeightMax - 1.0);
    const double dt = (t1 - t0) / m;
    std::vector<double> z(m + 1, 0.0);
    if (heights) heights->assign(m + 1, 0.0);
    auto integrand = [&](double t) {
        const double e = std::exp(t);
        const double g = phi(p, 1.0 + e) - phi1;
        return e / std::sqrt(k * g);
    };
    double prev = integrand(t0);
    if (heights) (*heights)[0] = 1.0 + kDelta;
    for (int i = 1; i <= m; ++i) {
        const double t = t0 + i * dt;
        const double cur = integrand(t);
        z[i] = z[i - 1] + 0.5 * dt * (prev + cur);
        prev = cur;
        if (heights) (*heights)[i] = 1.0 + std::exp(t);
    }
    return z;
}

}  // namespace

InnerTable::InnerTable(CLType t, double sigma, const PotentialParams& p) {
    p.validate();
    const double depth = p.well_depth();
    angle_ = contact_angle(t, sigma, depth);
    const double k = angle_ * angle_ / depth;
    const double phi1 = phi(p, 1.0);

    int m = 4000;
    std::vector<double> z = integrate(p, k, phi1, m, nullptr);
    bool converged = false;
    for (int refine = 0; refine < 6; ++refine) {
        std::vector<double> z2 = integrate(p, k, phi1, 2 * m, nullptr);
        const double diff = std::abs(z2.back() - z.back());
        z = std::move(z2);
        m *= 2;
        if (diff <= 1e-8 * std::abs(z.back())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericError("inner CL quadrature did not converge");
    z = integrate(p, k, phi1, m, &H_);

    // Far-field line H ~ angle * z + offset, read off at the end of the table
    // (the remaining 1/H tail is below 1e-4 there).
    offset_ = H_.back() - angle_ * z.back();
    for (double& v : z) v += offset_ / angle_;
    z_ = std::move(z);
    tail_rate_ = std::sqrt(k * static_cast<double>(p.l - p.n) / 2.0);

    if (t == CLType::III || t == CLType::IV) solve_companion(t == CLType::III ? sigma + 1.0 : 1.0, sigma, p);
}

void InnerTable::solve_companion(double b, double a, const PotentialParams& p) {
    // Dirichlet C = 1 at both ends of a window wide enough for the forcing
    // Pi(H) ~ (angle z)^-(n+1) to be negligible; Newton with Thomas solves.
    const double zl = -40.0, zr = 400.0;
    comp_dz_ = 0.05;
    comp_z0_ = zl;
    const int m = static_cast<int>((zr - zl) / comp_dz_) + 1;
    std::vector<double> c(m, 1.0), force(m), r(m), lo(m), di(m), up(m);
    for (int i = 0; i < m; ++i) force[i] = phi_deriv(p, height(zl + i * comp_dz_));
    const double s = a / (comp_dz_ * comp_dz_);
    auto dpi = [&](double h) {
        return -(p.n + 1.0) * std::pow(h, -(p.n + 2.0)) + (p.l + 1.0) * std::pow(h, -(p.l + 2.0));
    };
    bool converged = false;
    for (int it = 0; it < 50 && !converged; ++it) {
        double rn = 0.0;
        for (int i = 1; i + 1 < m; ++i) {
            r[i] = s * (c[i - 1] - 2.0 * c[i] + c[i + 1]) - b * phi_deriv(p, c[i]) + force[i];
            lo[i] = s;
            up[i] = s;
            di[i] = -2.0 * s - b * dpi(c[i]);
            rn = std::max(rn, std::abs(r[i]));
        }
        if (rn < 1e-12) {
            converged = true;
            break;
        }
        // Thomas on the interior rows, solving J d = -r.
        std::vector<double> cp(m, 0.0), dp(m, 0.0);
        for (int i = 1; i + 1 < m; ++i) {
            const double den = di[i] - (i > 1 ? lo[i] * cp[i - 1] : 0.0);
            cp[i] = up[i] / den;
            dp[i] = (-r[i] - (i > 1 ? lo[i] * dp[i - 1] : 0.0)) / den;
        }
        double next = 0.0;
        for (int i = m - 2; i >= 1; --i) {
            const double d = dp[i] - cp[i] * next;
            c[i] = std::max(c[i] + d, 0.5 * c[i]);
            next = d;
        }
    }
    if (!converged) throw NumericError("inner companion layer did not converge");
    comp_.resize(m);
    for (int i = 0; i < m; ++i) comp_[i] = c[i] - 1.0;
}

double InnerTable::companion(double z) const {
    if (comp_.empty()) return 0.0;
    const double u = (z - comp_z0_) / comp_dz_;
    if (u <= 0.0 || u >= static_cast<double>(comp_.size() - 1)) return 0.0;
    const std::size_t i = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(i);
    return comp_[i] + w * (comp_[i + 1] - comp_[i]);
}

double InnerTable::height(double z) const {
    if (z <= z_.front()) return 1.0 + (H_.front() - 1.0) * std::exp(tail_rate_ * (z - z_.front()));
    if (z >= z_.back()) return angle_ * z;
    const auto it = std::upper_bound(z_.begin(), z_.end(), z);
    const std::size_t i = static_cast<std::size_t>(it - z_.begin());
    const double w = (z - z_[i - 1]) / (z_[i] - z_[i - 1]);
    return H_[i - 1] + w * (H_[i] - H_[i - 1]);
}

std::vector<InnerSample> cl_inner_profile(CLType t, double sigma, const PotentialParams& p,
                                          double half_width, int samples) {
    if (half_width < 5.0) throw UsageError("cl_inner_profile: half_width must be >= 5 (eps units)");
    if (samples < 3) throw UsageError("cl_inner_profile: need at least 3 samples");
    const InnerTable table(t, sigma, p);
    std::vector<InnerSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double z = -half_width + 2.0 * half_width * i / (samples - 1);
        out.push_back({z, table.height(z)});
    }
    return out;
}

}  // namespace bilayer
