#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "bilayer/composites.hpp"

namespace bilayer {

namespace {

using V = std::vector<double>;

const std::vector<std::string> kZigZagNames = {"lambda1", "lambda2", "s", "s1", "xc", "xc1",
                                               "C", "C1", "C2", "C3", "C4", "C5"};

// Verbatim matching equations, one line per condition.
V zigzag_system(const V& u, double sg, double L, double p, double h1m, double hm) {
    const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3], xc = u[4], xc1 = u[5];
    const double C = u[6], C1 = u[7], C2 = u[8], C3 = u[9], C4 = u[10], C5 = u[11];
    const double a = (l1 - l2) / (2 * sg), b = (l2 - (sg + 1) * l1) / (2 * sg);
    return {-l1 / 2 * (L - s1) * (L - s1) + hm - C2,
            -l1 * (L - s1) - C3,
            a * (s1 + xc1) * (s1 + xc1) + C1,
            b * (s1 + xc) * (s1 + xc) + C - C2,
            2 * a * (-s1 - xc1) - std::sqrt(2 * p / sg),
            2 * b * (-s1 - xc) + std::sqrt(2 * p / sg) - C3,
            a * (s + xc1) * (s + xc1) + C1 - C4,
            b * (s + xc) * (s + xc) + C,
            2 * a * (-s - xc1) - std::sqrt(2 * p / (sg * (sg + 1))) - C5,
            2 * b * (-s - xc) + std::sqrt(2 * (sg + 1) * p / sg),
            -l2 / (2 * (sg + 1)) * s * s + h1m - C4,
            -l2 / (sg + 1) * (-s) - C5};
}

V residual_impl(Kind k, const V& u, const CompositeSpec& spec) {
    const double sg = spec.sigma, L = spec.L, p = spec.well_depth, h1m = spec.h1_m, hm = spec.h_m;
    const double kI = std::sqrt(2 * p / sg), kII = std::sqrt(2 * (sg + 1) * p / sg);
    const double kIII = std::sqrt(2 * p / (sg + 1)), kIV = std::sqrt(2 * p);
    const double kj = std::sqrt(2 * p / (sg * (sg + 1)));
    auto A = [&](double l1, double l2) { return (l1 - l2) / (2 * sg); };
    auto B = [&](double l1, double l2) { return (l2 - (sg + 1) * l1) / (2 * sg); };
    auto G = [&](double l2) { return -l2 / (2 * (sg + 1)); };

    switch (k) {
        case Kind::Lens: {
            const double l1 = u[0], l2 = u[1], s = u[2], C1 = u[3], C4 = u[4], C5 = u[5];
            return {G(l2) * (L - s) * (L - s) + h1m - C4,
                    -l2 / (sg + 1) * (L - s) - C5,
                    A(l1, l2) * s * s + C1 - C4,
                    B(l1, l2) * s * s + hm,
                    2 * A(l1, l2) * (-s) + kj - C5,
                    2 * B(l1, l2) * (-s) - kII};
        }
        case Kind::InternalDrop: {
            const double l1 = u[0], l2 = u[1], s = u[2], C = u[3], C2 = u[4], C3 = u[5];
            return {-l1 / 2 * (L - s) * (L - s) + hm - C2,
                    -l1 * (L - s) - C3,
                    B(l1, l2) * s * s + C - C2,
                    A(l1, l2) * s * s + h1m,
                    2 * A(l1, l2) * (-s) - kI,
                    2 * B(l1, l2) * (-s) + kI - C3};
        }
        case Kind::H1Drop: {
            const double l2 = u[0], s = u[1];
            return {G(l2) * (L - s) * (L - s) + h1m, 2 * G(l2) * (L - s) + kIII};
        }
        case Kind::HDrop: {
            const double l1 = u[0], s = u[1];
            return {-l1 / 2 * (L - s) * (L - s) + hm, -l1 * (L - s) + kIV};
        }
        case Kind::ZigZag: return zigzag_system(u, sg, L, p, h1m, hm);
        case Kind::SessileLens: {
            const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3], xt1 = u[4], C4 = u[5], C5 = u[6], Ct1 = u[7];
            const double a = A(l1, l2), b = B(l1, l2), g = G(l2);
            return {a * (L - s1) * (L - s1) + h1m - C4,
                    b * (L - s1) * (L - s1) + hm,
                    2 * a * (L - s1) - kj - C5,
                    2 * b * (L - s1) + kII,
                    g * (s1 + xt1) * (s1 + xt1) + Ct1 - C4,
                    2 * g * (-s1 - xt1) - C5,
                    g * (s + xt1) * (s + xt1) + Ct1,
                    2 * g * (-s - xt1) + kIII};
        }
        case Kind::SessileInternalDrop: {
            const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3], xt = u[4], C2 = u[5], C3 = u[6], Ct0 = u[7];
            const double a = A(l1, l2), b = B(l1, l2);
            return {a * (L - s1) * (L - s1) + h1m,
                    2 * a * (L - s1) + kI,
                    b * (L - s1) * (L - s1) + hm - C2,
                    2 * b * (L - s1) - kI - C3,
                    -l1 / 2 * (s1 + xt) * (s1 + xt) + Ct0 - C2,
                    -l1 * (-s1 - xt) - C3,
                    -l1 / 2 * (s + xt) * (s + xt) + Ct0,
                    -l1 * (-s - xt) + kIV};
        }
        case Kind::TwoDrops: {
            const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3];
            return {-l1 / 2 * (L - s1) * (L - s1) + hm,
                    -l1 * (L - s1) + kIV,
                    G(l2) * s * s + h1m,
                    -l2 / (sg + 1) * (-s) - kIII};
        }
        case Kind::TwoSideSessileZigZag: {
            if (!spec.shift) throw UsageError("two_side_sessile_zigzag residual needs a fixed shift");
            const double xt = *spec.shift;
            const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3], s2 = u[4], s3 = u[5], xc = u[6];
            const double xc1 = u[7], xt1 = u[8], C = u[9], C1 = u[10], C2 = u[11], C3 = u[12];
            const double C4 = u[13], C5 = u[14];
            const double a = A(l1, l2), b = B(l1, l2), g = G(l2);
            return {g * (s3 + xt1) * (s3 + xt1) + h1m,
                    2 * g * (-s3 - xt1) - kIII,
                    g * (s2 + xt1) * (s2 + xt1) + h1m - C4,
                    2 * g * (-s2 - xt1) - C5,
                    a * (s2 + xc1) * (s2 + xc1) + C1 - C4,
                    b * (s2 + xc) * (s2 + xc) + C,
                    2 * a * (-s2 - xc1) + kj - C5,
                    2 * b * (-s2 - xc) - kII,
                    a * (s1 + xc1) * (s1 + xc1) + C1,
                    b * (s1 + xc) * (s1 + xc) + C - C2,
                    2 * a * (-s1 - xc1) + kI,
                    2 * b * (-s1 - xc) - kI - C3,
                    -l1 / 2 * (s1 + xt) * (s1 + xt) + hm - C2,
                    -l1 * (-s1 - xt) - C3,
                    -l1 / 2 * (s + xt) * (s + xt) + hm,
                    -l1 * (-s - xt) + kIV};
        }
        case Kind::H1SessileZigZag: {
            const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3], s2 = u[4], xc = u[5], xc1 = u[6];
            const double xt = u[7], C = u[8], C1 = u[9], C2 = u[10], C3 = u[11], C4 = u[12], C5 = u[13];
            const double a = A(l1, l2), b = B(l1, l2), g = G(l2);
            return {g * (L - s2) * (L - s2) + h1m - C4,
                    2 * g * (L - s2) - C5,
                    a * (s2 + xc1) * (s2 + xc1) + C1 - C4,
                    b * (s2 + xc) * (s2 + xc) + C,
                    2 * a * (-s2 - xc1) + kj - C5,
                    2 * b * (-s2 - xc) - kII,
                    a * (s1 + xc1) * (s1 + xc1) + C1,
                    b * (s1 + xc) * (s1 + xc) + C - C2,
                    2 * a * (-s1 - xc1) + kI,
                    2 * b * (-s1 - xc) - kI - C3,
                    -l1 / 2 * (s1 + xt) * (s1 + xt) + hm - C2,
                    -l1 * (-s1 - xt) - C3,
                    -l1 / 2 * (s + xt) * (s + xt) + hm,
                    -l1 * (-s - xt) + kIV};
        }
        case Kind::HSessileZigZag: {
            const double l1 = u[0], l2 = u[1], s = u[2], s1 = u[3], s2 = u[4], xc = u[5], xc1 = u[6];
            const double xt1 = u[7], C = u[8], C1 = u[9], C2 = u[10], C3 = u[11], C4 = u[12], C5 = u[13];
            const double a = A(l1, l2), b = B(l1, l2), g = G(l2);
            return {-l1 / 2 * (L - s2) * (L - s2) + hm - C2,
                    -l1 * (L - s2) - C3,
                    a * (s2 + xc1) * (s2 + xc1) + C1,
                    b * (s2 + xc) * (s2 + xc) + C - C2,
                    2 * a * (-s2 - xc1) - kI,
                    2 * b * (-s2 - xc) + kI - C3,
                    a * (s1 + xc1) * (s1 + xc1) + C1 - C4,
                    b * (s1 + xc) * (s1 + xc) + C,
                    2 * a * (-s1 - xc1) - kj - C5,
                    2 * b * (-s1 - xc) + kII,
                    g * (s1 + xt1) * (s1 + xt1) + h1m - C4,
                    2 * g * (-s1 - xt1) - C5,
                    g * (s + xt1) * (s + xt1) + h1m,
                    2 * g * (-s - xt1) + kIII};
        }
        case Kind::LensOnZigZag: {
            // Zig-zag part with (s, s1) relabelled to (s1, s2), then the lens.
            V zz(u.begin(), u.begin() + 12);
            V r = zigzag_system(zz, sg, L, p, h1m, hm);
            const double l1 = u[0], l2 = u[1];
            const double s = u[12], Cl = u[13], C1l = u[14], C4l = u[15], C5l = u[16];
            const V lens = {G(l2) * s * s + h1m - C4l,
                            l2 * s / (sg + 1) - C5l,
                            A(l1, l2) * s * s + C1l - C4l,
                            B(l1, l2) * s * s + Cl,
                            2 * A(l1, l2) * (-s) + kj - C5l,
                            2 * B(l1, l2) * (-s) - kII};
            r.insert(r.end(), lens.begin(), lens.end());
            return r;
        }
    }
    throw UsageError("unknown kind");
}

}  // namespace

const std::vector<std::string>& matching_unknown_names(Kind k) {
    static const std::vector<std::string> lens = {"lambda1", "lambda2", "s", "C1", "C4", "C5"};
    static const std::vector<std::string> idrop = {"lambda1", "lambda2", "s", "C", "C2", "C3"};
    static const std::vector<std::string> h1drop = {"lambda2", "s"};
    static const std::vector<std::string> hdrop = {"lambda1", "s"};
    static const std::vector<std::string> slens = {"lambda1", "lambda2", "s", "s1", "xt1", "C4", "C5", "Ct1"};
    static const std::vector<std::string> sidrop = {"lambda1", "lambda2", "s", "s1", "xt", "C2", "C3", "Ct0"};
    static const std::vector<std::string> twodrops = {"lambda1", "lambda2", "s", "s1"};
    static const std::vector<std::string> twoside = {"lambda1", "lambda2", "s", "s1", "s2", "s3", "xc", "xc1",
                                                     "xt1", "C", "C1", "C2", "C3", "C4", "C5"};
    static const std::vector<std::string> h1s = {"lambda1", "lambda2", "s", "s1", "s2", "xc", "xc1",
                                                 "xt", "C", "C1", "C2", "C3", "C4", "C5"};
    static const std::vector<std::string> hs = {"lambda1", "lambda2", "s", "s1", "s2", "xc", "xc1",
                                                "xt1", "C", "C1", "C2", "C3", "C4", "C5"};
    static const std::vector<std::string> lonzz = {"lambda1", "lambda2", "s1", "s2", "xc", "xc1", "C", "C1", "C2",
                                                   "C3", "C4", "C5", "s", "Cl", "C1l", "C4l", "C5l"};
    switch (k) {
        case Kind::Lens: return lens;
        case Kind::InternalDrop: return idrop;
        case Kind::H1Drop: return h1drop;
        case Kind::HDrop: return hdrop;
        case Kind::ZigZag: return kZigZagNames;
        case Kind::SessileLens: return slens;
        case Kind::SessileInternalDrop: return sidrop;
        case Kind::TwoDrops: return twodrops;
        case Kind::TwoSideSessileZigZag: return twoside;
        case Kind::H1SessileZigZag: return h1s;
        case Kind::HSessileZigZag: return hs;
        case Kind::LensOnZigZag: return lonzz;
    }
    throw UsageError("unknown kind");
}

std::vector<double> matching_residual(Kind k, const std::vector<double>& unknowns, const CompositeSpec& spec) {
    const std::size_t n = matching_unknown_names(k).size();
    if (unknowns.size() != n)
        throw UsageError(std::string("matching_residual: ") + kind_name(k) + " expects " + std::to_string(n) +
                         " unknowns, got " + std::to_string(unknowns.size()));
    return residual_impl(k, unknowns, spec);
}

std::vector<double> matching_unknowns(const LeadingOrderSolution& sol) {
    std::vector<double> out;
    for (const auto& name : matching_unknown_names(sol.spec.kind)) {
        auto it = sol.constants.find(name);
        if (it == sol.constants.end())
            throw NumericError(std::string("constant ") + name + " is not finite for this " +
                               kind_name(sol.spec.kind) + " (limiting case)");
        out.push_back(it->second);
    }
    return out;
}

namespace {

// Near the linear-segment limits a vertex pair (xc, C) of b (x + xc)^2 + C runs off
// to infinity while the parabola itself stays tame. The oracle therefore iterates on
// the polynomial coefficients m = 2 b xc and c0 = b xc^2 + C and maps back.
struct VertexPair {
    std::size_t xc, c;
    bool type_a;  // curvature (l1 - l2)/(2 sigma), else (l2 - (sigma+1) l1)/(2 sigma)
};

struct Coordinates {
    std::size_t l1 = 0, l2 = 0;
    std::vector<VertexPair> pairs;
    double sigma = 0.0;

    double curvature(const V& x, const VertexPair& p) const {
        return p.type_a ? (x[l1] - x[l2]) / (2 * sigma) : (x[l2] - (sigma + 1) * x[l1]) / (2 * sigma);
    }
    V to_poly(V x) const {
        for (const auto& p : pairs) {
            const double b = curvature(x, p), xc = x[p.xc];
            x[p.xc] = 2 * b * xc;
            x[p.c] = b * xc * xc + x[p.c];
        }
        return x;
    }
    V to_vertex(V v) const {
        for (const auto& p : pairs) {
            const double b = curvature(v, p), m = v[p.xc];
            v[p.xc] = m / (2 * b);
            v[p.c] = v[p.c] - m * m / (4 * b);
        }
        return v;
    }
};

Coordinates coordinates_for(Kind k, double sigma) {
    const auto& names = matching_unknown_names(k);
    auto idx = [&](const std::string& n) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return i;
        return std::nullopt;
    };
    Coordinates c;
    c.sigma = sigma;
    const auto l1 = idx("lambda1"), l2 = idx("lambda2");
    if (!l1 || !l2) return c;
    c.l1 = *l1;
    c.l2 = *l2;
    if (auto xc = idx("xc"), C = idx("C"); xc && C) c.pairs.push_back({*xc, *C, false});
    if (auto xc1 = idx("xc1"), C1 = idx("C1"); xc1 && C1) c.pairs.push_back({*xc1, *C1, true});
    return c;
}

}  // namespace

OracleResult oracle_solve(Kind k, std::vector<double> x0, const CompositeSpec& spec, const OracleOptions& opt) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const Coordinates coords = coordinates_for(k, spec.sigma);
    auto eval = [&](const V& v) {
        const V r = matching_residual(k, coords.to_vertex(v), spec);
        return VectorXd(Eigen::Map<const VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    };
    OracleResult res;
    V x = coords.to_poly(std::move(x0));
    VectorXd r = eval(x);
    const auto n = static_cast<Eigen::Index>(x.size());
    for (int it = 0; it < opt.max_iter; ++it) {
        res.iterations = it;
        if (r.lpNorm<Eigen::Infinity>() <= opt.tol) {
            res.converged = true;
            break;
        }
        MatrixXd J(r.size(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = opt.fd_step * std::max(1.0, std::abs(x[j]));
            V xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (eval(xp) - eval(xm)) / (2.0 * h);
        }
        const VectorXd dx = J.colPivHouseholderQr().solve(-r);
        // Damping by halving until the residual norm decreases.
        double t = 1.0;
        const double r0 = r.norm();
        bool accepted = false;
        for (int half = 0; half < 40; ++half, t *= 0.5) {
            V xn = x;
            for (Eigen::Index j = 0; j < n; ++j) xn[j] += t * dx[j];
            const VectorXd rn = eval(xn);
            if (rn.allFinite() && rn.norm() < r0) {
                x = std::move(xn);
                r = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // stagnated at the least-squares floor
        const double step = t * dx.lpNorm<Eigen::Infinity>();
        double scale = 1.0;
        for (double v : x) scale = std::max(scale, std::abs(v));
        if (step <= 1e-15 * scale) {
            res.iterations = it + 1;
            break;
        }
        res.iterations = it + 1;
    }
    res.residual_norm = r.lpNorm<Eigen::Infinity>();
    res.converged = res.converged || res.residual_norm <= std::max(opt.tol, 1e-10);
    res.x = coords.to_vertex(std::move(x));
    return res;
}

}  // namespace bilayer
