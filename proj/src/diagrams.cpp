#include "bilayer/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace bilayer {

namespace {

using Interval = std::pair<double, double>;

constexpr double kHbarMin = 1e-2;
constexpr double kHbarMax = 1e2;

void parallel_rows(int rows, int threads, const std::function<void(int)>& body) {
    const int n = std::max(1, std::min(threads, rows));
    if (n == 1) {
        for (int r = 0; r < rows; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t)
        pool.emplace_back([&, t] {
            for (int r = t; r < rows; r += n) body(r);
        });
    for (auto& th : pool) th.join();
}

CompositeSpec spec_for(Kind kind, const DiagramConfig& cfg, double h1_m, double h_m) {
    CompositeSpec s;
    s.kind = kind;
    s.sigma = cfg.sigma;
    s.L = cfg.L;
    s.well_depth = cfg.well_depth;
    s.h1_m = kind == Kind::HDrop ? 0.0 : h1_m;
    s.h_m = kind == Kind::H1Drop ? 0.0 : h_m;
    return s;
}

// Smallest existence margin at parameterization heights (t, hbar t); NaN counts
// as outside.
double ray_margin(Kind kind, const DiagramConfig& cfg, double hbar, double t) {
    try {
        const ConstraintReport r = existence_report(spec_for(kind, cfg, t, hbar * t));
        double m = INFINITY;
        for (const auto& c : r.items) m = std::min(m, std::isnan(c.margin) ? -INFINITY : c.margin);
        return m;
    } catch (const std::exception&) {
        return -INFINITY;
    }
}

struct Ray {
    std::vector<double> crossings;  // t where membership flips
    std::vector<Interval> members;  // open t-intervals inside the ED
};

constexpr double kTMinFraction = 1e-5;

Ray scan_ray(Kind kind, const DiagramConfig& cfg, double hbar, double t_max) {
    constexpr int kSamples = 240;
    const double t_min = kTMinFraction * t_max;
    const double q = std::log(t_max / t_min) / (kSamples - 1);
    Ray ray;
    double t_prev = t_min;
    bool in_prev = ray_margin(kind, cfg, hbar, t_prev) > 0.0;
    double open = in_prev ? 0.0 : -1.0;
    for (int i = 1; i < kSamples; ++i) {
        const double t = t_min * std::exp(q * i);
        const bool in = ray_margin(kind, cfg, hbar, t) > 0.0;
        if (in != in_prev) {
            double a = t_prev, b = t;
            for (int it = 0; it < 80 && b - a > 1e-14 * b; ++it) {
                const double m = 0.5 * (a + b);
                ((ray_margin(kind, cfg, hbar, m) > 0.0) == in_prev ? a : b) = m;
            }
            const double tc = 0.5 * (a + b);
            ray.crossings.push_back(tc);
            if (in) open = tc;
            else ray.members.push_back({open, tc});
        }
        t_prev = t;
        in_prev = in;
    }
    if (in_prev) ray.members.push_back({open, INFINITY});
    return ray;
}

bool inside(const std::vector<Interval>& v, double t) {
    return std::any_of(v.begin(), v.end(), [t](const Interval& iv) { return t > iv.first && t < iv.second; });
}

// Parts of the ray where exactly one of a, b is a member.
std::vector<Interval> symmetric_difference(const std::vector<Interval>& a, const std::vector<Interval>& b,
                                           double t_cap) {
    std::vector<double> cuts = {0.0, t_cap};
    for (const auto* v : {&a, &b})
        for (const auto& iv : *v) {
            cuts.push_back(std::min(iv.first, t_cap));
            cuts.push_back(std::min(iv.second, t_cap));
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double m = 0.5 * (cuts[i] + cuts[i + 1]);
        if (inside(a, m) == inside(b, m)) continue;
        if (!out.empty() && out.back().second == cuts[i]) out.back().second = cuts[i + 1];
        else out.push_back({cuts[i], cuts[i + 1]});
    }
    return out;
}

bool same_structure(const Ray& a, const Ray& b) {
    if (a.crossings.size() != b.crossings.size() || a.members.size() != b.members.size()) return false;
    for (std::size_t i = 0; i < a.members.size(); ++i)
        if ((a.members[i].first == 0.0) != (b.members[i].first == 0.0) ||
            std::isinf(a.members[i].second) != std::isinf(b.members[i].second))
            return false;
    return true;
}

DiagramPoint to_maxima(Kind kind, const DiagramConfig& cfg, double hbar, double t) {
    if (kind == Kind::H1Drop || kind == Kind::HDrop || t <= 0.0) return {hbar * std::max(t, 0.0), std::max(t, 0.0)};
    const HeightPair m = maxima_from_params(kind, cfg.sigma, t, hbar * t);
    return {m.h, m.h1};
}

bool in_box(const DiagramPoint& p, const DiagramConfig& cfg) {
    return p.h_max >= cfg.h_max_range.first && p.h_max <= cfg.h_max_range.second &&
           p.h1_max >= cfg.h1_max_range.first && p.h1_max <= cfg.h1_max_range.second;
}

CurveKind classify(const std::vector<DiagramPoint>& pts, int id) {
    const DiagramPoint a = pts.front(), b = pts.back();
    const double dx = b.h_max - a.h_max, dy = b.h1_max - a.h1_max;
    const double len = std::hypot(dx, dy);
    double dev = 0.0;
    for (const auto& p : pts)
        dev = std::max(dev, std::abs((p.h_max - a.h_max) * dy - (p.h1_max - a.h1_max) * dx) / std::max(len, 1e-300));
    if (dev <= 1e-7 * std::max(len, 1e-12)) return CurveKind::Line;
    return (id == 6 || id == 7) ? CurveKind::Parabola : CurveKind::Parametric;
}

// Appends the in-box runs of a polyline as separate boundary segments.
void emit(std::vector<EDBoundary>& out, int id, const std::vector<DiagramPoint>& pts, const DiagramConfig& cfg,
          int& seg) {
    std::vector<DiagramPoint> run;
    auto flush = [&] {
        const double span = run.size() < 2 ? 0.0
                                           : std::hypot(run.back().h_max - run.front().h_max,
                                                        run.back().h1_max - run.front().h1_max);
        const double box = std::hypot(cfg.h_max_range.second - cfg.h_max_range.first,
                                      cfg.h1_max_range.second - cfg.h1_max_range.first);
        if (run.size() >= 2 && span > 1e-9 * box) out.push_back({id, seg++, classify(run, id), run});
        run.clear();
    };
    for (const auto& p : pts) {
        if (in_box(p, cfg)) run.push_back(p);
        else flush();
    }
    flush();
}

// Points along the ray hbar between parameter scales a and b (mapped, so the
// sessile transforms bend it where their branch changes).
std::vector<DiagramPoint> ray_polyline(Kind kind, const DiagramConfig& cfg, double hbar, double a, double b) {
    std::vector<DiagramPoint> pts;
    constexpr int n = 64;
    for (int i = 0; i <= n; ++i) pts.push_back(to_maxima(kind, cfg, hbar, a + (b - a) * i / n));
    return pts;
}

std::vector<EDBoundary> boundaries_for(Kind kind, const DiagramConfig& cfg) {
    const int id = solution_id(kind);
    // Maxima are homogeneous of degree one in the parameterization heights, so a
    // per-ray scale cap keeps every ray covering the box.
    auto t_cap = [&](double hbar) {
        const DiagramPoint unit = to_maxima(kind, cfg, hbar, 1.0);
        double c = 0.0;
        if (unit.h_max > 0.0) c = std::max(c, cfg.h_max_range.second / unit.h_max);
        if (unit.h1_max > 0.0) c = std::max(c, cfg.h1_max_range.second / unit.h1_max);
        return 1.5 * c;
    };
    const int n = std::max(200, 2 * cfg.resolution);
    const double q = std::log(kHbarMax / kHbarMin) / (n - 1);
    std::vector<double> hb(n);
    double cap = 0.0;
    for (int i = 0; i < n; ++i) {
        hb[i] = kHbarMin * std::exp(q * i);
        cap = std::max(cap, t_cap(hb[i]));
    }
    // One scale cap for all rays, so crossings near the cap cannot fake a sector line.
    std::vector<Ray> rays(n);
    for (int i = 0; i < n; ++i) rays[i] = scan_ray(kind, cfg, hb[i], cap);

    std::vector<EDBoundary> out;
    int seg = 0;
    std::vector<std::vector<DiagramPoint>> open(rays[0].crossings.size());
    auto close_all = [&] {
        for (auto& pl : open) emit(out, id, pl, cfg, seg);
        open.clear();
    };
    for (int i = 0; i < n; ++i) {
        if (i > 0 && !same_structure(rays[i - 1], rays[i])) {
            close_all();
            // Sector line between the two rays.
            double a = hb[i - 1], b = hb[i];
            // Stop well above round-off: closer to a threshold ratio the margins lose
            // their sign to rounding in h_m/h1_m and fake extra crossings.
            for (int it = 0; it < 60 && b / a - 1.0 > 1e-10; ++it) {
                const double m = std::sqrt(a * b);
                (same_structure(scan_ray(kind, cfg, m, cap), rays[i - 1]) ? a : b) = m;
            }
            for (const auto& iv : symmetric_difference(scan_ray(kind, cfg, a, cap).members,
                                                       scan_ray(kind, cfg, b, cap).members, cap)) {
                // A crossing slipping under the first sample is the scan floor, not a sector line.
                if (iv.second < 1.1 * kTMinFraction * cap) continue;
                emit(out, id, ray_polyline(kind, cfg, std::sqrt(a * b), iv.first, iv.second), cfg, seg);
            }
        }
        if (open.size() != rays[i].crossings.size()) open.assign(rays[i].crossings.size(), {});
        for (std::size_t j = 0; j < rays[i].crossings.size(); ++j)
            open[j].push_back(to_maxima(kind, cfg, hb[i], rays[i].crossings[j]));
    }
    close_all();
    return out;
}

}  // namespace

void DiagramConfig::validate() const {
    if (!(sigma > 0.0) || !(L > 0.0) || !(well_depth > 0.0))
        throw UsageError("diagram: sigma, L and well_depth must be positive");
    for (const auto& r : {h_max_range, h1_max_range})
        if (!(r.first >= 0.0) || !(r.second > r.first)) throw UsageError("diagram: axis ranges must be 0 <= lo < hi");
    if (resolution < 2) throw UsageError("diagram: resolution must be >= 2");
    if (threads < 1) throw UsageError("diagram: threads must be >= 1");
}

DiagramConfig DiagramConfig::around_symmetric_points(double sigma, double L, double well_depth, int resolution) {
    DiagramConfig c;
    c.sigma = sigma;
    c.L = L;
    c.well_depth = well_depth;
    c.resolution = resolution;
    const auto [I, II] = symmetric_points(c);
    c.h_max_range = {0.0, 2.0 * II.h_max};
    c.h1_max_range = {0.0, 2.0 * I.h1_max};
    return c;
}

const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::Line: return "line";
        case CurveKind::Parabola: return "parabola";
        case CurveKind::Parametric: return "parametric";
    }
    return "?";
}

std::vector<Kind> diagram_kinds() {
    std::vector<Kind> out;
    for (int id = 1; id <= 11; ++id) out.push_back(kind_from_solution_id(id));
    return out;
}

bool ed_membership(Kind kind, double h_max, double h1_max, const DiagramConfig& cfg) {
    if (kind == Kind::H1Drop) return h1_max > 0.0 && ray_margin(kind, cfg, 0.0, h1_max) > 0.0;
    if (kind == Kind::HDrop) return h_max > 0.0 && ray_margin(kind, cfg, 1.0, h_max) > 0.0;
    if (!(h_max > 0.0) || !(h1_max > 0.0)) return false;
    try {
        const HeightPair prm = params_from_maxima(kind, cfg.sigma, h1_max, h_max);
        if (!(prm.h1 > 0.0) || !(prm.h > 0.0)) return false;
        // Points the forward transform cannot reach are outside.
        const HeightPair back = maxima_from_params(kind, cfg.sigma, prm.h1, prm.h);
        if (std::abs(back.h1 - h1_max) > 1e-9 * h1_max || std::abs(back.h - h_max) > 1e-9 * h_max) return false;
        return existence_report(spec_for(kind, cfg, prm.h1, prm.h)).ok();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<EDBoundary> ed_boundaries(const DiagramConfig& cfg) {
    cfg.validate();
    const auto kinds = diagram_kinds();
    std::vector<std::vector<EDBoundary>> per(kinds.size());
    parallel_rows(static_cast<int>(kinds.size()), cfg.threads,
                  [&](int k) { per[k] = boundaries_for(kinds[k], cfg); });
    std::vector<EDBoundary> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::pair<DiagramPoint, DiagramPoint> symmetric_points(const DiagramConfig& cfg) {
    const double p = cfg.well_depth;
    return {{0.0, cfg.L * std::sqrt(p / (2.0 * (cfg.sigma + 1.0)))}, {cfg.L * std::sqrt(p / 2.0), 0.0}};
}

DiagramPoint reflect(const DiagramPoint& p, double sigma) {
    const double r = std::sqrt(sigma + 1.0);
    return {r * p.h1_max, p.h_max / r};
}

int reflected_id(int id) {
    switch (id) {
        case 1: return 2;
        case 2: return 1;
        case 3: return 4;
        case 4: return 3;
        case 6: return 7;
        case 7: return 6;
        case 10: return 11;
        case 11: return 10;
        default: return id;
    }
}

double pentagon_constant(const DiagramConfig& cfg) { return cfg.L * std::sqrt(cfg.sigma * cfg.well_depth / 2.0); }

MembershipGrid membership_grid(const DiagramConfig& cfg) {
    cfg.validate();
    MembershipGrid g;
    g.kinds = diagram_kinds();
    const int n = cfg.resolution;
    for (int i = 0; i < n; ++i) {
        g.h_max.push_back(cfg.h_max_range.first + (cfg.h_max_range.second - cfg.h_max_range.first) * i / (n - 1));
        g.h1_max.push_back(cfg.h1_max_range.first + (cfg.h1_max_range.second - cfg.h1_max_range.first) * i / (n - 1));
    }
    g.member.assign(g.kinds.size() * n * n, 0);
    parallel_rows(n, cfg.threads, [&](int i1) {
        for (std::size_t k = 0; k < g.kinds.size(); ++k)
            for (int i = 0; i < n; ++i)
                g.member[(k * n + i1) * n + i] = ed_membership(g.kinds[k], g.h_max[i], g.h1_max[i1], cfg);
    });
    return g;
}

SymmetryReport reflect_check(const DiagramConfig& cfg) {
    cfg.validate();
    if (cfg.resolution < 50) throw UsageError("reflect_check: resolution must be >= 50");
    const int n = cfg.resolution;
    const auto [I, II] = symmetric_points(cfg);
    // Cell centres; the reflection swaps the two cell indices exactly.
    DiagramConfig grid = cfg;
    const double dh = 2.0 * II.h_max / n, dh1 = 2.0 * I.h1_max / n;
    grid.h_max_range = {0.5 * dh, 2.0 * II.h_max - 0.5 * dh};
    grid.h1_max_range = {0.5 * dh1, 2.0 * I.h1_max - 0.5 * dh1};
    const MembershipGrid g = membership_grid(grid);
    const std::size_t nk = g.kinds.size();

    auto near_boundary = [&](int i1, int i) {
        for (std::size_t k = 0; k < nk; ++k) {
            const bool c = g.at(k, i1, i);
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b) {
                    const int j1 = i1 + a, j = i + b;
                    if (j1 < 0 || j < 0 || j1 >= n || j >= n) continue;
                    if (g.at(k, j1, j) != c) return true;
                }
        }
        return false;
    };

    SymmetryReport rep;
    rep.resolution = n;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i = 0; i < n; ++i) {
            // Reflected cell of (h index i, h1 index i1) is (h index i1, h1 index i).
            if (near_boundary(i1, i) || near_boundary(i, i1)) {
                ++rep.boundary_excluded;
                continue;
            }
            ++rep.checked;
            bool ok = true;
            for (std::size_t k = 0; k < nk; ++k) {
                const int partner = reflected_id(solution_id(g.kinds[k])) - 1;
                if (g.at(k, i1, i) != g.at(static_cast<std::size_t>(partner), i, i1)) ok = false;
            }
            if (!ok) {
                ++rep.violations;
                if (rep.examples.size() < 10)
                    rep.examples.push_back("h_max=" + format_double(g.h_max[i]) +
                                           ",h1_max=" + format_double(g.h1_max[i1]));
            }
        }
    return rep;
}

void write_membership_csv(std::ostream& os, const MembershipGrid& g) {
    os << "h_max,h1_max,solution_id,member\n";
    for (std::size_t i1 = 0; i1 < g.h1_max.size(); ++i1)
        for (std::size_t i = 0; i < g.h_max.size(); ++i)
            for (std::size_t k = 0; k < g.kinds.size(); ++k)
                os << format_double(g.h_max[i]) << ',' << format_double(g.h1_max[i1]) << ','
                   << solution_id(g.kinds[k]) << ',' << (g.at(k, i1, i) ? 1 : 0) << '\n';
}

void write_boundary_csv(std::ostream& os, const std::vector<EDBoundary>& b) {
    os << "solution_id,segment,idx,h_max,h1_max\n";
    for (const auto& e : b)
        for (std::size_t i = 0; i < e.points.size(); ++i)
            os << e.solution_id << ',' << e.segment << ',' << i << ',' << format_double(e.points[i].h_max) << ','
               << format_double(e.points[i].h1_max) << '\n';
}

}  // namespace bilayer
