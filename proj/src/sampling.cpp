#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "bilayer/composites.hpp"

namespace bilayer {

namespace {

const Segment* find_segment(const std::vector<Segment>& segs, double x) {
    for (auto it = segs.rbegin(); it != segs.rend(); ++it)
        if (x >= it->x0) return &*it;
    return segs.empty() ? nullptr : &segs.front();
}

// Nearest CL (by position) satisfying pred, or nullptr.
template <class Pred>
const CLDescriptor* nearest_cl(const std::vector<CLDescriptor>& cls, double x, Pred pred) {
    const CLDescriptor* best = nullptr;
    for (const auto& c : cls) {
        if (!pred(c)) continue;
        if (!best || std::abs(c.position - x) < std::abs(best->position - x)) best = &c;
    }
    return best;
}

}  // namespace

struct ProfileSampler::Impl {
    LeadingOrderSolution sol;
    PotentialParams p;
    bool mollify;
    UTFFloor fl;
    mutable std::map<CLType, std::unique_ptr<InnerTable>> tables;

    const InnerTable& table(CLType t) const {
        auto& slot = tables[t];
        if (!slot) slot = std::make_unique<InnerTable>(t, sol.spec.sigma, p);
        return *slot;
    }

    // Mollified vanishing-layer height and its deviation from the leading-order
    // value in eps units.
    std::pair<double, double> vanishing(const CLDescriptor& cl, const Segment& seg, double x, double floor) const {
        const InnerTable& tab = table(cl.cl_type);
        const double eps = p.eps;
        if (!seg.utf) {
            const double piece = std::max(seg.piece.value(x), 0.0);
            const double zeta = piece / eps;
            const double H = tab.height(zeta / tab.angle());
            return {piece + eps * (H - zeta), H - zeta};
        }
        const double z = -std::abs(x - cl.position) / eps;
        const double H = tab.height(z);
        return {floor + eps * (H - 1.0), H - 1.0};
    }

    HeightPair at(double x) const {
        double vals[2];
        double corr[2] = {0.0, 0.0};  // companion corrections indexed by the corrected layer
        for (int layer = 0; layer < 2; ++layer) {
            const auto& segs = layer == 0 ? sol.h1_segments : sol.h_segments;
            const bool other_bulk = !find_segment(layer == 0 ? sol.h_segments : sol.h1_segments, x)->utf;
            const double floor = layer == 0 ? (other_bulk ? fl.h1_under_bulk : fl.h1_floor)
                                            : (other_bulk ? fl.h_over_bulk : fl.h_floor);
            const Segment* seg = find_segment(segs, x);
            vals[layer] = seg->utf ? floor : std::max(seg->piece.value(x), floor);
            if (!mollify) continue;
            const CLDescriptor* cl =
                nearest_cl(sol.cls, x, [layer](const CLDescriptor& c) { return c.layer == layer; });
            if (!cl) continue;
            const auto [h, dev] = vanishing(*cl, *seg, x, floor);
            vals[layer] = h;
            // Type I moves h by -dev, type II moves h1 by -dev/(sigma+1), across the
            // whole bulk segment of the companion since dev decays only algebraically.
            // A companion sitting on its UTF is left alone.
            if (cl->cl_type == CLType::I && !find_segment(sol.h_segments, x)->utf) corr[1] = -p.eps * dev;
            if (cl->cl_type == CLType::II && !find_segment(sol.h1_segments, x)->utf)
                corr[0] = -p.eps * dev / (sol.spec.sigma + 1.0);
            // Types III and IV lift the ultra-thin companion by its own inner layer.
            if ((cl->cl_type == CLType::III || cl->cl_type == CLType::IV) && !other_bulk) {
                const double z = (cl->orientation == Orientation::Rising ? x - cl->position : cl->position - x) / p.eps;
                corr[1 - layer] = p.eps * table(cl->cl_type).companion(z);
            }
        }
        return {std::max(vals[0] + corr[0], 0.5 * p.eps), std::max(vals[1] + corr[1], 0.5 * p.eps)};
    }
};

ProfileSampler::ProfileSampler(const LeadingOrderSolution& sol, const PotentialParams& p, bool mollify) {
    p.validate();
    const UTFFloor fl = utf_floor(sol.lambda1_0.value_or(0.0), sol.lambda2_0.value_or(0.0), sol.spec.sigma, p);
    if (!(std::min({fl.h1_floor, fl.h_floor, fl.h1_under_bulk, fl.h_over_bulk}) > 0.5 * p.eps))
        throw DomainError("pressures too large for an ultra-thin film at this eps");
    impl_ = std::make_unique<Impl>(Impl{sol, p, mollify, fl, {}});
}

ProfileSampler::~ProfileSampler() = default;
ProfileSampler::ProfileSampler(ProfileSampler&&) noexcept = default;
ProfileSampler& ProfileSampler::operator=(ProfileSampler&&) noexcept = default;

HeightPair ProfileSampler::at(double x) const { return impl_->at(x); }

Profile sample_profile(const LeadingOrderSolution& sol, const PotentialParams& p, int grid_points, bool mollify) {
    if (grid_points < 2) throw UsageError("sample_profile: need at least 2 grid points");
    const ProfileSampler sampler(sol, p, mollify);
    const double L = sol.spec.L;
    Profile out;
    out.resolution_warning = mollify && grid_points < 16.0 * L / p.eps;
    for (int i = 0; i < grid_points; ++i) {
        const double x = i == grid_points - 1 ? 0.0 : -L + L * i / (grid_points - 1);
        const HeightPair v = sampler.at(x);
        out.x.push_back(x);
        out.h1.push_back(v.h1);
        out.h.push_back(v.h);
    }
    return out;
}

LambdaReport lambda_relation_check(const LeadingOrderSolution& sol, const PotentialParams& p, int grid_points) {
    LambdaReport rep;
    rep.partial = !sol.lambda1_0 || !sol.lambda2_0;
    const double l1 = sol.lambda1_0.value_or(0.0), l2 = sol.lambda2_0.value_or(0.0);
    const Profile prof = sample_profile(sol, p, grid_points, true);
    const std::size_t n = prof.size();
    const double h0 = prof.h.back(), hL = prof.h.front();
    const double h10 = prof.h1.back(), h1L = prof.h1.front();
    rep.eq13_lhs = l1 * (h0 - hL) + l2 * (h10 - h1L);
    rep.eq13_rhs = phi(p, h0 / p.eps) + phi(p, h10 / p.eps) - phi(p, hL / p.eps) - phi(p, h1L / p.eps);
    rep.eq13_residual = rep.eq13_lhs - rep.eq13_rhs;
    double ih = 0.0, ih1 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = prof.x[i + 1] - prof.x[i];
        ih += 0.5 * dx * (pi_eps(p, prof.h[i]) + pi_eps(p, prof.h[i + 1]));
        ih1 += 0.5 * dx * (pi_eps(p, prof.h1[i]) + pi_eps(p, prof.h1[i + 1]));
    }
    rep.avg_pi_h = ih / sol.spec.L;
    rep.avg_pi_h1 = ih1 / sol.spec.L;
    return rep;
}

}  // namespace bilayer
