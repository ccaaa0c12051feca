#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bilayer/blocks.hpp"
#include "bilayer/potential.hpp"
#include "bilayer/profile.hpp"

namespace bilayer {

enum class Kind {
    Lens,
    InternalDrop,
    H1Drop,
    HDrop,
    ZigZag,
    SessileLens,
    SessileInternalDrop,
    TwoDrops,
    TwoSideSessileZigZag,
    H1SessileZigZag,
    HSessileZigZag,
    LensOnZigZag,
};

inline constexpr Kind kAllKinds[] = {
    Kind::Lens,         Kind::InternalDrop,         Kind::H1Drop,          Kind::HDrop,
    Kind::ZigZag,       Kind::SessileLens,          Kind::SessileInternalDrop, Kind::TwoDrops,
    Kind::TwoSideSessileZigZag, Kind::H1SessileZigZag, Kind::HSessileZigZag, Kind::LensOnZigZag,
};

const char* kind_name(Kind k);
Kind kind_from_string(const std::string& s);
/// Diagram numbering 1..11; 0 for LensOnZigZag which has no diagram entry.
int solution_id(Kind k);
Kind kind_from_solution_id(int id);

struct CompositeSpec {
    Kind kind = Kind::Lens;
    double sigma = 0.2;
    double L = 2.0;
    double well_depth = 1.0 / 6.0;
    double h1_m = 0.0;
    double h_m = 0.0;
    std::optional<double> shift;  // free shift x~_c, TwoSideSessileZigZag only
    bool inverted = false;

    double hbar() const { return h_m / h1_m; }
};

struct Constraint {
    std::string id;
    double margin = 0.0;
    bool satisfied() const { return margin > 0.0; }
};

struct ConstraintReport {
    std::vector<Constraint> items;

    bool ok() const;
    const Constraint* first_violation() const;
    /// One `constraint_id=margin` line per constraint.
    std::string to_text() const;
};

struct ConstraintViolation : std::runtime_error {
    ConstraintReport report;
    ConstraintViolation(const std::string& what, ConstraintReport r)
        : std::runtime_error(what), report(std::move(r)) {}
};

struct Segment {
    double x0 = 0.0;
    double x1 = 0.0;
    bool utf = true;
    BulkPiece piece;
};

struct LeadingOrderSolution {
    CompositeSpec spec;
    std::optional<double> lambda1_0;
    std::optional<double> lambda2_0;
    std::vector<CLDescriptor> cls;  // ordered left to right
    std::vector<Segment> h1_segments;
    std::vector<Segment> h_segments;
    double max_h1 = 0.0;
    double max_h = 0.0;
    std::map<std::string, double> constants;
    std::vector<std::string> flags;

    /// Leading-order heights (0 in UTF regions).
    double h1_at(double x) const;
    double h_at(double x) const;
    bool has_flag(const std::string& f) const;
    /// CL locations as positive distances from x = 0 (the s-values),
    /// ordered as the solution labels them (s, s1, s2, s3).
    std::vector<double> cl_distances() const;
};

ConstraintReport existence_report(const CompositeSpec& spec);

/// Dispatches on spec.kind. Throws ConstraintViolation outside the existence domain.
LeadingOrderSolution build(const CompositeSpec& spec);
/// Same layout without constraint enforcement (boundary studies); may be degenerate.
LeadingOrderSolution build_unchecked(const CompositeSpec& spec);

LeadingOrderSolution build_one_cl(const CompositeSpec& spec);
LeadingOrderSolution build_zigzag(const CompositeSpec& spec);
LeadingOrderSolution build_sessile_lens(const CompositeSpec& spec);
LeadingOrderSolution build_sessile_internal_drop(const CompositeSpec& spec);
LeadingOrderSolution build_two_drops(const CompositeSpec& spec);
LeadingOrderSolution build_two_side_sessile_zigzag(const CompositeSpec& spec);
LeadingOrderSolution build_h1_sessile_zigzag(const CompositeSpec& spec);
LeadingOrderSolution build_h_sessile_zigzag(const CompositeSpec& spec);
LeadingOrderSolution build_lens_on_zigzag(const CompositeSpec& spec);

/// Mirror x -> -L - x.
LeadingOrderSolution mirrored(const LeadingOrderSolution& sol);

// Matching systems -----------------------------------------------------------

const std::vector<std::string>& matching_unknown_names(Kind k);
std::vector<double> matching_residual(Kind k, const std::vector<double>& unknowns,
                                      const CompositeSpec& spec);
/// Closed-form values of the unknowns in matching_unknown_names order.
std::vector<double> matching_unknowns(const LeadingOrderSolution& sol);

struct OracleOptions {
    int max_iter = 100;
    double tol = 1e-13;
    double fd_step = 1e-7;
};

struct OracleResult {
    std::vector<double> x;
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

/// Damped Gauss-Newton with a finite-difference Jacobian (least squares for the
/// overdetermined systems).
OracleResult oracle_solve(Kind k, std::vector<double> x0, const CompositeSpec& spec,
                          const OracleOptions& opt = {});

// Max transformations ----------------------------------------------------------

struct HeightPair {
    double h1 = 0.0;
    double h = 0.0;
};

double two_side_C4(double sigma, double h1_m, double h_m);
double two_side_C2(double sigma, double h1_m, double h_m);

/// (h1_m, h_m) -> realized maxima (max h1, max h).
HeightPair maxima_two_side(double sigma, double h1_m, double h_m);
HeightPair params_two_side(double sigma, double max_h1, double max_h);
HeightPair maxima_h1_sessile(double sigma, double h1_m, double h_m);
HeightPair params_h1_sessile(double sigma, double max_h1, double max_h);
HeightPair maxima_h_sessile(double sigma, double h1_m, double h_m);
HeightPair params_h_sessile(double sigma, double max_h1, double max_h);
HeightPair maxima_sessile_lens(double sigma, double h1_m, double h_m);
HeightPair params_sessile_lens(double sigma, double max_h1, double max_h);
HeightPair maxima_sessile_internal_drop(double sigma, double h1_m, double h_m);
HeightPair params_sessile_internal_drop(double sigma, double max_h1, double max_h);

/// Parameterization heights for a kind given realized maxima (identity where the
/// maxima coincide with the parameters).
HeightPair params_from_maxima(Kind k, double sigma, double max_h1, double max_h);
HeightPair maxima_from_params(Kind k, double sigma, double h1_m, double h_m);

// Checks and sampling -----------------------------------------------------------

struct LambdaReport {
    bool partial = false;  // one of the pressures is undetermined
    double eq13_lhs = 0.0;
    double eq13_rhs = 0.0;
    double eq13_residual = 0.0;
    double avg_pi_h = 0.0;   // compare with lambda1_0
    double avg_pi_h1 = 0.0;  // compare with lambda2_0
};

LambdaReport lambda_relation_check(const LeadingOrderSolution& sol, const PotentialParams& p,
                                   int grid_points = 4001);

Profile sample_profile(const LeadingOrderSolution& sol, const PotentialParams& p, int grid_points,
                       bool mollify);

/// Pointwise evaluation behind sample_profile (UTF floors, optional CL mollifiers).
class ProfileSampler {
public:
    ProfileSampler(const LeadingOrderSolution& sol, const PotentialParams& p, bool mollify);
    ~ProfileSampler();
    ProfileSampler(ProfileSampler&&) noexcept;
    ProfileSampler& operator=(ProfileSampler&&) noexcept;

    HeightPair at(double x) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace bilayer
