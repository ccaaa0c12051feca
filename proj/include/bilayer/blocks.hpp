#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bilayer/potential.hpp"

namespace bilayer {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BulkKind { TypeI_h1, TypeI_h, TypeII_h1, TypeIII_h };

/// Curvature coefficient of a bulk parabola as fixed by the pressures.
double bulk_coeff(BulkKind kind, double lambda1, double lambda2, double sigma);

/// h(x) = coeff (x - center)^2 + slope (x - center) + offset.
/// slope is zero for ordinary parabolas; it is only used for the degenerate
/// linear segments where the curvature coefficient vanishes.
struct BulkPiece {
    BulkKind kind = BulkKind::TypeI_h1;
    double coeff = 0.0;
    double center = 0.0;
    double offset = 0.0;
    double slope = 0.0;

    double value(double x) const {
        const double d = x - center;
        return coeff * d * d + slope * d + offset;
    }
    double derivative(double x) const { return 2.0 * coeff * (x - center) + slope; }

    /// Piece with given curvature passing through (x0, value) with the given slope.
    static BulkPiece anchored(BulkKind kind, double coeff, double x0, double value, double slope);
};

/// Ultra-thin film height eps + eps^2 P/(l-n), where P is the disjoining
/// pressure the film has to balance.
double utf_height(double pressure, const PotentialParams& p);

/// Film heights where both layers are ultra-thin (h1_floor, h_floor) and where
/// only one is, under bulk h (h1_under_bulk) or over bulk h1 (h_over_bulk).
struct UTFFloor {
    double h1_floor = 0.0;
    double h_floor = 0.0;
    double h1_under_bulk = 0.0;
    double h_over_bulk = 0.0;
};

UTFFloor utf_floor(double lambda1, double lambda2, double sigma, const PotentialParams& p);

enum class CLType { I, II, III, IV };

enum class Orientation { Rising, Falling };

struct CLDescriptor {
    CLType cl_type = CLType::I;
    double position = 0.0;  // x-location, inside (-L, 0)
    Orientation orientation = Orientation::Rising;  // of the vanishing layer, left to right
    double slope_jump = 0.0;  // change of the vanishing layer slope across the CL
    int layer = 0;  // 0: h1 vanishes at this CL, 1: h vanishes
};

const char* to_string(CLType t);
CLType cl_type_from_string(const std::string& s);

double contact_angle(CLType t, double sigma, double well_depth);

/// Tabulated inner CL profile H(z) in eps units: H -> 1 as z -> -inf and
/// H ~ angle * z as z -> +inf (z shifted so the far-field line passes through 0).
class InnerTable {
public:
    InnerTable(CLType t, double sigma, const PotentialParams& p);

    double height(double z) const;
    double angle() const { return angle_; }
    double z_max() const { return z_.back(); }
    /// Offset c in H ~ angle*z_raw + c before the shift (diagnostic).
    double asymptotic_offset() const { return offset_; }
    /// Types III and IV: deviation C(z) - 1 of the ultra-thin companion layer,
    /// from a*C'' = b*Pi(C) - Pi(H(z)) with C -> 1 on both sides ((a, b) =
    /// (sigma, sigma+1) for III, (sigma, 1) for IV). Zero for types I and II.
    double companion(double z) const;

private:
    void solve_companion(double b, double a, const PotentialParams& p);

    std::vector<double> z_;
    std::vector<double> H_;
    double angle_ = 0.0;
    double offset_ = 0.0;
    double tail_rate_ = 0.0;
    double comp_z0_ = 0.0;
    double comp_dz_ = 1.0;
    std::vector<double> comp_;
};

struct InnerSample {
    double z;
    double h;
};

/// Sampled mollifier on [-half_width, half_width] (eps units), rising orientation;
/// reverse the z-order for the falling one.
std::vector<InnerSample> cl_inner_profile(CLType t, double sigma, const PotentialParams& p,
                                          double half_width, int samples = 401);

}  // namespace bilayer
