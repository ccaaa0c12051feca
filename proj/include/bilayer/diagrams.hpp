#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bilayer/composites.hpp"

namespace bilayer {

/// Axes are realized maxima: h_max horizontal, h1_max vertical.
struct DiagramConfig {
    double sigma = 0.2;
    double L = 2.0;
    double well_depth = 1.0 / 6.0;
    std::pair<double, double> h_max_range{0.0, 1.2};
    std::pair<double, double> h1_max_range{0.0, 1.2};
    int resolution = 200;
    int threads = 1;

    void validate() const;
    /// Ranges spanning twice the symmetric points, which the reflection maps onto itself.
    static DiagramConfig around_symmetric_points(double sigma, double L, double well_depth, int resolution);
};

struct DiagramPoint {
    double h_max = 0.0;
    double h1_max = 0.0;
};

enum class CurveKind { Line, Parabola, Parametric };
const char* to_string(CurveKind k);

struct EDBoundary {
    int solution_id = 0;
    int segment = 0;
    CurveKind curve_kind = CurveKind::Line;
    std::vector<DiagramPoint> points;
};

/// Diagram members, numbered 1..11.
std::vector<Kind> diagram_kinds();

/// Open existence domain membership in realized-maxima coordinates.
bool ed_membership(Kind kind, double h_max, double h1_max, const DiagramConfig& cfg);

std::vector<EDBoundary> ed_boundaries(const DiagramConfig& cfg);

/// Point I on the h1_max axis, point II on the h_max axis.
std::pair<DiagramPoint, DiagramPoint> symmetric_points(const DiagramConfig& cfg);

/// Affine reflection fixing h = sqrt(sigma+1) h1 along (1, -1/sqrt(sigma+1)).
DiagramPoint reflect(const DiagramPoint& p, double sigma);
/// Partner id under the reflection (1<->2, 3<->4, 6<->7, 10<->11, others fixed).
int reflected_id(int solution_id);

/// Pentagon line constant L sqrt(sigma |phi(1)| / 2).
double pentagon_constant(const DiagramConfig& cfg);

struct SymmetryReport {
    int resolution = 0;
    long checked = 0;
    long boundary_excluded = 0;
    long violations = 0;
    std::vector<std::string> examples;  // first few violating points
};

/// Compares memberships at cell centres of [0, 2 h_II] x [0, 2 h1_I] with those at
/// the reflected cell; cells within one cell width of a boundary are skipped.
SymmetryReport reflect_check(const DiagramConfig& cfg);

struct MembershipGrid {
    std::vector<double> h_max;   // axis samples
    std::vector<double> h1_max;
    std::vector<Kind> kinds;
    std::vector<unsigned char> member;  // [kind][i1][i] row-major

    bool at(std::size_t kind_idx, std::size_t i1, std::size_t i) const {
        return member[(kind_idx * h1_max.size() + i1) * h_max.size() + i] != 0;
    }
};

MembershipGrid membership_grid(const DiagramConfig& cfg);

void write_membership_csv(std::ostream& os, const MembershipGrid& g);
void write_boundary_csv(std::ostream& os, const std::vector<EDBoundary>& b);

}  // namespace bilayer
