#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bilayer {

/// Sampled (x, h1, h) triples on a grid over [-L, 0].
struct Profile {
    std::vector<double> x;
    std::vector<double> h1;
    std::vector<double> h;
    bool resolution_warning = false;

    std::size_t size() const { return x.size(); }
    double length() const { return x.empty() ? 0.0 : x.back() - x.front(); }
};

/// Full-precision, locale-independent number formatting.
std::string format_double(double v);

void write_profile_csv(std::ostream& os, const Profile& p,
                       const std::vector<double>* lambda1 = nullptr,
                       const std::vector<double>* lambda2 = nullptr);
void write_profile_csv(const std::string& path, const Profile& p,
                       const std::vector<double>* lambda1 = nullptr,
                       const std::vector<double>* lambda2 = nullptr);
/// Reads `x,h1,h` (extra columns ignored).
Profile read_profile_csv(const std::string& path);

/// Linear resampling onto n uniform nodes spanning the same interval.
Profile resample(const Profile& p, int n);

/// Adds amplitude * cos(pi (x - x_0) / length) to both layers. The mode is odd about
/// the centre and has zero trapezoid mean on a uniform grid, so it breaks an exact
/// mirror symmetry without changing the masses.
void perturb_antisymmetric(Profile& p, double amplitude);

}  // namespace bilayer
