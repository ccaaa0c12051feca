#pragma once

#include <stdexcept>
#include <string>

namespace bilayer {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Lennard-Jones type potential phi(h) = 1/(l h^l) - 1/(n h^n) with scale eps.
struct PotentialParams {
    int n = 2;
    int l = 3;
    double eps = 0.01;

    double well_depth() const { return 1.0 / n - 1.0 / l; }
    void validate() const;
};

// Heights below this multiple of eps are refused (h^-(l+1) overflows long before
// anything physical happens there).
inline constexpr double kMinHeightFactor = 1e-3;

double phi(const PotentialParams& p, double h);
double phi_deriv(const PotentialParams& p, double h);
double phi_eps(const PotentialParams& p, double h1, double h);
double pi_eps(const PotentialParams& p, double h);
double pi_eps_deriv(const PotentialParams& p, double h);

}  // namespace bilayer
