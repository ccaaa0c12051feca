#include "bilayer/potential.hpp"

#include <cmath>

namespace bilayer {

void PotentialParams::validate() const {
    if (n < 2 || l <= n) throw DomainError("potential exponents must satisfy l > n >= 2");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
}

namespace {

void check_unscaled(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("potential evaluated at non-positive height");
}

void check_scaled(const PotentialParams& p, double h) {
    if (!(h >= kMinHeightFactor * p.eps) || !std::isfinite(h))
        throw DomainError("height " + std::to_string(h) + " below admissible floor");
}

}  // namespace

double phi(const PotentialParams& p, double h) {
    check_unscaled(h);
    return 1.0 / (p.l * std::pow(h, p.l)) - 1.0 / (p.n * std::pow(h, p.n));
}

double phi_deriv(const PotentialParams& p, double h) {
    check_unscaled(h);
    return std::pow(h, -(p.n + 1)) - std::pow(h, -(p.l + 1));
}

double phi_eps(const PotentialParams& p, double h1, double h) {
    check_scaled(p, h1);
    check_scaled(p, h);
    return phi(p, h1 / p.eps) + phi(p, h / p.eps);
}

double pi_eps(const PotentialParams& p, double h) {
    check_scaled(p, h);
    const double r = p.eps / h;
    return (std::pow(r, p.n + 1) - std::pow(r, p.l + 1)) / p.eps;
}

double pi_eps_deriv(const PotentialParams& p, double h) {
    check_scaled(p, h);
    const double r = p.eps / h;
    // d/dh of r^k is -k r^k / h
    return (-(p.n + 1) * std::pow(r, p.n + 1) + (p.l + 1) * std::pow(r, p.l + 1)) / (p.eps * h);
}

}  // namespace bilayer
