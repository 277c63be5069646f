#pragma once

/// @file collision.hpp
/// Four-phonon collision operator C(W) reduced to one integral over k2 on the
/// resonant manifold, its conservation and entropy checks, the quadratic form Q
/// and the finite-difference link to the kernel form of L.

#include <functional>
#include <utility>
#include <vector>

#include "phonon/grid.hpp"

namespace phonon {

/// Phonon density W(k) > 0 as a function of the symmetric coordinate.
using Density = std::function<double(double)>;

/// W_{a,b}(k) = 1/(a + b omega(k)). Requires a >= 0, b > 0.
Density equilibrium(double a, double b);

/// Throws validation_error unless W is finite and strictly positive at every node.
void check_positive(const Density& W, const WaveGrid& grid);

/// Resonant integral
///   int dk2 g(k1, k2, k3) / |omega'(k1) - omega'(k3)|
/// with k1 the nontrivial resonance partner of (k, k2) and k3 = k + k1 - k2.
double resonant_integral(double k, const std::function<double(double, double, double)>& g,
                         double quad_tol = 1e-10);

/// C(W)(k) with weight omega omega1 omega2 omega3 on the bracket
/// W1 W2 W3 + W W2 W3 - W W1 W3 - W W1 W2.
double evaluate_C(const Density& W, double k, double quad_tol = 1e-10);

/// Same, for U = omega W given directly (finite at k = 0 for W ~ 1/omega).
double evaluate_C_scaled(const Density& U, double k, double quad_tol = 1e-10);

/// Midpoint sums (sum_i C(k_i) w, sum_i omega_i C(k_i) w) and sum_i |C(k_i)| w.
struct ConservationMoments {
    double mass = 0.0;
    double energy = 0.0;
    double l1 = 0.0;
};
ConservationMoments conservation_check(const Density& W, const WaveGrid& grid, double quad_tol = 1e-10);

/// int W^{-1} C(W) dk by adaptive quadrature in k.
double entropy_production(const Density& W, double quad_tol = 1e-10);

/// Exact linearization of the reduced C at W = T/omega, divided by T^2 W:
/// L_red f = lim (1/(eps W)) C(W (1 + eps f)) / T^2.
double linearized_reduced(const std::function<double(double)>& f, double k, double quad_tol = 1e-10);

/// Ratio c = L_red / L between the reduced and kernel forms, from the loss
/// terms at k_ref.
double calibrate_normalization(double k_ref = 0.25, double quad_tol = 1e-11);

struct LinearizationStudy {
    std::vector<double> eps;
    std::vector<double> errors;  ///< max over the sample points
    double order = 0.0;          ///< least-squares slope of log error vs log eps
    double c = 0.0;
};

/// Measures max_k |(1/(eps W T^2)) C(W (1 + eps f)) - c L f| for W = T/omega
/// at the sample points, L from the closed-form kernel.
LinearizationStudy linearization_consistency(const std::function<double(double)>& f,
                                             const std::vector<double>& eps_list,
                                             const std::vector<double>& sample_k, double c,
                                             double T = 1.0, double quad_tol = 1e-11);

/// Symmetric bilinear form with Q(f,f) = omega int [2(omega - omega3)(f1 f2 - f f3)
/// + (omega + omega1)(f2 f3 - f f1)] on the resonant manifold, scaled by 1/c to
/// the units of the kernel form of L.
double quadratic_Q(const std::function<double(double)>& f, const std::function<double(double)>& g, double k,
                   double c, double quad_tol = 1e-10);

}  // namespace phonon
