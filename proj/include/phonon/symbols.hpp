#pragma once

/// @file symbols.hpp
/// Laplace-Fourier symbols a1, a2, a3 and the initial-data functionals F1, F2
/// of the rescaled linear equation, their eps -> 0 limits and the constants
/// kappa1, kappa2, kappa3.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace phonon {

/// Smooth model of the collision frequency: V(k) = Wt(|k|) |sin pi k|^{5/3}.
/// Wt is tabulated by Chebyshev interpolation of the closed-form V on dyadic
/// pieces [2^{-j-1}, 2^{-j}], j = 1..levels; below 2^{-levels-1} it follows
/// v0 + a |k|^{2/3}, matched to the last piece, with v0 from Richardson
/// extrapolation of the same asymptotic form.
class VModel {
public:
    explicit VModel(int levels = 20, int degree = 20, double rel_tol = 1e-11);

    double Wt(double k) const;
    double V(double k) const;
    double v0() const { return v0_; }
    /// max relative deviation from the closed-form V at the check points used during construction
    double fit_error() const { return fit_error_; }

private:
    struct Piece {
        double lo, hi;
        std::vector<double> coef;
    };
    std::vector<Piece> pieces_;
    double k_min_ = 0.0;
    double tail_a_ = 0.0;
    double v0_ = 0.0;
    double fit_error_ = 0.0;
};

/// int_0^inf z^a / (1 + z^2) dz for |a| < 1.
double mellin_integral(double a);

struct KappaSet {
    double v0 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    double kappa_eff = 0.0;  ///< kappa1 - kappa2^2 / kappa3
};

/// kappa1 = 6/5 (pi/v0)^{3/5} M(3/5), kappa2 = 6/5 M(0), kappa3 = 6/5 (v0/pi)^{3/5} M(-3/5).
KappaSet compute_kappas(double v0);

struct Symbols {
    std::complex<double> a1, a2, a3;
};

/// a1 = eps^{-8/5} int (V/D - 1) V, a2 = eps^{-1} int (V/D - 1) V/omega,
/// a3 = eps^{-2/5} int (V/D - 1) V/omega^2, with D = eps^{8/5} p + V + i eps omega' xi.
Symbols symbols_eps(const VModel& model, double eps, double p, double xi, double quad_tol = 1e-11);
std::complex<double> a1_eps(const VModel& model, double eps, double p, double xi, double quad_tol = 1e-11);
std::complex<double> a2_eps(const VModel& model, double eps, double p, double xi, double quad_tol = 1e-11);
std::complex<double> a3_eps(const VModel& model, double eps, double p, double xi, double quad_tol = 1e-11);

/// (-p - kappa1 |xi|^{8/5}, -kappa2 |xi|, -kappa3 |xi|^{2/5}).
std::array<double, 3> limit_symbols(const KappaSet& kappas, double p, double xi);

using KFunction = std::function<std::complex<double>(double)>;

/// F1 = int V/D f0 dk and F2 = eps^{3/5} int V/D f0/omega dk.
std::complex<double> F1_eps(const VModel& model, const KFunction& f0, double eps, double p, double xi,
                            double quad_tol = 1e-11);
std::complex<double> F2_eps(const VModel& model, const KFunction& f0, double eps, double p, double xi,
                            double quad_tol = 1e-11);

struct LowerBoundScan {
    double margin = 0.0;  ///< min |a3| / (eps^{6/25} p^{2/5} + |xi|^{2/5})
    double p_at = 0.0;
    double xi_at = 0.0;
    double max_re_a3 = 0.0;  ///< largest real part seen (expected < 0)
};

/// Scans a geometric (p, xi) lattice over [1e-3, K]^2 with `points` values per axis.
LowerBoundScan a3_lower_bound_check(const VModel& model, double eps, double K, int points = 9,
                                    double quad_tol = 1e-10);

struct RateFit {
    std::vector<double> errors;
    double slope = 0.0;
    double residual = 0.0;  ///< rms of the log-log fit
};

struct ConvergenceStudy {
    std::vector<double> eps;
    std::array<RateFit, 3> fits;
};

/// |a_i^eps - limit_i| over a decreasing eps list (at least three entries).
ConvergenceStudy convergence_study(const VModel& model, const KappaSet& kappas, double p, double xi,
                                   const std::vector<double>& eps_list, double quad_tol = 1e-11);

/// Least-squares slope of log y against log x.
RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace phonon
