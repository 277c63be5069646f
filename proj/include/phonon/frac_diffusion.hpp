#pragma once

/// @file frac_diffusion.hpp
/// Exact Fourier-space solution of the limiting equation
/// dT/dt + kappa / Tbar^{6/5} (-Laplacian)^{4/5} T = 0 on a periodic box,
/// the slaved amplitude S and transforms between samples and modes.

#include <complex>
#include <vector>

#include "phonon/symbols.hpp"

namespace phonon {

using ComplexVector = std::vector<std::complex<double>>;

/// Signed mode index for FFT slot m of an M-point transform (m > M/2 maps to m - M).
int signed_mode(int m, int M);

/// xi_j = 2 pi j / Lx in FFT order.
std::vector<double> mode_wavenumbers(int M, double Lx);

struct DiffusionParams {
    double kappa_eff = 0.0;
    double Tbar = 1.0;

    /// Throws validation_error unless kappa2^2 < kappa1 kappa3 and Tbar > 0.
    static DiffusionParams from_kappas(const KappaSet& kappas, double Tbar = 1.0);
};

/// T(t, xi) = exp(-(kappa/Tbar^{6/5}) |xi|^{8/5} t) T0(xi).
ComplexVector evolve_hat(const DiffusionParams& params, const ComplexVector& T0, const std::vector<double>& xi,
                         double t);

/// S(xi) = sign (kappa2/kappa3) |xi|^{3/5} T(xi); sign is +1 or -1.
ComplexVector slaved_S_hat(const KappaSet& kappas, const ComplexVector& T, const std::vector<double>& xi, int sign);

/// Mode coefficients c_j = (1/M) sum_m f(x_m) exp(-i xi_j x_m), x_m = m Lx / M.
ComplexVector forward_transform(const std::vector<double>& samples);

/// Inverse of forward_transform for a conjugate-symmetric spectrum. Throws
/// validation_error when the spectrum is not conjugate symmetric to 1e-12.
std::vector<double> real_space_render(const ComplexVector& modes);

}  // namespace phonon
