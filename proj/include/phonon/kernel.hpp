#pragma once

/// @file kernel.hpp
/// Dispersion relation, the closed-form four-phonon kernel of the linearized
/// operator, resonance geometry and the discrete kernel table.

#include <array>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "phonon/grid.hpp"

namespace phonon {

double omega(double k);

/// sgn(k) pi cos(pi k) in the symmetric view; throws domain_error at k = 0 mod 1.
double omega_prime(double k);

/// F_+(k,k') and F_-(k,k') on the canonical domain; arguments are reduced first.
double f_plus(double k, double kp);
double f_minus(double k, double kp);

/// 2K_2 - K_1, the kernel without its omega(k) omega(k') prefactor.
/// Returns 0 when either argument is 0 mod 1.
double kernel_G(double k, double kp);

/// K(k,k') = omega(k) omega(k') (2K_2 - K_1). Throws singular_curve_error when
/// F_-(k,k') is exactly zero.
double kernel_K(double k, double kp);

/// The two roots of F_-(k, .) in symmetric coordinates, ascending. Requires k != 0 mod 1.
std::array<double, 2> fminus_roots(double k);

/// Resonance partner k1 with omega(k)+omega(k1) = omega(k')+omega(k+k1-k'),
/// in symmetric coordinates. Empty when no nontrivial partner exists.
std::optional<double> resonance_partner(double k, double kp);

/// Closed-form candidate (k'-k)/2 + arcsin(tan(pi|k'-k|/2) cos(pi(k+k')/2))/pi,
/// empty when the arcsin argument leaves [-1,1].
std::optional<double> resonance_partner_closed_form(double k, double kp);

double resonance_residual(double k, double kp, double k1);

struct GapResult {
    double min_gap;
    double k;
    double k1;
};

/// Minimum of omega(k)+omega(k1)-omega(k+k1) over all grid pairs.
GapResult three_phonon_gap(const WaveGrid& grid);

/// Collision frequency V(k) = int K(k',k) dk'. Throws quadrature_error.
double v_of_k(double k, double quad_tol = 1e-10);

/// int K(k,k') g(k') dk' over the torus for a smooth g of the symmetric coordinate.
double kernel_apply(double k, const std::function<double(double)>& g, double quad_tol = 1e-10);

/// Integral of G(k,.) over [c,d] in symmetric coordinates.
double integrate_G(double k, double c, double d, double tol);

/// Average of G over the cell pair [a,b] x [c,d] (symmetric coordinates,
/// cells not containing 0 in their interior).
double cell_average_G(double a, double b, double c, double d, double quad_tol);

struct V0Estimate {
    double v0 = 0.0;
    double uncertainty = 0.0;
    bool monotone = true;
    std::string warning;  ///< empty unless the extrapolation fell back
};

struct KernelTable {
    WaveGrid grid;
    Eigen::MatrixXd K;      ///< corrected kernel matrix, K(i,j) ~ K(k_i,k_j)
    Eigen::MatrixXd K_raw;  ///< uncorrected cell-average matrix (empty when read from cache)
    Eigen::VectorXd V;
    Eigen::VectorXd Wprof;  ///< V(k_i) |k_i|^{-5/3}
    double v0 = 0.0;
    double v0_uncertainty = 0.0;
    std::string v0_warning;
    double c1 = 0.0;
    double c2 = 0.0;
    double C0 = 0.0;
    double quad_tol = 1e-10;

    int n() const { return grid.n; }
};

struct AssemblyOptions {
    double quad_tol = 1e-10;
    int threads = 0;  ///< 0 selects hardware concurrency
    bool keep_raw = true;
};

/// Assemble the kernel table on an even grid with n >= 16.
KernelTable assemble_kernel(const WaveGrid& grid, const AssemblyOptions& opt = {});

/// Extrapolate V(k)|sin pi k|^{-5/3} to k -> 0 from the smallest positive nodes.
V0Estimate estimate_v0(const KernelTable& table);

/// Fill Wprof, c1, c2, C0, v0 from grid and V.
void finalize_table(KernelTable& table);

/// Binary cache: "PHNK", version byte 1, then little-endian u32 n, f64 quad_tol,
/// nodes, weights, V, row-major K, v0, c1, c2 and a CRC-32 of all preceding bytes.
/// Throws io_error on access, format or checksum failures.
void write_kernel_cache(const KernelTable& table, const std::string& path);
KernelTable read_kernel_cache(const std::string& path);

}  // namespace phonon
