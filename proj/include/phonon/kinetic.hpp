#pragma once

/// @file kinetic.hpp
/// Time integration of eps^alpha df/dt + eps omega'(k) df/dx = Tbar^2 L f on a
/// periodic box, one Fourier mode in x at a time, with the moment traces used
/// to compare against the fractional limit.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phonon/frac_diffusion.hpp"
#include "phonon/linop.hpp"
#include "phonon/symbols.hpp"

namespace phonon {

enum class Scheme { crank_nicolson, implicit_euler };

struct SimConfig {
    double eps = 0.1;
    double alpha = 1.6;
    double Tbar = 1.0;
    double Lx = 64.0;
    int M = 64;          ///< x samples; modes |j| < M/2 are evolved
    int n = 256;         ///< wave-number grid size
    double t_end = 1.0;
    int steps = 2000;
    Scheme scheme = Scheme::crank_nicolson;
    int record_every = 20;  ///< trace rows every this many steps
    double p_ref = 1.0;     ///< Laplace point of the remainder diagnostics
    double sigma = 2.0;     ///< width of the Gaussian initial temperature
    double max_stiffness = 10.0;
};

/// Throws validation_error for nonpositive or inconsistent settings.
void validate(const SimConfig& cfg);

/// f0(x, k).
using InitialData = std::function<double(double, double)>;

/// exp(-x^2 / (2 sigma^2)) with x measured from the nearest image of 0.
InitialData gaussian_temperature(double sigma, double Lx);

struct SpectralState {
    double t = 0.0;
    Eigen::MatrixXcd fhat;  ///< n x M, column m holds mode j = signed_mode(m, M)
};

struct TraceRow {
    double t = 0.0;
    int j = 0;
    double xi = 0.0;
    std::complex<double> T, S;
    double h_norm = 0.0;
    double l2_norm = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

class KineticSolver {
public:
    /// op.n() must equal cfg.n. Throws validation_error when the stiffness
    /// ratio dt eps^{-alpha} Tbar^2 ||L||_inf exceeds cfg.max_stiffness.
    KineticSolver(const SimConfig& cfg, const DiscreteOperator& op);

    const SimConfig& config() const { return cfg_; }
    const DiscreteOperator& op() const { return *op_; }
    const std::vector<double>& xi() const { return xi_; }
    double dt() const { return cfg_.t_end / cfg_.steps; }
    double stiffness_ratio() const { return stiffness_; }

    SpectralState init(const InitialData& f0) const;
    void step(SpectralState& s) const;

    /// sqrt(int int |f|^2 dx dk).
    double l2_norm(const SpectralState& s) const;
    /// int f(x, k) dk dx / Lx, the xi = 0 mean.
    std::complex<double> mean(const SpectralState& s) const;

    /// Rows for modes j >= 0 (the others follow by conjugation).
    std::vector<TraceRow> extract_moments(const SpectralState& s) const;

private:
    SimConfig cfg_;
    const DiscreteOperator* op_;
    std::vector<double> xi_;
    std::vector<Eigen::MatrixXcd> prop_;  ///< one-step maps for modes j >= 0
    Eigen::VectorXd omega_prime_;
    double stiffness_ = 0.0;
};

struct RunResult {
    std::vector<TraceRow> trace;
    double max_l2_increase = 0.0;  ///< max over steps of (|f_{n+1}| - |f_n|)/|f_n|
    double max_mean_drift = 0.0;   ///< max |mean(t) - mean(0)|
    ComplexVector T0;               ///< initial T per mode j >= 0
};

RunResult run_simulation(const KineticSolver& solver, const InitialData& f0);

struct EpsilonResult {
    double eps = 0.0;
    RunResult run;
    double e_T = 0.0;                 ///< max_{t,xi} |T - exp(-kappa |xi|^{8/5} t) T0|
    double slaving_error[2] = {0, 0}; ///< for sign -1 and +1
    std::vector<int> mode_sign;       ///< per-mode winner over the lower half, j = 1..
    double r1_avg = 0.0;
    double r2_avg = 0.0;
    double stiffness = 0.0;
};

struct SweepReport {
    std::vector<EpsilonResult> results;
    KappaSet kappas;
    int sign = 0;                ///< empirically selected slaving sign
    bool sign_consistent = false;
};

/// Runs every eps with the template configuration, the same Gaussian data and
/// a kernel table matching cfg.n. Slaving errors are time averages, maximized
/// over the modes j >= 1.
SweepReport run_epsilon_sweep(const SimConfig& cfg, const KernelTable& table, const KappaSet& kappas,
                              const std::vector<double>& eps_list);

}  // namespace phonon
