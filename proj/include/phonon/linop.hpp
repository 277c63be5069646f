#pragma once

/// @file linop.hpp
/// Discrete linearized operator L f = K f - V f on the midpoint grid, the
/// V-weighted projection onto span{1, 1/omega} and spectral diagnostics.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Dense>

#include "phonon/kernel.hpp"

namespace phonon {

enum class DiagMode { row_sum, analytic };

/// corrected: the assembled matrix (both invariants hold on the grid);
/// raw: plain cell averages of the kernel, used to monitor the 1/omega mode.
enum class KernelVariant { corrected, raw };

class DiscreteOperator {
public:
    explicit DiscreteOperator(const KernelTable& table, DiagMode mode = DiagMode::row_sum,
                              KernelVariant variant = KernelVariant::corrected);

    const KernelTable& table() const { return *table_; }
    int n() const { return table_->n(); }
    double weight() const { return table_->grid.h(); }
    const Eigen::MatrixXd& kernel() const { return *K_; }
    /// Diagonal V_i actually used (row sums or the tabulated V).
    const Eigen::VectorXd& diag() const { return diag_; }
    const Eigen::VectorXd& omega() const { return omega_; }
    DiagMode mode() const { return mode_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const;
    /// Dense matrix of L acting on nodal values.
    Eigen::MatrixXd matrix() const;

    /// Solve (A - L) x = rhs; the LU factorization is cached per shift A.
    Eigen::VectorXcd solve_shifted(std::complex<double> A, const Eigen::VectorXcd& rhs) const;

private:
    const KernelTable* table_;
    const Eigen::MatrixXd* K_;
    DiagMode mode_;
    Eigen::VectorXd diag_;
    Eigen::VectorXd omega_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<double, double>, std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>>> lu_cache_;
};

/// (sum_i (L f)_i w, sum_i (L f)_i w / omega_i).
std::pair<double, double> conservation_moments(const DiscreteOperator& op, const Eigen::VectorXd& f);

struct Brackets {
    double V = 0.0;      ///< <V>
    double Vw1 = 0.0;    ///< <V omega^-1>
    double Vw2 = 0.0;    ///< <V omega^-2>
};

Brackets brackets(const DiscreteOperator& op);

/// Coefficients of Pi f = T~ + S~ (<V>/omega - <V/omega>), with
/// T~ = <V f>/<V>, S~ = <(<V> V/omega - <V/omega> V) f>/m0 and
/// m0 = <V>^2 <V/omega^2> - <V/omega>^2 <V>.
template <class Scalar>
struct ProjectionCoeffs {
    Scalar T{};
    Scalar S{};
    double m0 = 0.0;
};

/// Returns the coefficients and Pi f. Throws validation_error if m0 <= 0.
std::pair<ProjectionCoeffs<double>, Eigen::VectorXd> project_Pi(const DiscreteOperator& op,
                                                                const Eigen::VectorXd& f);
std::pair<ProjectionCoeffs<std::complex<double>>, Eigen::VectorXcd> project_Pi(const DiscreteOperator& op,
                                                                              const Eigen::VectorXcd& f);

/// -<L f, f> in the plain discrete inner product.
double dirichlet_form(const DiscreteOperator& op, const Eigen::VectorXd& f);

/// sqrt(sum_i V_i r_i^2 w).
double v_norm(const DiscreteOperator& op, const Eigen::VectorXd& r);

struct SpectralReport {
    Eigen::VectorXd eigenvalues;  ///< of V^{-1/2} L V^{-1/2}, ascending in magnitude
    double max_abs = 0.0;
    int near_zero = 0;            ///< count with |lambda| < 1e-6 max|lambda|
    double c0 = 0.0;              ///< third-smallest magnitude
    double residual_one = 0.0;    ///< ||L 1||_V
    double residual_inv_omega = 0.0;  ///< ||L omega^-1||_V
    double most_negative_of_minus_L = 0.0;  ///< min eigenvalue of -L_sym
};

SpectralReport spectral_report(const DiscreteOperator& op);

template <class Scalar>
struct Decomposition {
    Scalar T;
    Scalar S;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> h;
};

/// f = T + eps^{3/5} S / omega + eps^{4/5} h with T = T~ - S~ <V/omega>, S = eps^{-3/5} <V> S~.
Decomposition<double> decompose_state(const DiscreteOperator& op, const Eigen::VectorXd& f, double eps);
Decomposition<std::complex<double>> decompose_state(const DiscreteOperator& op, const Eigen::VectorXcd& f,
                                                    double eps);

/// (L f)(k) at an arbitrary k != 0 from the closed-form kernel, for f given
/// as a function of the symmetric coordinate.
double apply_L_pointwise(double k, const std::function<double(double)>& f, double quad_tol = 1e-10);

}  // namespace phonon
