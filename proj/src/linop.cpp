#include "phonon/linop.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "phonon/errors.hpp"

namespace phonon {

DiscreteOperator::DiscreteOperator(const KernelTable& table, DiagMode mode, KernelVariant variant)
    : table_(&table), mode_(mode) {
    const int n = table.n();
    if (variant == KernelVariant::raw) {
        if (table.K_raw.rows() != n) throw validation_error("raw kernel matrix is not available for this table");
        K_ = &table.K_raw;
    } else {
        K_ = &table.K;
    }
    const double w = table.grid.h();
    if (mode == DiagMode::row_sum) {
        diag_ = K_->colwise().sum().transpose() * w;
    } else {
        diag_ = table.V;
    }
    omega_.resize(n);
    for (int i = 0; i < n; ++i) omega_(i) = phonon::omega(table.grid.nodes[i]);
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& f) const {
    return (*K_) * f * weight() - diag_.cwiseProduct(f);
}

Eigen::VectorXcd DiscreteOperator::apply(const Eigen::VectorXcd& f) const {
    return K_->cast<std::complex<double>>() * f * weight() - diag_.cast<std::complex<double>>().cwiseProduct(f);
}

Eigen::MatrixXd DiscreteOperator::matrix() const {
    Eigen::MatrixXd L = (*K_) * weight();
    L.diagonal() -= diag_;
    return L;
}

Eigen::VectorXcd DiscreteOperator::solve_shifted(std::complex<double> A, const Eigen::VectorXcd& rhs) const {
    std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto& slot = lu_cache_[{A.real(), A.imag()}];
        if (!slot) {
            Eigen::MatrixXcd M = -matrix().cast<std::complex<double>>();
            M.diagonal().array() += A;
            slot = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXcd>>(M);
        }
        lu = slot;
    }
    return lu->solve(rhs);
}

std::pair<double, double> conservation_moments(const DiscreteOperator& op, const Eigen::VectorXd& f) {
    const Eigen::VectorXd Lf = op.apply(f);
    const double w = op.weight();
    return {Lf.sum() * w, Lf.cwiseQuotient(op.omega()).sum() * w};
}

Brackets brackets(const DiscreteOperator& op) {
    const double w = op.weight();
    const auto& V = op.diag();
    const auto& om = op.omega();
    Brackets b;
    b.V = V.sum() * w;
    b.Vw1 = V.cwiseQuotient(om).sum() * w;
    b.Vw2 = V.cwiseQuotient(om.cwiseProduct(om)).sum() * w;
    return b;
}

namespace {

template <class Vec>
auto project_impl(const DiscreteOperator& op, const Vec& f) {
    using Scalar = typename Vec::Scalar;
    const Brackets b = brackets(op);
    const double m0 = b.V * b.V * b.Vw2 - b.Vw1 * b.Vw1 * b.V;
    if (!(m0 > 0.0)) throw validation_error("projection normalization m0 is not positive");
    const double w = op.weight();
    const auto& V = op.diag();
    const auto& om = op.omega();
    const Eigen::VectorXd sweight = (b.V * V.cwiseQuotient(om) - b.Vw1 * V) * w;
    ProjectionCoeffs<Scalar> c;
    c.T = (V.cast<Scalar>().cwiseProduct(f)).sum() * w / b.V;
    c.S = sweight.cast<Scalar>().cwiseProduct(f).sum() / m0;
    c.m0 = m0;
    const Eigen::VectorXd shape = (b.V * om.cwiseInverse()).array() - b.Vw1;
    Vec Pf = Vec::Constant(f.size(), c.T) + c.S * shape.cast<Scalar>();
    return std::make_pair(c, Pf);
}

template <class Vec>
auto decompose_impl(const DiscreteOperator& op, const Vec& f, double eps) {
    using Scalar = typename Vec::Scalar;
    if (!(eps > 0.0)) throw validation_error("eps must be positive");
    const Brackets b = brackets(op);
    const auto [c, Pf] = project_impl(op, f);
    Decomposition<Scalar> d;
    d.T = c.T - c.S * b.Vw1;
    d.S = std::pow(eps, -0.6) * b.V * c.S;
    const Eigen::VectorXd inv = op.omega().cwiseInverse();
    d.h = (f - Vec::Constant(f.size(), d.T) - (std::pow(eps, 0.6) * d.S) * inv.cast<Scalar>()) *
          std::pow(eps, -0.8);
    return d;
}

}  // namespace

std::pair<ProjectionCoeffs<double>, Eigen::VectorXd> project_Pi(const DiscreteOperator& op,
                                                                const Eigen::VectorXd& f) {
    return project_impl(op, f);
}

std::pair<ProjectionCoeffs<std::complex<double>>, Eigen::VectorXcd> project_Pi(const DiscreteOperator& op,
                                                                              const Eigen::VectorXcd& f) {
    return project_impl(op, f);
}

Decomposition<double> decompose_state(const DiscreteOperator& op, const Eigen::VectorXd& f, double eps) {
    return decompose_impl(op, f, eps);
}

Decomposition<std::complex<double>> decompose_state(const DiscreteOperator& op, const Eigen::VectorXcd& f,
                                                    double eps) {
    return decompose_impl(op, f, eps);
}

double dirichlet_form(const DiscreteOperator& op, const Eigen::VectorXd& f) {
    return -op.apply(f).dot(f) * op.weight();
}

double v_norm(const DiscreteOperator& op, const Eigen::VectorXd& r) {
    return std::sqrt((op.diag().array() * r.array().square()).sum() * op.weight());
}

SpectralReport spectral_report(const DiscreteOperator& op) {
    const int n = op.n();
    if (n > 2000) throw validation_error("spectral report is limited to n <= 2000");
    const Eigen::VectorXd& V = op.diag();
    if ((V.array() <= 0.0).any()) throw validation_error("symmetrization needs a positive diagonal");
    const Eigen::VectorXd s = V.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd L0 = s.asDiagonal() * op.kernel() * s.asDiagonal() * op.weight();
    L0.diagonal().array() -= 1.0;
    L0 = 0.5 * (L0 + L0.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L0, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");

    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::stable_sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    SpectralReport r;
    r.eigenvalues = Eigen::Map<Eigen::VectorXd>(ev.data(), n);
    r.max_abs = std::abs(ev.back());
    for (double x : ev)
        if (std::abs(x) < 1e-6 * r.max_abs) ++r.near_zero;
    r.c0 = n >= 3 ? std::abs(ev[2]) : 0.0;
    r.most_negative_of_minus_L = -es.eigenvalues().maxCoeff();
    r.residual_one = v_norm(op, op.apply(Eigen::VectorXd(Eigen::VectorXd::Ones(n))));
    r.residual_inv_omega = v_norm(op, op.apply(Eigen::VectorXd(op.omega().cwiseInverse())));
    return r;
}

double apply_L_pointwise(double k, const std::function<double(double)>& f, double quad_tol) {
    return kernel_apply(k, f, quad_tol) - v_of_k(k, quad_tol) * f(symmetric(k));
}

}  // namespace phonon
