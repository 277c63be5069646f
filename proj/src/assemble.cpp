#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "phonon/errors.hpp"
#include "phonon/kernel.hpp"

namespace phonon {

namespace {

// Runs body(i) for i in [0, count) on a small pool; each index is written by
// exactly one worker so the result does not depend on scheduling.
template <class Body>
void parallel_rows(int count, int threads, Body&& body) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, std::max(count, 1));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

// Symmetric rank-4 update E = l 1^T + 1 l^T + m w^T + w m^T (w = omega) so
// that (Gamma + E) 1 = t1 and (Gamma + E) omega = t2 under the grid weights.
Eigen::MatrixXd consistency_correction(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& om,
                                       const Eigen::VectorXd& t1, const Eigen::VectorXd& t2,
                                       double w) {
    const Eigen::Index n = om.size();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd r1 = t1 - w * gamma * ones;
    const Eigen::VectorXd r2 = t2 - w * gamma * om;
    const double s1 = w * om.sum(), s2 = w * om.squaredNorm();

    Eigen::Matrix2d A;
    A << 1.0, s1, s1, s2;
    const Eigen::Matrix2d Ainv = A.inverse();

    // Per node: (l_i, m_i) = Ainv [(r1_i, r2_i) - (g0 + om_i g1, g2 + om_i g3)],
    // with g = (sum l w, sum m w, sum l om w, sum m om w) solved self-consistently.
    Eigen::Vector4d c = Eigen::Vector4d::Zero();
    Eigen::Matrix4d B = Eigen::Matrix4d::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d p = Ainv * Eigen::Vector2d(r1(i), r2(i));
        const Eigen::Vector4d basis(w, w, w * om(i), w * om(i));
        c += basis.cwiseProduct(Eigen::Vector4d(p(0), p(1), p(0), p(1)));
        // Response of (l_i, m_i) to each unit g component.
        Eigen::Matrix<double, 2, 4> J;
        J.col(0) = Ainv.col(0);
        J.col(1) = om(i) * Ainv.col(0);
        J.col(2) = Ainv.col(1);
        J.col(3) = om(i) * Ainv.col(1);
        B.row(0) += w * J.row(0);
        B.row(1) += w * J.row(1);
        B.row(2) += w * om(i) * J.row(0);
        B.row(3) += w * om(i) * J.row(1);
    }
    const Eigen::Matrix4d M = Eigen::Matrix4d::Identity() + B;
    const Eigen::Vector4d g = M.completeOrthogonalDecomposition().solve(c);

    Eigen::VectorXd l(n), m(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d rhs(r1(i) - g(0) - om(i) * g(1), r2(i) - g(2) - om(i) * g(3));
        const Eigen::Vector2d p = Ainv * rhs;
        l(i) = p(0);
        m(i) = p(1);
    }
    Eigen::MatrixXd E = l * ones.transpose() + ones * l.transpose() + m * om.transpose() +
                        om * m.transpose();
    return 0.5 * (E + E.transpose());
}

}  // namespace

KernelTable assemble_kernel(const WaveGrid& grid, const AssemblyOptions& opt) {
    const int n = grid.n;
    if (n < 16 || n % 2 != 0) throw validation_error("kernel assembly needs an even n >= 16");
    const double h = grid.h();

    KernelTable t;
    t.grid = grid;
    t.quad_tol = opt.quad_tol;

    // Collision frequency on the half grid, mirrored (V is even).
    t.V.resize(n);
    parallel_rows(n / 2, opt.threads, [&](int i) {
        try {
            t.V(n / 2 + i) = v_of_k(grid.nodes[n / 2 + i], opt.quad_tol);
        } catch (const quadrature_error& e) {
            throw quadrature_error("V at row " + std::to_string(n / 2 + i) + ": " + e.what(),
                                   e.achieved());
        }
    });
    for (int i = 0; i < n / 2; ++i) t.V(i) = t.V(n - 1 - i);

    // Cell averages of G on one representative per symmetry orbit
    // {(i,j), (j,i), (n-1-i, n-1-j), (n-1-j, n-1-i)}: i <= j and i + j <= n - 1.
    Eigen::MatrixXd gamma(n, n);
    parallel_rows(n, opt.threads, [&](int i) {
        try {
            for (int j = i; j <= n - 1 - i; ++j) {
                gamma(i, j) = cell_average_G(grid.edge(i), grid.edge(i + 1), grid.edge(j),
                                             grid.edge(j + 1), opt.quad_tol);
            }
        } catch (const quadrature_error& e) {
            throw quadrature_error("kernel row " + std::to_string(i) + ": " + e.what(), e.achieved());
        }
    });
    for (int i = 0; i < n; ++i) {
        for (int j = i; j <= n - 1 - i; ++j) {
            const double v = gamma(i, j);
            gamma(j, i) = v;
            gamma(n - 1 - i, n - 1 - j) = v;
            gamma(n - 1 - j, n - 1 - i) = v;
        }
    }

    Eigen::VectorXd om(n);
    for (int i = 0; i < n; ++i) om(i) = omega(grid.nodes[i]);
    const auto D = om.asDiagonal();

    if (opt.keep_raw) t.K_raw = D * gamma * D;

    const Eigen::VectorXd t1 = t.V.cwiseQuotient(om.cwiseProduct(om));
    const Eigen::VectorXd t2 = t.V.cwiseQuotient(om);
    const Eigen::MatrixXd E = consistency_correction(gamma, om, t1, t2, h);
    Eigen::MatrixXd corrected = gamma + E;
    // Restore exact symmetry under both reflections after the update.
    for (int i = 0; i < n; ++i) {
        for (int j = i; j <= n - 1 - i; ++j) {
            const double v = 0.25 * (corrected(i, j) + corrected(j, i) +
                                     corrected(n - 1 - i, n - 1 - j) +
                                     corrected(n - 1 - j, n - 1 - i));
            corrected(i, j) = corrected(j, i) = v;
            corrected(n - 1 - i, n - 1 - j) = corrected(n - 1 - j, n - 1 - i) = v;
        }
    }
    t.K = D * corrected * D;

    finalize_table(t);
    return t;
}

void finalize_table(KernelTable& t) {
    const int n = t.grid.n;
    t.Wprof.resize(n);
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0, C0 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k = t.grid.nodes[i];
        t.Wprof(i) = t.V(i) * std::pow(std::abs(k), -5.0 / 3.0);
        const double ratio = t.V(i) / std::pow(std::abs(std::sin(pi * k)), 5.0 / 3.0);
        c1 = std::min(c1, ratio);
        c2 = std::max(c2, ratio);
        C0 = std::max(C0, t.Wprof(i));
    }
    t.c1 = c1;
    t.c2 = c2;
    t.C0 = C0;
    const V0Estimate est = estimate_v0(t);
    t.v0 = est.v0;
    t.v0_uncertainty = est.uncertainty;
    t.v0_warning = est.warning;
}

V0Estimate estimate_v0(const KernelTable& t) {
    // Nodes k = (2m+1)h/2 with m = 0, 1, 4, 13 form a geometric sequence with
    // ratio 3. Aitken extrapolation on consecutive triples; the spread of the
    // two estimates serves as the uncertainty.
    const int n = t.grid.n;
    const int half = n / 2;
    auto ratio = [&](int m) {
        const int i = half + m;
        return t.V(i) / std::pow(std::sin(pi * t.grid.nodes[i]), 5.0 / 3.0);
    };
    V0Estimate out;
    const int ms[4] = {0, 1, 4, 13};
    if (half <= 13) {
        out.v0 = ratio(0);
        out.uncertainty = std::abs(ratio(0) - ratio(1));
        out.monotone = false;
        out.warning = "grid too coarse for extrapolation; returning the value at the smallest node";
        return out;
    }
    double r[4];
    for (int q = 0; q < 4; ++q) r[q] = ratio(ms[q]);
    auto aitken = [](double a, double b, double c) {
        const double d1 = a - b, d2 = b - c;
        const double denom = d1 - d2;
        if (denom == 0.0 || d1 * d2 <= 0.0) return a;
        return a - d1 * d1 / denom;
    };
    out.monotone = (r[0] - r[1]) * (r[1] - r[2]) > 0.0 && (r[1] - r[2]) * (r[2] - r[3]) > 0.0;
    const double e0 = aitken(r[0], r[1], r[2]);
    const double e1 = aitken(r[1], r[2], r[3]);
    out.v0 = out.monotone ? e0 : r[0];
    if (!out.monotone) out.warning = "non-monotone tail of V/|sin pi k|^{5/3}; returning the value at the smallest node";
    out.uncertainty = out.monotone ? std::abs(e0 - e1) : std::abs(r[0] - r[1]);
    return out;
}

}  // namespace phonon
