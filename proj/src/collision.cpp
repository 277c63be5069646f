#include "phonon/collision.hpp"

#include <algorithm>
#include <cmath>

#include "phonon/errors.hpp"
#include "phonon/kernel.hpp"
#include "phonon/linop.hpp"
#include "phonon/quadrature.hpp"

namespace phonon {

Density equilibrium(double a, double b) {
    if (!(a >= 0.0) || !(b > 0.0)) throw validation_error("equilibrium needs a >= 0 and b > 0");
    return [a, b](double k) { return 1.0 / (a + b * omega(k)); };
}

void check_positive(const Density& W, const WaveGrid& grid) {
    for (double k : grid.nodes) {
        const double v = W(k);
        if (!std::isfinite(v) || !(v > 0.0)) throw validation_error("phonon density must be positive at every node");
    }
}

namespace {

std::vector<Segment> k2_segments(double k) {
    const double s = std::abs(symmetric(k));
    std::vector<double> breaks{-s, 0.0, s};
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<Segment> segs;
    double lo = -0.5;
    for (double b : breaks) {
        if (b > lo && b < 0.5) {
            segs.push_back({lo, b});
            lo = b;
        }
    }
    segs.push_back({lo, 0.5});
    return segs;
}

// Nontrivial partner k1 of (k, k2); the closed form is exact away from
// rounding, the bracketing search covers the rest.
std::optional<double> partner(double k, double k2) {
    if (auto h = resonance_partner_closed_form(k, k2)) {
        if (resonance_residual(k, k2, *h) <= 1e-12) return h;
    }
    return resonance_partner(k, k2);
}

}  // namespace

double resonant_integral(double k, const std::function<double(double, double, double)>& g, double quad_tol) {
    const double s = symmetric(k);
    auto integrand = [&](double k2) {
        const auto k1 = partner(s, k2);
        if (!k1) return 0.0;
        const double k3 = symmetric(s + *k1 - k2);
        if (symmetric(*k1) == 0.0 || k3 == 0.0) return 0.0;
        const double jac = std::abs(omega_prime(*k1) - omega_prime(k3));
        if (jac == 0.0) return 0.0;
        return g(*k1, k2, k3) / jac;
    };
    return integrate_adaptive(integrand, k2_segments(s), quad_tol, 20000).value;
}

double evaluate_C_scaled(const Density& U, double k, double quad_tol) {
    const double s = symmetric(k);
    if (s == 0.0) return 0.0;
    const double w = omega(s), u = U(s);
    return resonant_integral(
        s,
        [&](double k1, double k2, double k3) {
            const double w1 = omega(k1), w2 = omega(k2), w3 = omega(k3);
            const double u1 = U(k1), u2 = U(k2), u3 = U(k3);
            return w * u1 * u2 * u3 + w1 * u * u2 * u3 - w2 * u * u1 * u3 - w3 * u * u1 * u2;
        },
        quad_tol);
}

double evaluate_C(const Density& W, double k, double quad_tol) {
    return evaluate_C_scaled([&W](double q) { return omega(q) * W(q); }, k, quad_tol);
}

ConservationMoments conservation_check(const Density& W, const WaveGrid& grid, double quad_tol) {
    check_positive(W, grid);
    ConservationMoments m;
    const double h = grid.h();
    for (double k : grid.nodes) {
        const double c = evaluate_C(W, k, quad_tol);
        m.mass += c * h;
        m.energy += omega(k) * c * h;
        m.l1 += std::abs(c) * h;
    }
    return m;
}

double entropy_production(const Density& W, double quad_tol) {
    auto integrand = [&](double k) {
        if (k == 0.0) return 0.0;
        return evaluate_C(W, k, 0.1 * quad_tol) / W(k);
    };
    return integrate_adaptive(integrand, {{-0.5, 0.0}, {0.0, 0.5}}, quad_tol, 2000).value;
}

double linearized_reduced(const std::function<double(double)>& f, double k, double quad_tol) {
    const double s = symmetric(k);
    if (s == 0.0) return 0.0;
    const double w = omega(s), fk = f(s);
    return w * resonant_integral(
                   s,
                   [&](double k1, double k2, double k3) {
                       const double w1 = omega(k1), w2 = omega(k2), w3 = omega(k3);
                       const double f1 = f(k1), f2 = f(k2), f3 = f(k3);
                       return w * (f1 + f2 + f3) + w1 * (fk + f2 + f3) - w2 * (fk + f1 + f3) -
                              w3 * (fk + f1 + f2);
                   },
                   quad_tol);
}

double calibrate_normalization(double k_ref, double quad_tol) {
    const double s = symmetric(k_ref);
    if (s == 0.0) throw domain_error("calibration point must differ from 0");
    const double w = omega(s);
    const double loss = w * w * resonant_integral(s, [](double, double, double) { return 1.0; }, quad_tol);
    return loss / v_of_k(s, quad_tol);
}

LinearizationStudy linearization_consistency(const std::function<double(double)>& f,
                                             const std::vector<double>& eps_list,
                                             const std::vector<double>& sample_k, double c, double T,
                                             double quad_tol) {
    if (eps_list.size() < 2) throw validation_error("linearization study needs at least two eps values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]) || !(eps_list[i] > 0.0))
            throw validation_error("eps list must be positive and decreasing");
    if (!(T > 0.0)) throw validation_error("temperature must be positive");

    std::vector<double> target;
    for (double k : sample_k) target.push_back(c * apply_L_pointwise(k, f, quad_tol));

    LinearizationStudy st;
    st.eps = eps_list;
    st.c = c;
    for (double eps : eps_list) {
        auto U = [&](double q) { return T * (1.0 + eps * f(q)); };
        double err = 0.0;
        for (std::size_t i = 0; i < sample_k.size(); ++i) {
            const double k = sample_k[i];
            const double fd = evaluate_C_scaled(U, k, quad_tol) * omega(k) / (eps * T * T * T);
            err = std::max(err, std::abs(fd - target[i]));
        }
        st.errors.push_back(err);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(eps_list.size());
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double x = std::log(eps_list[i]), y = std::log(st.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    st.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return st;
}

double quadratic_Q(const std::function<double(double)>& f, const std::function<double(double)>& g, double k,
                   double c, double quad_tol) {
    const double s = symmetric(k);
    if (s == 0.0) return 0.0;
    if (!(c > 0.0)) throw validation_error("normalization constant must be positive");
    const double w = omega(s), f0 = f(s), g0 = g(s);
    auto pol = [](double fa, double ga, double fb, double gb) { return 0.5 * (fa * gb + ga * fb); };
    const double v = resonant_integral(
        s,
        [&](double k1, double k2, double k3) {
            const double w1 = omega(k1), w3 = omega(k3);
            const double f1 = f(k1), f2 = f(k2), f3 = f(k3);
            const double g1 = g(k1), g2 = g(k2), g3 = g(k3);
            return 2.0 * (w - w3) * (pol(f1, g1, f2, g2) - pol(f0, g0, f3, g3)) +
                   (w + w1) * (pol(f2, g2, f3, g3) - pol(f0, g0, f1, g1));
        },
        quad_tol);
    return w * v / c;
}

}  // namespace phonon
