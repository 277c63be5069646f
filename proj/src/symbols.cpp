#include "phonon/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "phonon/errors.hpp"
#include "phonon/kernel.hpp"
#include "phonon/quadrature.hpp"

namespace phonon {

namespace {

double sin53(double k) { return std::pow(std::abs(std::sin(pi * k)), 5.0 / 3.0); }

// Closed-form Wt(k); the tolerance is relaxed only when cancellation at tiny
// k makes the requested accuracy unreachable.
double wt_direct(double k, double rel_tol) {
    const double scale = 1.5 * sin53(k);
    // The loss integral cancels down to V ~ k^{5/3} from terms of size k.
    const double floor = 2e-14 / std::cbrt(k * k);
    for (double rel = std::max(rel_tol, floor); rel <= 1e-6; rel *= 10.0) {
        try {
            return v_of_k(k, rel * scale) / sin53(k);
        } catch (const quadrature_error&) {
        }
    }
    throw quadrature_error("collision frequency model: V unresolved at k = " + std::to_string(k), 1e-6);
}

double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = c.size() - 1; j >= 1; --j) {
        const double b0 = 2.0 * x * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

}  // namespace

VModel::VModel(int levels, int degree, double rel_tol) {
    if (levels < 2 || levels > 40 || degree < 4) throw validation_error("VModel needs 2 <= levels <= 40 and degree >= 4");
    const int N = degree + 1;
    for (int j = 1; j <= levels; ++j) {
        Piece pc{std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j), {}};
        const double mid = 0.5 * (pc.lo + pc.hi), half = 0.5 * (pc.hi - pc.lo);
        std::vector<double> f(N);
        for (int m = 0; m < N; ++m) f[m] = wt_direct(mid + half * std::cos(pi * (m + 0.5) / N), rel_tol);
        pc.coef.assign(N, 0.0);
        for (int q = 0; q < N; ++q) {
            double s = 0.0;
            for (int m = 0; m < N; ++m) s += f[m] * std::cos(pi * q * (m + 0.5) / N);
            pc.coef[q] = 2.0 * s / N;
        }
        pc.coef[0] *= 0.5;
        pieces_.push_back(std::move(pc));
    }
    k_min_ = std::ldexp(1.0, -levels - 1);

    // Wt = v0 + a k^{2/3} + O(k^{4/3}); k and k/8 differ by a factor 4 in k^{2/3}.
    const double wa = wt_direct(k_min_, rel_tol), wb = wt_direct(k_min_ / 8.0, rel_tol);
    v0_ = (4.0 * wb - wa) / 3.0;
    tail_a_ = (Wt(k_min_) - v0_) / std::cbrt(k_min_ * k_min_);

    for (const auto& pc : pieces_) {
        for (double x : {-0.9, -0.31, 0.47, 0.83}) {
            const double k = 0.5 * (pc.lo + pc.hi) + 0.5 * (pc.hi - pc.lo) * x;
            const double d = wt_direct(k, rel_tol);
            fit_error_ = std::max(fit_error_, std::abs(Wt(k) - d) / d);
        }
    }
}

double VModel::Wt(double k) const {
    const double a = std::abs(symmetric(k));
    if (a < k_min_) return v0_ + tail_a_ * std::cbrt(a * a);
    int e = 0;
    std::frexp(a, &e);
    const int j = std::clamp(-e, 1, static_cast<int>(pieces_.size()));
    const Piece& pc = pieces_[j - 1];
    const double x = std::clamp((2.0 * a - pc.lo - pc.hi) / (pc.hi - pc.lo), -1.0, 1.0);
    return clenshaw(pc.coef, x);
}

double VModel::V(double k) const { return Wt(k) * sin53(k); }

double mellin_integral(double a) {
    if (!(std::abs(a) < 1.0)) throw validation_error("mellin_integral needs |a| < 1");
    // z = 1/u folds [1, inf) onto (0, 1].
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [a](double u) { return (std::pow(u, a) + std::pow(u, -a)) / (1.0 + u * u); };
    return ts.integrate(f, 0.0, 1.0, 1e-15);
}

KappaSet compute_kappas(double v0) {
    if (!(v0 > 0.0) || !std::isfinite(v0)) throw validation_error("v0 must be positive");
    KappaSet s;
    s.v0 = v0;
    s.kappa1 = 1.2 * std::pow(pi / v0, 0.6) * mellin_integral(0.6);
    s.kappa2 = 1.2 * mellin_integral(0.0);
    s.kappa3 = 1.2 * std::pow(v0 / pi, 0.6) * mellin_integral(-0.6);
    s.kappa_eff = s.kappa1 - s.kappa2 * s.kappa2 / s.kappa3;
    return s;
}

namespace {

// Segments on (0, 1/2]: dyadic pieces down to 2^-60 plus the scales where V
// meets eps^{8/5} p and eps |omega'| |xi|.
std::vector<Segment> half_torus_segments(double v0, double eps, double p, double xi) {
    std::vector<double> pts;
    for (int j = 1; j <= 60; ++j) pts.push_back(std::ldexp(1.0, -j));
    for (double s : {std::pow(std::pow(eps, 1.6) * p / v0, 0.6) / pi, std::pow(eps * pi * std::abs(xi) / v0, 0.6) / pi})
        if (s > 0.0 && s < 0.5) pts.push_back(s);
    pts.push_back(0.0);
    pts.push_back(0.5);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) segs.push_back({pts[i], pts[i + 1]});
    return segs;
}

// int over the torus of g(k) as int_0^{1/2} [g(k) + g(-k)] dk.
template <class G>
std::complex<double> torus_integral(G&& g, const std::vector<Segment>& segs, double rel_tol) {
    auto re = [&](double k) { return (g(k) + g(-k)).real(); };
    auto im = [&](double k) { return (g(k) + g(-k)).imag(); };
    const double r = integrate_adaptive(re, segs, 1e-300, 40000, rel_tol).value;
    const double i = integrate_adaptive(im, segs, 1e-300, 40000, rel_tol).value;
    return {r, i};
}

void check_eps_p(double eps, double p) {
    if (!(eps > 0.0) || !(p > 0.0)) throw validation_error("symbols need eps > 0 and p > 0");
}

// which = 1, 2, 3 selects the weight V, V/omega, V/omega^2.
std::complex<double> a_eps(const VModel& m, int which, double eps, double p, double xi, double quad_tol) {
    check_eps_p(eps, p);
    const double e35 = std::pow(eps, 0.6), e85 = std::pow(eps, 1.6);
    auto g = [&](double k) {
        const double V = m.V(k), w = std::abs(std::sin(pi * k));
        const double wp = (k > 0 ? pi : -pi) * std::cos(pi * k);
        const std::complex<double> D(e85 * p + V, eps * wp * xi);
        std::complex<double> N;
        double X;
        switch (which) {
            case 1:
                N = {p, wp * xi / e35};
                X = V;
                break;
            case 2:
                N = {e35 * p, wp * xi};
                X = V / w;
                break;
            default:
                N = {e35 * e35 * p, e35 * wp * xi};
                X = V / (w * w);
                break;
        }
        return -N * X / D;
    };
    return torus_integral(g, half_torus_segments(m.v0(), eps, p, xi), quad_tol);
}

}  // namespace

std::complex<double> a1_eps(const VModel& m, double eps, double p, double xi, double quad_tol) {
    return a_eps(m, 1, eps, p, xi, quad_tol);
}
std::complex<double> a2_eps(const VModel& m, double eps, double p, double xi, double quad_tol) {
    return a_eps(m, 2, eps, p, xi, quad_tol);
}
std::complex<double> a3_eps(const VModel& m, double eps, double p, double xi, double quad_tol) {
    return a_eps(m, 3, eps, p, xi, quad_tol);
}

Symbols symbols_eps(const VModel& m, double eps, double p, double xi, double quad_tol) {
    return {a1_eps(m, eps, p, xi, quad_tol), a2_eps(m, eps, p, xi, quad_tol), a3_eps(m, eps, p, xi, quad_tol)};
}

std::array<double, 3> limit_symbols(const KappaSet& k, double p, double xi) {
    const double a = std::abs(xi);
    return {-p - k.kappa1 * std::pow(a, 1.6), -k.kappa2 * a, -k.kappa3 * std::pow(a, 0.4)};
}

namespace {

std::complex<double> F_eps(const VModel& m, const KFunction& f0, double eps, double p, double xi, bool inv_omega,
                           double quad_tol) {
    check_eps_p(eps, p);
    const double e85 = std::pow(eps, 1.6);
    auto g = [&](double k) {
        const double V = m.V(k);
        const double wp = (k > 0 ? pi : -pi) * std::cos(pi * k);
        std::complex<double> r = V / std::complex<double>(e85 * p + V, eps * wp * xi) * f0(k);
        if (inv_omega) r /= std::abs(std::sin(pi * k));
        return r;
    };
    const auto v = torus_integral(g, half_torus_segments(m.v0(), eps, p, xi), quad_tol);
    return inv_omega ? std::pow(eps, 0.6) * v : v;
}

}  // namespace

std::complex<double> F1_eps(const VModel& m, const KFunction& f0, double eps, double p, double xi, double quad_tol) {
    return F_eps(m, f0, eps, p, xi, false, quad_tol);
}

std::complex<double> F2_eps(const VModel& m, const KFunction& f0, double eps, double p, double xi, double quad_tol) {
    return F_eps(m, f0, eps, p, xi, true, quad_tol);
}

LowerBoundScan a3_lower_bound_check(const VModel& m, double eps, double K, int points, double quad_tol) {
    if (!(K > 1e-3) || !(eps > 0.0) || eps * K > 1.0 || points < 2)
        throw validation_error("lower-bound scan needs K > 1e-3, eps > 0, eps K <= 1 and at least two points");
    LowerBoundScan out;
    out.margin = std::numeric_limits<double>::infinity();
    out.max_re_a3 = -std::numeric_limits<double>::infinity();
    const double r = std::log(K / 1e-3) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double p = 1e-3 * std::exp(r * i);
        for (int j = 0; j < points; ++j) {
            const double xi = 1e-3 * std::exp(r * j);
            const auto a3 = a3_eps(m, eps, p, xi, quad_tol);
            const double ratio = std::abs(a3) / (std::pow(eps, 0.24) * std::pow(p, 0.4) + std::pow(xi, 0.4));
            if (ratio < out.margin) {
                out.margin = ratio;
                out.p_at = p;
                out.xi_at = xi;
            }
            out.max_re_a3 = std::max(out.max_re_a3, a3.real());
        }
    }
    return out;
}

RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw validation_error("degenerate fit: need matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw validation_error("degenerate fit: nonpositive sample");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) throw validation_error("degenerate fit: identical abscissae");
    RateFit f;
    f.errors = y;
    f.slope = (n * sxy - sx * sy) / den;
    const double icpt = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::log(y[i]) - icpt - f.slope * std::log(x[i]);
        ss += d * d;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

ConvergenceStudy convergence_study(const VModel& m, const KappaSet& kappas, double p, double xi,
                                   const std::vector<double>& eps_list, double quad_tol) {
    if (eps_list.size() < 3) throw validation_error("convergence study needs at least three eps values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw validation_error("eps list must be decreasing");
    ConvergenceStudy st;
    st.eps = eps_list;
    const auto lim = limit_symbols(kappas, p, xi);
    std::array<std::vector<double>, 3> err;
    for (double eps : eps_list) {
        const Symbols s = symbols_eps(m, eps, p, xi, quad_tol);
        err[0].push_back(std::abs(s.a1 - lim[0]));
        err[1].push_back(std::abs(s.a2 - lim[1]));
        err[2].push_back(std::abs(s.a3 - lim[2]));
    }
    for (int i = 0; i < 3; ++i) st.fits[i] = fit_rate(eps_list, err[i]);
    return st;
}

}  // namespace phonon
