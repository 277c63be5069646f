#include "phonon/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "phonon/errors.hpp"
#include "phonon/quadrature.hpp"

namespace phonon {

WaveGrid::WaveGrid(int n_) : n(n_) {
    if (n < 2 || n % 2 != 0) throw validation_error("grid size must be even and at least 2");
    nodes.resize(n);
    weights.assign(n, 1.0 / n);
    for (int i = 0; i < n; ++i) nodes[i] = -0.5 + (i + 0.5) / n;
}

double omega(double k) { return std::abs(std::sin(pi * symmetric(k))); }

double omega_prime(double k) {
    const double s = symmetric(k);
    if (s == 0.0) throw domain_error("omega_prime is discontinuous at k = 0");
    return (s > 0 ? pi : -pi) * std::cos(pi * s);
}

namespace {

struct FPair {
    double plus;
    double minus;
};

// F_+ and F_- from symmetric coordinates. A negative symmetric coordinate
// maps to canonical k+1, which flips the signs of cos and sin; the
// half-angle products keep full relative precision near the origin.
FPair fpm(double k, double kp) {
    const double a = pi * k, b = pi * kp;
    const double s = 4.0 * std::sin(a) * std::sin(b);
    if ((k >= 0.0) == (kp >= 0.0)) {
        const double c = 2.0 * std::cos(0.5 * (a + b)) * std::cos(0.5 * (a - b));
        return {c * c + s, c * c - s};
    }
    const double c = 2.0 * std::sin(0.5 * (a + b)) * std::sin(0.5 * (a - b));
    return {c * c - s, c * c + s};
}

// F_- for k > 0 and k' = -beta, beta >= 0 (the opposite-sign branch, also at beta = 0).
double fminus_opposite(double k, double beta) {
    const double a = pi * k, b = -pi * beta;
    const double c = 2.0 * std::sin(0.5 * (a + b)) * std::sin(0.5 * (a - b));
    return c * c + 4.0 * std::sin(a) * std::sin(b);
}

double g_sym(double k, double kp) {
    if (k == 0.0 || kp == 0.0) return 0.0;
    const FPair f = fpm(k, kp);
    double g = 4.0 / std::sqrt(f.plus);
    if (f.minus > 0.0) g -= 4.0 / std::sqrt(f.minus);
    return g;
}

}  // namespace

double f_plus(double k, double kp) { return fpm(symmetric(k), symmetric(kp)).plus; }
double f_minus(double k, double kp) { return fpm(symmetric(k), symmetric(kp)).minus; }

double kernel_G(double k, double kp) { return g_sym(symmetric(k), symmetric(kp)); }

double kernel_K(double k, double kp) {
    const double s = symmetric(k), sp = symmetric(kp);
    if (s == 0.0 || sp == 0.0) return 0.0;
    if (fpm(s, sp).minus == 0.0) throw singular_curve_error("kernel evaluated on F_- = 0");
    return omega(s) * omega(sp) * g_sym(s, sp);
}

std::array<double, 2> fminus_roots(double k) {
    double s = symmetric(k);
    if (s == 0.0) throw domain_error("F_- roots are degenerate at k = 0");
    const bool flip = s < 0.0;
    if (flip) s = -s;

    using boost::math::tools::eps_tolerance;
    using boost::math::tools::toms748_solve;
    const eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    std::uintmax_t iters = 200;

    // F_- = -4 sin^2(pi k) < 0 at k' = -k, positive at k' -> 0 from either side.
    auto near = [&](double beta) { return fminus_opposite(s, beta); };
    iters = 200;
    auto br = toms748_solve(near, 0.0, s, near(0.0), near(s), tol, iters);
    const double r2 = -0.5 * (br.first + br.second);

    // Second root on canonical (0, 1-k): same-sign branch (0, 1/2] or
    // opposite-sign branch (-1/2, -k).
    double r1;
    const double mid = fpm(s, 0.5).minus;
    if (mid <= 0.0) {
        auto f = [&](double x) { return fpm(s, x).minus; };
        iters = 200;
        if (mid == 0.0) {
            r1 = 0.5;
        } else {
            auto b = toms748_solve(f, 0.0, 0.5, f(0.0), mid, tol, iters);
            r1 = 0.5 * (b.first + b.second);
        }
    } else {
        auto f = [&](double beta) { return fminus_opposite(s, beta); };
        iters = 200;
        auto b = toms748_solve(f, s, 0.5, f(s), f(0.5), tol, iters);
        r1 = -0.5 * (b.first + b.second);
    }
    std::array<double, 2> r{r1, r2};
    if (flip) r = {-r[0], -r[1]};
    std::sort(r.begin(), r.end());
    return r;
}

std::optional<double> resonance_partner_closed_form(double k, double kp) {
    const double a = reduce(k), b = reduce(kp);
    const double arg = std::tan(0.5 * pi * std::abs(b - a)) * std::cos(0.5 * pi * (a + b));
    if (!std::isfinite(arg) || std::abs(arg) > 1.0) return std::nullopt;
    return symmetric(0.5 * (b - a) + std::asin(arg) / pi);
}

double resonance_residual(double k, double kp, double k1) {
    return std::abs(omega(k) + omega(k1) - omega(kp) - omega(k + k1 - kp));
}

namespace {

std::optional<double> partner_by_bracketing(double k, double kp) {
    auto g = [&](double k1) { return omega(k) + omega(k1) - omega(kp) - omega(k + k1 - kp); };
    const double trivial = symmetric(kp);
    constexpr int scan = 512;
    using boost::math::tools::eps_tolerance;
    std::optional<double> best;
    double x0 = -0.5, g0 = g(x0);
    for (int i = 1; i <= scan; ++i) {
        const double x1 = -0.5 + static_cast<double>(i) / scan;
        const double g1 = g(x1);
        if (g0 == 0.0 || g0 * g1 < 0.0) {
            double r = x0;
            if (g0 != 0.0) {
                std::uintmax_t it = 200;
                auto b = boost::math::tools::toms748_solve(g, x0, x1, g0, g1,
                                                           eps_tolerance<double>(50), it);
                r = 0.5 * (b.first + b.second);
            }
            const double dist = std::abs(symmetric(r - trivial));
            if (dist > 1e-9 && resonance_residual(k, kp, r) <= 1e-12) {
                if (!best || dist > std::abs(symmetric(*best - trivial))) best = symmetric(r);
            }
        }
        x0 = x1;
        g0 = g1;
    }
    return best;
}

}  // namespace

std::optional<double> resonance_partner(double k, double kp) {
    if (auto h = resonance_partner_closed_form(k, kp)) {
        if (resonance_residual(k, kp, *h) <= 1e-12) return h;
    }
    return partner_by_bracketing(k, kp);
}

GapResult three_phonon_gap(const WaveGrid& grid) {
    GapResult best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (double k : grid.nodes) {
        for (double k1 : grid.nodes) {
            const double gap = omega(k) + omega(k1) - omega(k + k1);
            if (gap < best.min_gap) best = {gap, k, k1};
        }
    }
    return best;
}

namespace {

// G(k,.) for fixed k along a row. Within a small radius of each root of
// F_-(k,.) the factor F_- is replaced by its cubic Taylor polynomial in the
// exact offset from the root, so the 1/sqrt singularity sits exactly at the
// anchor instead of being blurred by the representation error of k'.
class GRow {
public:
    explicit GRow(double k) : k_(k), roots_(fminus_roots(k)) {
        const double a = pi * k_;
        const double C = std::cos(a), S = std::sin(a);
        for (int i = 0; i < 2; ++i) {
            const double r = roots_[i], other = roots_[1 - i];
            const double b = pi * r;
            const double sb = std::sin(b), cb = std::cos(b);
            double d1, d2, d3;
            if ((k_ >= 0.0) == (r >= 0.0)) {
                d1 = -2.0 * (C + cb) * sb - 4.0 * S * cb;
                d2 = 2.0 * sb * sb - 2.0 * (C + cb) * cb + 4.0 * S * sb;
                d3 = 6.0 * sb * cb + 2.0 * (C + cb) * sb + 4.0 * S * cb;
            } else {
                d1 = 2.0 * (C - cb) * sb + 4.0 * S * cb;
                d2 = 2.0 * sb * sb + 2.0 * (C - cb) * cb - 4.0 * S * sb;
                d3 = 6.0 * sb * cb - 2.0 * (C - cb) * sb - 4.0 * S * cb;
            }
            taylor_[i] = {pi * d1, pi * pi * d2 / 2.0, pi * pi * pi * d3 / 6.0};
            // Radius where the dropped quartic term is ~1e-12 relative to the linear one.
            const auto& c = taylor_[i];
            double scale = std::abs(r - other);
            if (c[1] != 0.0) scale = std::min(scale, std::abs(c[0] / c[1]));
            if (c[2] != 0.0) scale = std::min(scale, std::sqrt(std::abs(c[0] / c[2])));
            rho_[i] = std::min(1e-4 * scale, 0.5 * std::abs(r));
        }
    }

    const std::array<double, 2>& roots() const { return roots_; }
    double k() const { return k_; }

    double operator()(double x) const { return g_sym(k_, x); }

    double operator()(double x, double anchor, double t) const {
        for (int i = 0; i < 2; ++i) {
            if (anchor == roots_[i] && std::abs(t) < rho_[i]) {
                if (x == 0.0) return 0.0;
                const auto& c = taylor_[i];
                const double fm = t * (c[0] + t * (c[1] + t * c[2]));
                double g = 4.0 / std::sqrt(fpm(k_, x).plus);
                if (fm > 0.0) g -= 4.0 / std::sqrt(fm);
                return g;
            }
        }
        return g_sym(k_, x);
    }

private:
    double k_;
    std::array<double, 2> roots_;
    std::array<double, 2> rho_{};
    std::array<std::array<double, 3>, 2> taylor_{};
};

std::vector<Segment> row_segments(const GRow& row, double a, double b) {
    const auto& r = row.roots();
    return singular_segments(a, b, {r[0], r[1], 0.0}, {r[0], r[1]});
}

}  // namespace

double v_of_k(double k, double quad_tol) {
    const double s = symmetric(k);
    if (s == 0.0) throw domain_error("V is evaluated away from k = 0");
    const GRow row(s);
    const double w = omega(s);
    // V = omega(k) int G(k,k') omega(k') dk'.
    auto r = integrate_adaptive(
        [&](double x, double anchor, double t) { return w * omega(x) * row(x, anchor, t); },
        row_segments(row, -0.5, 0.5), quad_tol, 20000);
    return std::max(r.value, 0.0);
}

double kernel_apply(double k, const std::function<double(double)>& g, double quad_tol) {
    const double s = symmetric(k);
    if (s == 0.0) return 0.0;
    const GRow row(s);
    const double w = omega(s);
    auto r = integrate_adaptive(
        [&](double x, double anchor, double t) { return w * omega(x) * row(x, anchor, t) * g(x); },
        row_segments(row, -0.5, 0.5), quad_tol, 20000);
    return r.value;
}

double integrate_G(double k, double c, double d, double tol) {
    const GRow row(symmetric(k));
    return integrate_adaptive(row, row_segments(row, c, d), tol, 4000, 1e-12).value;
}

double cell_average_G(double a, double b, double c, double d, double quad_tol) {
    // Inner integral over [c,d] as a function of k has square-root kinks where
    // the singular curve crosses an edge, i.e. at roots of F_-(., c) and F_-(., d).
    std::vector<double> kinks;
    for (double e : {c, d}) {
        if (symmetric(e) == 0.0) continue;
        for (double r : fminus_roots(e)) kinks.push_back(r);
    }
    const double inner_tol = 0.1 * quad_tol * (d - c);
    auto inner = [&](double k) {
        const GRow row(k);
        return integrate_adaptive(row, row_segments(row, c, d), inner_tol, 4000, 1e-12).value;
    };
    // When both cells touch the origin from opposite sides the inner integral
    // grows like |k|^{-1/3}; a cubic map at the origin makes it smooth.
    std::vector<double> singular = kinks;
    const bool corner = (a == 0.0 || b == 0.0) && (c == 0.0 || d == 0.0);
    if (corner) singular.push_back(0.0);
    auto segs = singular_segments(a, b, kinks, singular);
    if (corner) {
        for (auto& s : segs) {
            if (s.map != 0 && s.anchor == 0.0) {
                s.lo = std::cbrt(s.lo * s.lo);
                s.hi = std::cbrt(s.hi * s.hi);
                s.power = 3;
            }
        }
    }
    auto r = integrate_adaptive(inner, segs, quad_tol * (b - a) * (d - c), 4000, 1e-11);
    return r.value / ((b - a) * (d - c));
}

}  // namespace phonon
