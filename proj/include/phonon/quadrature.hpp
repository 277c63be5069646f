#pragma once

/// @file quadrature.hpp
/// Globally adaptive Gauss-Kronrod integration over a list of segments,
/// with optional square-root maps that absorb 1/sqrt endpoint behaviour.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phonon/errors.hpp"

namespace phonon {

/// One integration segment. With map = 0 the integration variable is x
/// itself on [lo, hi]. With map = +1 the variable is u on [lo, hi] and
/// x = anchor + u^power; with map = -1, x = anchor - u^power.
struct Segment {
    double lo;
    double hi;
    double anchor = 0.0;
    int map = 0;
    int power = 2;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Build segments for [a, b] split at the sorted interior breakpoints.
/// Each piece that ends at (or lies within one piece length of) one of
/// the singular points gets a square-root map anchored there.
std::vector<Segment> singular_segments(double a, double b, const std::vector<double>& breaks,
                                       const std::vector<double>& singular);

/// One 15-point Kronrod panel with its embedded 7-point Gauss rule. The node
/// tables come from Boost.Math; the error estimate follows QUADPACK.
template <class G>
void gk15_panel(G&& g, double lo, double hi, double& value, double& error) {
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    using ga = boost::math::quadrature::gauss<double, 7>;
    const auto& x = gk::abscissa();
    const auto& wk = gk::weights();
    const auto& wg = ga::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double fp[8], fm[8];
    fp[0] = fm[0] = g(c);
    double kr = fp[0] * wk[0], gs = fp[0] * wg[0], resabs = std::abs(fp[0]) * wk[0];
    for (int i = 1; i < 8; ++i) {
        fp[i] = g(c + h * x[i]);
        fm[i] = g(c - h * x[i]);
        kr += (fp[i] + fm[i]) * wk[i];
        if (i % 2 == 0) gs += (fp[i] + fm[i]) * wg[i / 2];
        resabs += (std::abs(fp[i]) + std::abs(fm[i])) * wk[i];
    }
    const double mean = 0.5 * kr;
    double resasc = wk[0] * std::abs(fp[0] - mean);
    for (int i = 1; i < 8; ++i) resasc += wk[i] * (std::abs(fp[i] - mean) + std::abs(fm[i] - mean));
    value = kr * h;
    double err = std::abs((kr - gs) * h);
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    error = err;
}

/// Integrate f over the segments until the error estimate drops below
/// max(abs_tol, rel_tol |value|). The integrand is
/// either f(x) or f(x, anchor, t); the second form receives the exact offset
/// t = x - anchor on mapped segments (t is NaN on unmapped ones), which lets
/// it resolve behaviour closer to the anchor than x itself can represent.
template <class F>
QuadResult integrate_adaptive(F&& f, const std::vector<Segment>& segs, double abs_tol,
                              int max_intervals = 4000, double rel_tol = 0.0) {
    constexpr bool with_offset = std::is_invocable_v<F, double, double, double>;
    struct Piece {
        double lo, hi, value, error;
        const Segment* seg;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto eval = [&](const Segment& s, double lo, double hi) {
        double err = 0.0;
        double v;
        if (s.map == 0) {
            auto g = [&](double x) {
                if constexpr (with_offset)
                    return f(x, std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN());
                else
                    return f(x);
            };
            gk15_panel(g, lo, hi, v, err);
        } else {
            const double sg = s.map > 0 ? 1.0 : -1.0;
            auto g = [&](double u) {
                const double up = s.power == 2 ? u : u * u;
                const double t = sg * u * up;
                const double jac = s.power * up;
                if constexpr (with_offset)
                    return jac * f(s.anchor + t, s.anchor, t);
                else
                    return jac * f(s.anchor + t);
            };
            gk15_panel(g, lo, hi, v, err);
        }
        return Piece{lo, hi, v, err, &s};
    };

    std::priority_queue<Piece> heap;
    double total = 0.0, total_err = 0.0;
    for (const auto& s : segs) {
        if (!(s.hi > s.lo)) continue;
        Piece p = eval(s, s.lo, s.hi);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && !heap.empty()) {
        if (count >= max_intervals) {
            throw quadrature_error("adaptive quadrature hit the subdivision limit", total_err);
        }
        Piece p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) {
            throw quadrature_error("adaptive quadrature exhausted floating-point resolution",
                                   total_err);
        }
        Piece l = eval(*p.seg, p.lo, mid);
        Piece r = eval(*p.seg, mid, p.hi);
        total += l.value + r.value - p.value;
        total_err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // Recompute the sums to shed accumulated cancellation in the running totals.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {v, e, count};
}

}  // namespace phonon
