#include "phonon/quadrature.hpp"

namespace phonon {

namespace {

void push_piece(std::vector<Segment>& out, double p, double q, double below, double above) {
    const double len = q - p;
    const bool low = p - below <= len;
    const bool high = above - q <= len;
    if (low && high) {
        const double m = 0.5 * (p + q);
        out.push_back({std::sqrt(p - below), std::sqrt(m - below), below, +1});
        out.push_back({std::sqrt(above - q), std::sqrt(above - m), above, -1});
    } else if (low) {
        out.push_back({std::sqrt(p - below), std::sqrt(q - below), below, +1});
    } else if (high) {
        out.push_back({std::sqrt(above - q), std::sqrt(above - p), above, -1});
    } else {
        out.push_back({p, q, 0.0, 0});
    }
}

}  // namespace

std::vector<Segment> singular_segments(double a, double b, const std::vector<double>& breaks,
                                       const std::vector<double>& singular) {
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    std::vector<Segment> out;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double p = pts[i], q = pts[i + 1];
        if (!(q > p)) continue;
        double below = -inf, above = inf;
        for (double s : singular) {
            if (s <= p) below = std::max(below, s);
            if (s >= q) above = std::min(above, s);
        }
        push_piece(out, p, q, below, above);
    }
    return out;
}

}  // namespace phonon
