#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace phonon {

inline constexpr double pi = std::numbers::pi;

/// Torus coordinate in [0,1).
inline double reduce(double k) {
    double r = k - std::floor(k);
    return r >= 1.0 ? 0.0 : r;
}

/// Torus coordinate in (-1/2, 1/2].
inline double symmetric(double k) {
    if (k > -0.5 && k <= 0.5) return k;
    double r = reduce(k);
    return r > 0.5 ? r - 1.0 : r;
}

/// Midpoint grid on (-1/2, 1/2] with uniform weights.
struct WaveGrid {
    int n = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    WaveGrid() = default;
    explicit WaveGrid(int n_);

    double h() const { return 1.0 / n; }
    /// Left edge of cell i in symmetric coordinates.
    double edge(int i) const { return -0.5 + static_cast<double>(i) / n; }
};

}  // namespace phonon
