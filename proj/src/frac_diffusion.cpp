#include "phonon/frac_diffusion.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "phonon/errors.hpp"
#include "phonon/grid.hpp"

namespace phonon {

int signed_mode(int m, int M) { return m <= M / 2 ? m : m - M; }

std::vector<double> mode_wavenumbers(int M, double Lx) {
    if (M < 2 || !(Lx > 0.0)) throw validation_error("need M >= 2 modes and Lx > 0");
    std::vector<double> xi(M);
    for (int m = 0; m < M; ++m) xi[m] = 2.0 * pi * signed_mode(m, M) / Lx;
    return xi;
}

DiffusionParams DiffusionParams::from_kappas(const KappaSet& k, double Tbar) {
    if (!(Tbar > 0.0)) throw validation_error("Tbar must be positive");
    if (!(k.kappa1 > 0.0) || !(k.kappa3 > 0.0) || !(k.kappa2 * k.kappa2 < k.kappa1 * k.kappa3))
        throw validation_error("kappa set violates kappa2^2 < kappa1 kappa3");
    return {k.kappa1 - k.kappa2 * k.kappa2 / k.kappa3, Tbar};
}

ComplexVector evolve_hat(const DiffusionParams& prm, const ComplexVector& T0, const std::vector<double>& xi,
                         double t) {
    if (T0.size() != xi.size()) throw validation_error("spectrum and wavenumbers differ in length");
    if (!(t >= 0.0)) throw validation_error("time must be nonnegative");
    const double rate = prm.kappa_eff / std::pow(prm.Tbar, 1.2);
    ComplexVector out(T0.size());
    for (std::size_t j = 0; j < T0.size(); ++j) out[j] = std::exp(-rate * std::pow(std::abs(xi[j]), 1.6) * t) * T0[j];
    return out;
}

ComplexVector slaved_S_hat(const KappaSet& k, const ComplexVector& T, const std::vector<double>& xi, int sign) {
    if (T.size() != xi.size()) throw validation_error("spectrum and wavenumbers differ in length");
    if (sign != 1 && sign != -1) throw validation_error("sign must be +1 or -1");
    ComplexVector out(T.size());
    for (std::size_t j = 0; j < T.size(); ++j)
        out[j] = static_cast<double>(sign) * (k.kappa2 / k.kappa3) * std::pow(std::abs(xi[j]), 0.6) * T[j];
    return out;
}

ComplexVector forward_transform(const std::vector<double>& samples) {
    if (samples.empty()) return {};
    Eigen::FFT<double> fft;
    ComplexVector out;
    fft.fwd(out, samples);
    const double M = static_cast<double>(samples.size());
    for (auto& c : out) c /= M;
    return out;
}

std::vector<double> real_space_render(const ComplexVector& modes) {
    const int M = static_cast<int>(modes.size());
    if (M == 0) return {};
    double scale = 0.0;
    for (const auto& c : modes) scale = std::max(scale, std::abs(c));
    for (int m = 0; m < M; ++m) {
        if (std::abs(modes[m] - std::conj(modes[(M - m) % M])) > 1e-12 * std::max(scale, 1.0))
            throw validation_error("spectrum is not conjugate symmetric");
    }
    Eigen::FFT<double> fft;
    ComplexVector x;
    fft.inv(x, modes);
    std::vector<double> out(M);
    for (int m = 0; m < M; ++m) out[m] = x[m].real() * M;
    return out;
}

}  // namespace phonon
