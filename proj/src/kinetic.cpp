#include "phonon/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "phonon/errors.hpp"

namespace phonon {

void validate(const SimConfig& c) {
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw validation_error(std::string(name) + " must be positive and finite");
    };
    pos(c.eps, "eps");
    pos(c.alpha, "alpha");
    pos(c.Tbar, "Tbar");
    pos(c.Lx, "Lx");
    pos(c.t_end, "t_end");
    pos(c.p_ref, "p_ref");
    pos(c.sigma, "sigma");
    pos(c.max_stiffness, "max_stiffness");
    if (c.M < 4 || c.M % 2 != 0) throw validation_error("M must be even and at least 4");
    if (c.n < 16 || c.n % 2 != 0) throw validation_error("n must be even and at least 16");
    if (c.steps < 1) throw validation_error("steps must be at least 1");
    if (c.record_every < 1) throw validation_error("record_every must be at least 1");
}

InitialData gaussian_temperature(double sigma, double Lx) {
    if (!(sigma > 0.0) || !(Lx > 0.0)) throw validation_error("Gaussian needs sigma > 0 and Lx > 0");
    return [sigma, Lx](double x, double) {
        const double y = x - Lx * std::round(x / Lx);
        return std::exp(-y * y / (2.0 * sigma * sigma));
    };
}

KineticSolver::KineticSolver(const SimConfig& cfg, const DiscreteOperator& op) : cfg_(cfg), op_(&op) {
    validate(cfg);
    const int n = op.n();
    if (n != cfg.n) throw validation_error("kernel table size does not match the configured n");
    xi_ = mode_wavenumbers(cfg.M, cfg.Lx);
    omega_prime_.resize(n);
    for (int i = 0; i < n; ++i) omega_prime_(i) = phonon::omega_prime(op.table().grid.nodes[i]);

    const Eigen::MatrixXd L = op.matrix();
    const double scale = std::pow(cfg.eps, -cfg.alpha);
    stiffness_ = dt() * scale * cfg.Tbar * cfg.Tbar * L.cwiseAbs().rowwise().sum().maxCoeff();
    if (stiffness_ > cfg.max_stiffness)
        throw validation_error("stiffness ratio " + std::to_string(stiffness_) + " exceeds " +
                               std::to_string(cfg.max_stiffness) + "; increase steps");

    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    for (int m = 0; m < cfg.M / 2; ++m) {
        Eigen::MatrixXcd A = (cfg.Tbar * cfg.Tbar * L).cast<std::complex<double>>();
        A.diagonal() -= std::complex<double>(0.0, cfg.eps * xi_[m]) * omega_prime_.cast<std::complex<double>>();
        A *= scale;
        if (cfg.scheme == Scheme::crank_nicolson) {
            const Eigen::MatrixXcd lhs = I - 0.5 * dt() * A;
            prop_.push_back(lhs.partialPivLu().solve(I + 0.5 * dt() * A));
        } else {
            const Eigen::MatrixXcd lhs = I - dt() * A;
            prop_.push_back(lhs.partialPivLu().solve(I));
        }
    }
}

SpectralState KineticSolver::init(const InitialData& f0) const {
    const int n = cfg_.n, M = cfg_.M;
    SpectralState s;
    s.fhat.setZero(n, M);
    std::vector<double> row(M);
    for (int i = 0; i < n; ++i) {
        const double k = op_->table().grid.nodes[i];
        for (int m = 0; m < M; ++m) row[m] = f0(m * cfg_.Lx / M, k);
        const ComplexVector c = forward_transform(row);
        for (int m = 0; m < M / 2; ++m) s.fhat(i, m) = c[m];
    }
    for (int m = M / 2 + 1; m < M; ++m) s.fhat.col(m) = s.fhat.col(M - m).conjugate();
    return s;
}

void KineticSolver::step(SpectralState& s) const {
    const int M = cfg_.M;
    for (int m = 0; m < M / 2; ++m) s.fhat.col(m) = prop_[m] * s.fhat.col(m);
    for (int m = M / 2 + 1; m < M; ++m) s.fhat.col(m) = s.fhat.col(M - m).conjugate();
    s.t += dt();
}

double KineticSolver::l2_norm(const SpectralState& s) const {
    return std::sqrt(cfg_.Lx * op_->weight() * s.fhat.squaredNorm());
}

std::complex<double> KineticSolver::mean(const SpectralState& s) const { return s.fhat.col(0).sum() * op_->weight(); }

std::vector<TraceRow> KineticSolver::extract_moments(const SpectralState& s) const {
    const DiscreteOperator& op = *op_;
    const double w = op.weight(), eps = cfg_.eps;
    const Eigen::VectorXd& V = op.diag();
    const Eigen::VectorXd& om = op.omega();
    const double l2 = l2_norm(s);
    std::vector<TraceRow> rows;
    for (int m = 0; m < cfg_.M / 2; ++m) {
        const Eigen::VectorXcd f = s.fhat.col(m);
        const auto d = decompose_state(op, f, eps);
        const auto [coef, Pf] = project_Pi(op, f);
        const Eigen::VectorXcd Kg = op.kernel().cast<std::complex<double>>() * (f - Pf) * w;
        std::complex<double> R1 = 0.0, R2 = 0.0;
        for (int i = 0; i < op.n(); ++i) {
            const std::complex<double> D(std::pow(eps, 1.6) * cfg_.p_ref + V(i), eps * omega_prime_(i) * xi_[m]);
            const std::complex<double> g = (V(i) / D - 1.0) * Kg(i) * w;
            R1 += g;
            R2 += g / om(i);
        }
        TraceRow r;
        r.t = s.t;
        r.j = m;
        r.xi = xi_[m];
        r.T = d.T;
        r.S = d.S;
        r.h_norm = std::sqrt((V.array() * d.h.array().abs2()).sum() * w);
        r.l2_norm = l2;
        r.r1 = std::abs(R1) * std::pow(eps, -1.6);
        r.r2 = std::abs(R2) / eps;
        rows.push_back(r);
    }
    return rows;
}

RunResult run_simulation(const KineticSolver& solver, const InitialData& f0) {
    const SimConfig& cfg = solver.config();
    RunResult out;
    SpectralState s = solver.init(f0);
    const auto first = solver.extract_moments(s);
    for (const auto& r : first) out.T0.push_back(r.T);
    out.trace = first;
    const std::complex<double> mean0 = solver.mean(s);
    double prev = solver.l2_norm(s);
    for (int k = 1; k <= cfg.steps; ++k) {
        solver.step(s);
        const double now = solver.l2_norm(s);
        if (prev > 0.0) out.max_l2_increase = std::max(out.max_l2_increase, (now - prev) / prev);
        prev = now;
        out.max_mean_drift = std::max(out.max_mean_drift, std::abs(solver.mean(s) - mean0));
        if (k % cfg.record_every == 0 || k == cfg.steps) {
            const auto rows = solver.extract_moments(s);
            out.trace.insert(out.trace.end(), rows.begin(), rows.end());
        }
    }
    return out;
}

namespace {

// Trapezoidal time average of per-row values grouped by record time.
double time_average(const std::vector<double>& t, const std::vector<double>& v) {
    if (t.size() < 2) return v.empty() ? 0.0 : v.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    return acc / (t.back() - t.front());
}

}  // namespace

SweepReport run_epsilon_sweep(const SimConfig& cfg, const KernelTable& table, const KappaSet& kappas,
                              const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw validation_error("eps list is empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw validation_error("eps list must be decreasing");
    const DiffusionParams dp = DiffusionParams::from_kappas(kappas, cfg.Tbar);
    const double rate = dp.kappa_eff / std::pow(dp.Tbar, 1.2);
    const double ratio = kappas.kappa2 / kappas.kappa3;
    const DiscreteOperator op(table);
    const int half = cfg.M / 2;
    const int lower = std::max(1, (half - 1) / 2);

    SweepReport rep;
    rep.kappas = kappas;
    for (double eps : eps_list) {
        SimConfig c = cfg;
        c.eps = eps;
        const KineticSolver solver(c, op);
        EpsilonResult er;
        er.eps = eps;
        er.stiffness = solver.stiffness_ratio();
        er.run = run_simulation(solver, gaussian_temperature(c.sigma, c.Lx));

        std::vector<double> times;
        std::map<int, std::vector<double>> slave[2];
        std::vector<double> r1max, r2max;
        for (std::size_t b = 0; b < er.run.trace.size(); b += half) {
            times.push_back(er.run.trace[b].t);
            double r1 = 0.0, r2 = 0.0;
            for (int j = 0; j < half; ++j) {
                const TraceRow& r = er.run.trace[b + j];
                const auto ref = std::exp(-rate * std::pow(std::abs(r.xi), 1.6) * r.t) * er.run.T0[j];
                er.e_T = std::max(er.e_T, std::abs(r.T - ref));
                r1 = std::max(r1, r.r1);
                r2 = std::max(r2, r.r2);
                if (j == 0) continue;
                const double amp = ratio * std::pow(std::abs(r.xi), 0.6);
                slave[0][j].push_back(std::abs(r.S + amp * r.T));
                slave[1][j].push_back(std::abs(r.S - amp * r.T));
            }
            r1max.push_back(r1);
            r2max.push_back(r2);
        }
        for (int j = 1; j < half; ++j) {
            const double em = time_average(times, slave[0][j]);
            const double ep = time_average(times, slave[1][j]);
            er.slaving_error[0] = std::max(er.slaving_error[0], em);
            er.slaving_error[1] = std::max(er.slaving_error[1], ep);
            if (j <= lower) er.mode_sign.push_back(em <= ep ? -1 : 1);
        }
        er.r1_avg = time_average(times, r1max);
        er.r2_avg = time_average(times, r2max);
        rep.results.push_back(std::move(er));
    }
    const EpsilonResult& last = rep.results.back();
    rep.sign = last.slaving_error[0] <= last.slaving_error[1] ? -1 : 1;
    rep.sign_consistent = true;
    for (const auto& er : rep.results)
        for (int s : er.mode_sign)
            if (s != rep.sign) rep.sign_consistent = false;
    return rep;
}

}  // namespace phonon
