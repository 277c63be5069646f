#include "phonon/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "phonon/collision.hpp"
#include "phonon/errors.hpp"
#include "phonon/linop.hpp"

namespace phonon {

bool CriterionResult::pass() const {
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string kernel_cache_path(const std::string& dir, int n) {
    return dir + "/kernel_n" + std::to_string(n) + ".phnk";
}

std::set<int> parse_selection(const std::string& list) {
    static const std::map<std::string, std::vector<int>> groups = {
        {"kappa", {1, 2}},     {"kernel", {3, 4}},         {"collision", {5}},
        {"symbols", {6}},      {"simulation", {7, 8, 9}},  {"resonance", {10}},
    };
    std::set<int> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        if (auto it = groups.find(item); it != groups.end()) {
            out.insert(it->second.begin(), it->second.end());
            continue;
        }
        char* end = nullptr;
        const long v = std::strtol(item.c_str(), &end, 10);
        if (*end != '\0' || v < 1 || v > 10) throw validation_error("unknown criterion selector '" + item + "'");
        out.insert(static_cast<int>(v));
    }
    if (out.empty())
        for (int i = 1; i <= 10; ++i) out.insert(i);
    return out;
}

namespace {

Check at_most(std::string id, double measured, double threshold) {
    return {std::move(id), measured, threshold, measured <= threshold};
}

Check at_least(std::string id, double measured, double threshold) {
    return {std::move(id), measured, threshold, measured >= threshold};
}

// Largest ratio v[i+1]/v[i]; strictly decreasing iff below 1.
double max_step_ratio(const std::vector<double>& v) {
    double r = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) r = std::max(r, v[i] / v[i - 1]);
    return r;
}

Check decreasing(std::string id, const std::vector<double>& v) {
    const double r = max_step_ratio(v);
    return {std::move(id), r, 1.0, r < 1.0};
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

double mellin_closed_form() { return (pi / 2.0) / std::sin(pi / 5.0); }

}  // namespace

AcceptanceSuite::AcceptanceSuite(AcceptanceOptions opt) : opt_(std::move(opt)) {}

const KernelTable& AcceptanceSuite::table(int n, bool with_raw) {
    auto it = tables_.find(n);
    if (it != tables_.end() && (!with_raw || it->second->K_raw.size() > 0)) return *it->second;

    std::string path;
    if (!opt_.cache_dir.empty()) path = kernel_cache_path(opt_.cache_dir, n);
    if (!with_raw && !path.empty() && std::filesystem::exists(path)) {
        auto t = std::make_unique<KernelTable>(read_kernel_cache(path));
        if (t->n() == n && t->quad_tol == opt_.quad_tol) {
            tables_[n] = std::move(t);
            return *tables_[n];
        }
    }
    AssemblyOptions ao;
    ao.quad_tol = opt_.quad_tol;
    ao.keep_raw = true;
    auto t = std::make_unique<KernelTable>(assemble_kernel(WaveGrid(n), ao));
    if (!path.empty()) {
        std::filesystem::create_directories(opt_.cache_dir);
        write_kernel_cache(*t, path);
    }
    tables_[n] = std::move(t);
    return *tables_[n];
}

const VModel& AcceptanceSuite::model() {
    if (!model_) model_ = std::make_unique<VModel>();
    return *model_;
}

const SweepReport& AcceptanceSuite::sweep() {
    if (!sweep_) {
        const KernelTable& t = table(opt_.sim.n);
        sweep_ = std::make_unique<SweepReport>(
            run_epsilon_sweep(opt_.sim, t, compute_kappas(model().v0()), opt_.sweep_eps));
    }
    return *sweep_;
}

CriterionResult AcceptanceSuite::run(int number) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    switch (number) {
        case 1: r = kappa_integrals(); break;
        case 2: r = holder(); break;
        case 3: r = degeneracy(); break;
        case 4: r = kernel_of_L(); break;
        case 5: r = collision(); break;
        case 6: r = symbol_limits(); break;
        case 7: r = fractional_limit(); break;
        case 8: r = slaving(); break;
        case 9: r = sanity(); break;
        case 10: r = resonance(); break;
        default: throw validation_error("criterion number out of range");
    }
    r.number = number;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<CriterionResult> AcceptanceSuite::run_all(const std::set<int>& selection,
                                                      const std::function<void(const CriterionResult&)>& on_done) {
    std::vector<CriterionResult> out;
    for (int c : selection) {
        out.push_back(run(c));
        if (on_done) on_done(out.back());
    }
    return out;
}

CriterionResult AcceptanceSuite::kappa_integrals() {
    CriterionResult r;
    r.title = "kappa integrals";
    const KappaSet k = compute_kappas(model().v0());
    const double M = mellin_closed_form();
    r.checks.push_back(at_most("1.kappa2", std::abs(k.kappa2 - 3.0 * pi / 5.0), 1e-10));
    r.checks.push_back(at_most("1.mellin_plus", std::abs(mellin_integral(0.6) - M), 1e-8));
    r.checks.push_back(at_most("1.mellin_minus", std::abs(mellin_integral(-0.6) - M), 1e-8));
    return r;
}

CriterionResult AcceptanceSuite::holder() {
    CriterionResult r;
    r.title = "Holder strictness";
    const KappaSet k = compute_kappas(model().v0());
    const double M = mellin_closed_form();
    r.checks.push_back(at_most("2.ratio", k.kappa2 * k.kappa2 / (k.kappa1 * k.kappa3), 1.0 - 1e-3));
    r.checks.push_back(at_most("2.product", std::abs(k.kappa1 * k.kappa3 - 36.0 / 25.0 * M * M), 1e-8));
    std::ostringstream os;
    os << "v0=" << k.v0 << " kappa1=" << k.kappa1 << " kappa2=" << k.kappa2 << " kappa3=" << k.kappa3
       << " kappa_eff=" << k.kappa_eff;
    r.note = os.str();
    return r;
}

CriterionResult AcceptanceSuite::degeneracy() {
    CriterionResult r;
    r.title = "degeneracy of V";
    const KernelTable& t800 = table(800);
    double lo = INFINITY, hi = 0.0;
    bool finite = true;
    for (int i = 0; i < t800.n(); ++i) {
        const double k = t800.grid.nodes[i];
        const double q = t800.V(i) / std::pow(omega(k), 5.0 / 3.0);
        if (!std::isfinite(q)) finite = false;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    r.checks.push_back({"3.envelope_min", lo, 0.0, finite && lo > 0.0});
    r.checks.push_back({"3.envelope_max", hi, INFINITY, finite && hi < INFINITY});

    std::vector<double> ks, vs;
    for (int j = 6; j <= 14; ++j) {
        ks.push_back(std::ldexp(1.0, -j));
        vs.push_back(v_of_k(ks.back(), opt_.quad_tol));
    }
    const double slope = fit_rate(ks, vs).slope;
    r.checks.push_back(at_most("3.slope", std::abs(slope - 5.0 / 3.0), 0.05));

    const double v400 = table(400).v0, v800 = t800.v0;
    r.checks.push_back(at_most("3.v0_agreement", std::abs(v400 - v800) / v800, 0.01));
    std::ostringstream os;
    os << "slope=" << slope << " v0(400)=" << v400 << " v0(800)=" << v800;
    r.note = os.str();
    return r;
}

CriterionResult AcceptanceSuite::kernel_of_L() {
    CriterionResult r;
    r.title = "kernel of L";
    const DiscreteOperator op400(table(400));
    const SpectralReport s400 = spectral_report(op400);
    const SpectralReport s800 = spectral_report(DiscreteOperator(table(800)));
    r.checks.push_back({"4.near_zero", static_cast<double>(s400.near_zero), 2.0, s400.near_zero == 2});
    r.checks.push_back({"4.c0_positive", s400.c0, 0.0, s400.c0 > 0.0});
    r.checks.push_back(at_most("4.c0_stability", std::abs(s400.c0 - s800.c0) / s800.c0, 0.02));

    const Eigen::VectorXd L1 = op400.apply(Eigen::VectorXd(Eigen::VectorXd::Ones(op400.n())));
    r.checks.push_back(at_most("4.L_one", L1.cwiseAbs().maxCoeff() / op400.diag().cwiseAbs().maxCoeff(), 1e-12));

    std::vector<double> inv_n, res;
    for (int n : {200, 400, 800}) {
        const KernelTable& t = table(n, true);
        const DiscreteOperator raw(t, DiagMode::row_sum, KernelVariant::raw);
        inv_n.push_back(1.0 / n);
        res.push_back(v_norm(raw, raw.apply(Eigen::VectorXd(raw.omega().cwiseInverse()))));
    }
    const double order = fit_rate(inv_n, res).slope;
    r.checks.push_back(decreasing("4.inv_omega_decreasing", res));
    r.checks.push_back(at_least("4.inv_omega_order", order, 1.0));
    std::ostringstream os;
    os << "c0(400)=" << s400.c0 << " c0(800)=" << s800.c0 << " inv_omega residuals=" << join(res);
    r.note = os.str();
    return r;
}

CriterionResult AcceptanceSuite::collision() {
    CriterionResult r;
    r.title = "nonlinear consistency";
    const double tol = opt_.quad_tol;
    const std::vector<double> sample{-0.43, -0.27, -0.11, 0.05, 0.19, 0.33, 0.47};

    double eq = 0.0;
    for (double a : {0.0, 0.3, 1.0})
        for (double b : {0.5, 1.0, 2.0}) {
            const Density W = equilibrium(a, b);
            for (double k : sample) eq = std::max(eq, std::abs(evaluate_C(W, k, tol)));
        }
    r.checks.push_back(at_most("5.equilibrium", eq, 10.0 * tol));

    std::mt19937_64 rng(opt_.seed);
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    const WaveGrid grid(64);
    double worst = INFINITY;
    for (int s = 0; s < 20; ++s) {
        std::array<double, 6> c;
        for (double& x : c) x = coef(rng);
        const Density W = [c](double k) {
            double e = 0.0;
            for (int m = 1; m <= 3; ++m) e += c[2 * m - 2] * std::cos(2 * pi * m * k) + c[2 * m - 1] * std::sin(2 * pi * m * k);
            return std::exp(e);
        };
        check_positive(W, grid);
        double scale = 0.0;
        for (double k : grid.nodes) scale = std::max(scale, std::abs(evaluate_C(W, k, tol)) / W(k));
        const double sigma = entropy_production(W, tol);
        worst = std::min(worst, sigma / std::max(scale, 1e-300));
    }
    r.checks.push_back(at_least("5.entropy", worst, -1e-10));

    const double c = calibrate_normalization();
    const auto lin = linearization_consistency([](double k) { return std::cos(2 * pi * k); }, {1e-1, 1e-2, 1e-3},
                                               {-0.37, -0.12, 0.21, 0.41}, c);
    r.checks.push_back(at_least("5.linearization_order", lin.order, 0.8));

    const auto one = [](double) { return 1.0; };
    double q = 0.0;
    for (double k : sample) q = std::max(q, std::abs(quadratic_Q(one, one, k, c, tol)));
    r.checks.push_back(at_most("5.Q_one_one", q, 10.0 * tol));
    std::ostringstream os;
    os << "c=" << c << " linearization errors=" << join(lin.errors);
    r.note = os.str();
    return r;
}

CriterionResult AcceptanceSuite::symbol_limits() {
    CriterionResult r;
    r.title = "symbol limits";
    const KappaSet k = compute_kappas(model().v0());
    const ConvergenceStudy cs = convergence_study(model(), k, 1.0, 1.0, {1e-1, 1e-2, 1e-3});
    std::ostringstream os;
    for (int i = 0; i < 3; ++i) {
        r.checks.push_back(decreasing("6.a" + std::to_string(i + 1) + "_decreasing", cs.fits[i].errors));
        os << "a" << i + 1 << " errors=" << join(cs.fits[i].errors) << "; ";
    }
    r.checks.push_back(at_least("6.a1_rate", cs.fits[0].slope, 0.3));
    std::vector<double> margins;
    for (double eps : {0.2, 0.1, 0.05}) margins.push_back(a3_lower_bound_check(model(), eps, 2.0).margin);
    const auto [mn, mx] = std::minmax_element(margins.begin(), margins.end());
    r.checks.push_back({"6.a3_margin_positive", *mn, 0.0, *mn > 0.0});
    r.checks.push_back(at_most("6.a3_margin_variation", (*mx - *mn) / *mn, 0.5));
    os << "a3 margins=" << join(margins);
    r.note = os.str();
    return r;
}

CriterionResult AcceptanceSuite::fractional_limit() {
    CriterionResult r;
    r.title = "fractional limit";
    const SweepReport& s = sweep();
    std::vector<double> e;
    for (const auto& er : s.results) e.push_back(er.e_T);
    r.checks.push_back(decreasing("7.decreasing", e));
    r.checks.push_back(at_most("7.halving", e.back() / e.front(), 0.5));
    r.note = "e=" + join(e);
    return r;
}

CriterionResult AcceptanceSuite::slaving() {
    CriterionResult r;
    r.title = "slaved mode";
    const SweepReport& s = sweep();
    const int idx = s.sign < 0 ? 0 : 1;
    std::vector<double> e;
    for (const auto& er : s.results) e.push_back(er.slaving_error[idx]);
    r.checks.push_back(decreasing("8.decreasing", e));
    r.checks.push_back({"8.sign_consistent", s.sign_consistent ? 1.0 : 0.0, 1.0, s.sign_consistent});
    r.note = "sign=" + std::to_string(s.sign) + " errors=" + join(e);
    return r;
}

CriterionResult AcceptanceSuite::sanity() {
    CriterionResult r;
    r.title = "simulation sanity";
    const SweepReport& s = sweep();
    double l2 = 0.0, drift = 0.0;
    std::vector<double> r1, r2;
    for (const auto& er : s.results) {
        l2 = std::max(l2, er.run.max_l2_increase);
        drift = std::max(drift, er.run.max_mean_drift);
        r1.push_back(er.r1_avg);
        r2.push_back(er.r2_avg);
    }
    r.checks.push_back(at_most("9.l2_increase", l2, 1e-12));
    r.checks.push_back(at_most("9.mean_drift", drift, 1e-10));
    r.checks.push_back(decreasing("9.r1_decreasing", r1));
    r.checks.push_back(decreasing("9.r2_decreasing", r2));
    r.note = "r1=" + join(r1) + " r2=" + join(r2);
    return r;
}

CriterionResult AcceptanceSuite::resonance() {
    CriterionResult r;
    r.title = "resonance geometry";
    double worst = 0.0;
    int missing = 0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const double k = -0.5 + (i + 0.5) / 100.0, kp = -0.5 + (j + 0.37) / 100.0;
            const auto k1 = resonance_partner(k, kp);
            if (!k1) {
                ++missing;
                continue;
            }
            worst = std::max(worst, std::abs(resonance_residual(k, kp, *k1)));
        }
    r.checks.push_back(at_most("10.partner_residual", worst, 1e-10));
    r.checks.push_back({"10.partner_missing", static_cast<double>(missing), 0.0, missing == 0});

    const WaveGrid g(200);
    const GapResult gap = three_phonon_gap(g);
    r.checks.push_back(at_least("10.gap_nonnegative", gap.min_gap, 0.0));
    const double dist = std::min(std::abs(symmetric(gap.k)), std::abs(symmetric(gap.k1)));
    r.checks.push_back(at_most("10.gap_adjacent_trivial", dist, g.h()));
    return r;
}

}  // namespace phonon
