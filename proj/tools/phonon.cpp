// phonon: experiment runner for the linearized phonon kinetic equation.
//
//   phonon <kernel|spectrum|symbols|kappa|simulate|verify> [--config FILE] [--key value ...]
//
// Exit codes: 0 ok, 1 I/O, 2 numerical or validation failure, 3 acceptance failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "phonon/acceptance.hpp"
#include "phonon/errors.hpp"
#include "phonon/frac_diffusion.hpp"
#include "phonon/kernel.hpp"
#include "phonon/kinetic.hpp"
#include "phonon/linop.hpp"
#include "phonon/run_config.hpp"
#include "phonon/symbols.hpp"

namespace fs = std::filesystem;
using namespace phonon;

namespace {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path + " for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char h[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(h, sizeof h, "%02x", md[i]);
        hex += h;
    }
    return hex;
}

class Context {
public:
    Context(std::string command, RunConfig cfg) : command_(std::move(command)), cfg_(std::move(cfg)) {
        out_dir_ = cfg_.text("out_dir", "out");
        if (cfg_.has("cache_dir"))
            cache_dir_ = cfg_.text("cache_dir", "");
        else if (const char* env = std::getenv("PHONON_CACHE_DIR"); env && *env)
            cache_dir_ = env;
        else
            cache_dir_ = out_dir_ + "/cache";
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        if (ec) throw io_error("cannot create output directory " + out_dir_ + ": " + ec.message());
    }

    const RunConfig& cfg() const { return cfg_; }
    const std::string& cache_dir() const { return cache_dir_; }
    double quad_tol() const { return cfg_.real("quad_tol", 1e-10); }

    std::string out_path(const std::string& name) const { return out_dir_ + "/" + name; }

    /// Writes text with LF endings and records it for the manifest.
    void write(const std::string& name, const std::string& text) {
        const std::string path = out_path(name);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot write " + path);
        out << text;
        if (!out) throw io_error("write failed for " + path);
        files_.push_back(path);
    }

    void record(const std::string& path) { files_.push_back(path); }

    void write_manifest() const {
        std::ostringstream os;
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "command " << command_ << "\n";
        os << "created " << stamp << "\n";
        for (const auto& [k, v] : cfg_.values()) os << "config " << k << "=" << v << "\n";
        os << "cache_dir " << cache_dir_ << "\n";
        for (const auto& f : files_) os << "file " << f << " sha256 " << sha256_file(f) << " bytes " << fs::file_size(f) << "\n";
        const std::string path = out_path(command_ + ".manifest");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot write " + path);
        out << os.str();
    }

    KernelTable load_or_build(int n) {
        const std::string path = kernel_cache_path(cache_dir_, n);
        if (fs::exists(path)) {
            KernelTable t = read_kernel_cache(path);
            if (t.n() == n && t.quad_tol == quad_tol()) return t;
        }
        return build(n);
    }

    KernelTable build(int n) {
        if (n < 16 || n % 2 != 0) throw validation_error("n must be even and at least 16, got " + std::to_string(n));
        AssemblyOptions ao;
        ao.quad_tol = quad_tol();
        ao.threads = cfg_.integer("threads", 0);
        KernelTable t = assemble_kernel(WaveGrid(n), ao);
        std::error_code ec;
        fs::create_directories(cache_dir_, ec);
        if (ec) throw io_error("cannot create cache directory " + cache_dir_ + ": " + ec.message());
        write_kernel_cache(t, kernel_cache_path(cache_dir_, n));
        return t;
    }

private:
    std::string command_;
    RunConfig cfg_;
    std::string out_dir_;
    std::string cache_dir_;
    std::vector<std::string> files_;
};

std::string csv_row(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_real(v[i]);
    }
    return s + "\n";
}

int cmd_kernel(Context& ctx) {
    const int n = ctx.cfg().integer("n", 400);
    const auto start = std::chrono::steady_clock::now();
    const KernelTable t = ctx.build(n);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ctx.record(kernel_cache_path(ctx.cache_dir(), n));
    std::printf("n          %d\n", n);
    std::printf("v0         %.10g\n", t.v0);
    std::printf("c1         %.10g\n", t.c1);
    std::printf("c2         %.10g\n", t.c2);
    std::printf("assembly   %.2f s\n", secs);
    if (!t.v0_warning.empty()) std::printf("warning    %s\n", t.v0_warning.c_str());
    return 0;
}

int cmd_spectrum(Context& ctx) {
    const KernelTable t = ctx.load_or_build(ctx.cfg().integer("n", 400));
    const DiscreteOperator op(t);
    const SpectralReport r = spectral_report(op);
    std::string csv = "index,lambda,abs_lambda\n";
    for (int i = 0; i < r.eigenvalues.size(); ++i)
        csv += std::to_string(i) + "," + format_real(r.eigenvalues(i)) + "," + format_real(std::abs(r.eigenvalues(i))) + "\n";
    ctx.write("spectrum.csv", csv);
    std::printf("n                 %d\n", t.n());
    std::printf("near_zero         %d\n", r.near_zero);
    for (int i = 0; i < std::min<int>(3, r.eigenvalues.size()); ++i)
        std::printf("lambda[%d]         %.6e\n", i, r.eigenvalues(i));
    std::printf("c0                %.10g\n", r.c0);
    std::printf("max|lambda|       %.10g\n", r.max_abs);
    std::printf("||L 1||_V         %.3e\n", r.residual_one);
    std::printf("||L 1/omega||_V   %.3e\n", r.residual_inv_omega);
    return 0;
}

int cmd_symbols(Context& ctx) {
    const VModel model;
    const KappaSet k = compute_kappas(model.v0());
    const double tol = std::min(ctx.quad_tol(), 1e-11);
    std::string csv = "eps,p,xi,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,lim_a1,lim_a2,lim_a3\n";
    for (double eps : ctx.cfg().list("eps", {0.1}))
        for (double p : ctx.cfg().list("p", {1.0}))
            for (double xi : ctx.cfg().list("xi", {1.0})) {
                const Symbols s = symbols_eps(model, eps, p, xi, tol);
                const auto lim = limit_symbols(k, p, xi);
                csv += csv_row({eps, p, xi, s.a1.real(), s.a1.imag(), s.a2.real(), s.a2.imag(), s.a3.real(),
                                s.a3.imag(), lim[0], lim[1], lim[2]});
            }
    ctx.write("symbols.csv", csv);
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_kappa(Context& ctx) {
    const VModel model;
    const KappaSet k = compute_kappas(model.v0());
    const double ratio = k.kappa2 * k.kappa2 / (k.kappa1 * k.kappa3);
    const std::string csv = "v0,kappa1,kappa2,kappa3,kappa_eff,holder_ratio\n" +
                            csv_row({k.v0, k.kappa1, k.kappa2, k.kappa3, k.kappa_eff, ratio});
    ctx.write("kappa.csv", csv);
    std::fputs(csv.c_str(), stdout);
    return 0;
}

constexpr const char* trace_header = "t,j,xi,re_T,im_T,re_S,im_S,h_norm,l2_norm,r1,r2\n";

int cmd_simulate(Context& ctx) {
    SimConfig base = ctx.cfg().sim_config();
    const KernelTable t = ctx.load_or_build(base.n);
    const DiscreteOperator op(t);
    const KappaSet kap = compute_kappas(VModel().v0());
    const auto eps_list = ctx.cfg().list("eps", {base.eps});
    const InitialData f0 = gaussian_temperature(base.sigma, base.Lx);

    ComplexVector T0;
    std::vector<double> xi;
    for (double eps : eps_list) {
        SimConfig c = base;
        c.eps = eps;
        const KineticSolver solver(c, op);
        const RunResult run = run_simulation(solver, f0);
        std::string csv = trace_header;
        for (const auto& r : run.trace)
            csv += format_real(r.t) + "," + std::to_string(r.j) + "," +
                   csv_row({r.xi, r.T.real(), r.T.imag(), r.S.real(), r.S.imag(), r.h_norm, r.l2_norm, r.r1, r.r2});
        char tag[32];
        std::snprintf(tag, sizeof tag, "%g", eps);
        const std::string name = eps_list.size() == 1 ? "trace.csv" : "trace_eps" + std::string(tag) + ".csv";
        ctx.write(name, csv);
        std::printf("eps %-8g stiffness %.3f  max L2 increase %.3e  mean drift %.3e -> %s\n", eps,
                    solver.stiffness_ratio(), run.max_l2_increase, run.max_mean_drift, name.c_str());
        if (T0.empty()) {
            T0 = run.T0;
            xi.assign(solver.xi().begin(), solver.xi().begin() + c.M / 2);
        }
    }

    // Limit equation on the same modes and record times, in the trace schema.
    const DiffusionParams dp = DiffusionParams::from_kappas(kap, base.Tbar);
    std::string csv = trace_header;
    for (int k = 0; k <= base.steps; ++k) {
        if (k % base.record_every != 0 && k != base.steps) continue;
        const double time = base.t_end * k / base.steps;
        const ComplexVector T = evolve_hat(dp, T0, xi, time);
        const ComplexVector S = slaved_S_hat(kap, T, xi, -1);
        for (std::size_t j = 0; j < xi.size(); ++j)
            csv += format_real(time) + "," + std::to_string(j) + "," +
                   csv_row({xi[j], T[j].real(), T[j].imag(), S[j].real(), S[j].imag(), 0.0, 0.0, 0.0, 0.0});
    }
    ctx.write("limit.csv", csv);
    return 0;
}

int cmd_verify(Context& ctx) {
    AcceptanceOptions opt;
    opt.quad_tol = ctx.quad_tol();
    opt.cache_dir = ctx.cache_dir();
    opt.sim = ctx.cfg().sim_config();
    opt.seed = static_cast<unsigned>(ctx.cfg().integer("seed", static_cast<int>(opt.seed)));
    const std::set<int> sel = parse_selection(ctx.cfg().text("only", ""));
    AcceptanceSuite suite(opt);
    bool all = true;
    std::string csv = "criterion,measured,threshold,pass\n";
    suite.run_all(sel, [&](const CriterionResult& r) {
        all = all && r.pass();
        std::printf("criterion %2d %-24s %s  (%.1f s)\n", r.number, r.title.c_str(), r.pass() ? "PASS" : "FAIL", r.seconds);
        for (const auto& c : r.checks) {
            std::printf("    %-28s measured %-14.6g threshold %-10.6g %s\n", c.id.c_str(), c.measured, c.threshold,
                        c.pass ? "pass" : "FAIL");
            csv += c.id + "," + format_real(c.measured) + "," + format_real(c.threshold) + "," + (c.pass ? "1" : "0") + "\n";
        }
        if (!r.note.empty()) std::printf("    %s\n", r.note.c_str());
        std::fflush(stdout);
    });
    ctx.write("verify.csv", csv);
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized phonon kinetic equation: kernel, spectra, symbols and the fractional limit"};
    app.require_subcommand(1, 1);

    std::map<std::string, std::string> overrides;
    std::string config_file;
    const std::map<std::string, std::string> help = {
        {"kernel", "assemble the kernel table and write the cache"},
        {"spectrum", "eigenvalues of the symmetrized operator"},
        {"symbols", "symbols a1, a2, a3 and their limits"},
        {"kappa", "limit constants kappa1, kappa2, kappa3"},
        {"simulate", "kinetic simulation and the limit reference"},
        {"verify", "run the acceptance suite"},
    };
    for (const auto& [name, text] : help) {
        CLI::App* sub = app.add_subcommand(name, text);
        sub->add_option("--config", config_file, "flat key=value file");
        for (const auto& key : RunConfig::keys()) sub->add_option("--" + key, overrides[key]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg;
        if (!config_file.empty()) cfg.load_file(config_file);
        for (const auto& key : RunConfig::keys())
            if (app.get_subcommands().front()->count("--" + key) > 0) cfg.set(key, overrides[key]);

        Context ctx(command, cfg);
        int code = 0;
        if (command == "kernel") code = cmd_kernel(ctx);
        else if (command == "spectrum") code = cmd_spectrum(ctx);
        else if (command == "symbols") code = cmd_symbols(ctx);
        else if (command == "kappa") code = cmd_kappa(ctx);
        else if (command == "simulate") code = cmd_simulate(ctx);
        else code = cmd_verify(ctx);
        ctx.write_manifest();
        return code;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
