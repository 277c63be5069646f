#pragma once

/// @file acceptance.hpp
/// The acceptance suite: ten numbered criteria, each a list of measured
/// quantities compared against fixed thresholds.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phonon/kernel.hpp"
#include "phonon/kinetic.hpp"
#include "phonon/symbols.hpp"

namespace phonon {

struct Check {
    std::string id;       ///< e.g. "7.halving"
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int number = 0;
    std::string title;
    std::vector<Check> checks;
    std::string note;  ///< extra reported values (e.g. the slaving sign)
    double seconds = 0.0;

    bool pass() const;
};

struct AcceptanceOptions {
    double quad_tol = 1e-10;
    std::string cache_dir;  ///< empty disables the kernel cache
    SimConfig sim;          ///< template for criteria 7-9
    std::vector<double> sweep_eps{0.2, 0.1, 0.05};
    unsigned seed = 20240611;
};

/// <dir>/kernel_n<n>.phnk, the cache file shared by the suite and the command line.
std::string kernel_cache_path(const std::string& dir, int n);

/// Criterion numbers for a comma-separated list of numbers or group names
/// (kappa, kernel, collision, symbols, simulation, resonance). Empty selects all.
/// Throws validation_error on unknown entries.
std::set<int> parse_selection(const std::string& list);

class AcceptanceSuite {
public:
    explicit AcceptanceSuite(AcceptanceOptions opt = {});

    CriterionResult run(int number);
    std::vector<CriterionResult> run_all(const std::set<int>& selection,
                                         const std::function<void(const CriterionResult&)>& on_done = {});

    /// Kernel table of size n, read from or written to the cache when enabled.
    /// with_raw forces assembly so that the uncorrected matrix is present.
    const KernelTable& table(int n, bool with_raw = false);

private:
    CriterionResult kappa_integrals();
    CriterionResult holder();
    CriterionResult degeneracy();
    CriterionResult kernel_of_L();
    CriterionResult collision();
    CriterionResult symbol_limits();
    CriterionResult fractional_limit();
    CriterionResult slaving();
    CriterionResult sanity();
    CriterionResult resonance();

    const VModel& model();
    const SweepReport& sweep();

    AcceptanceOptions opt_;
    std::map<int, std::unique_ptr<KernelTable>> tables_;
    std::unique_ptr<VModel> model_;
    std::unique_ptr<SweepReport> sweep_;
};

}  // namespace phonon
