#ifndef ABELGAS_RUN_HPP
#define ABELGAS_RUN_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abelgas/ad_system.hpp"
#include "abelgas/integrator.hpp"
#include "abelgas/model.hpp"

namespace abelgas {

enum class RouteLabel {
    full_system,
    subsystem,
    upper_ode,
    abel_time,
    abel_w,
    case1,
    case2,
};

const char* to_string(RouteLabel r);
std::optional<RouteLabel> route_from_string(const std::string& name);
// Routes whose primary output is the substrate envelope S1_upper(t).
bool produces_s1_upper(RouteLabel r);

enum ExitCode {
    exit_ok = 0,
    exit_invalid_scenario = 1,
    exit_route_failed = 2,
    exit_tolerance_exceeded = 3,
};

struct RunOptions {
    std::vector<RouteLabel> routes;  // empty: take the scenario's list
    bool compare = false;
    double tol_cross = 1e-6;
    bool paper_literal_signs = false;
    std::string out_dir;
};

struct PairDeviation {
    RouteLabel a, b;
    double max_abs = 0;
    double rms = 0;
};

struct RouteResult {
    RouteLabel label;
    bool ok = false;
    std::string csv_file;
    std::string error;
    SolutionSeries series;
    // Closed-form routes only:
    double domain_lo = 0, domain_hi = 0;
    double max_sampled_residual = 0;
    bool has_residual = false;
    // Full-system route only: smallest value over the grid of the state
    // components required to stay nonnegative (X1, X2, S1, S2, F_M).
    bool has_min_state = false;
    double min_state = 0;
};

struct SignAuditRecord {
    std::string active_convention;
    double b1_legacy = 0;
    double b1_audited = 0;
    // Transform identity |dV/dt - (-V^2 dS1/dt)| relative, sampled at 32
    // deterministic points for this scenario; small only for the audited
    // convention.
    double transform_identity_max_rel = 0;
};

struct Def2Summary {
    bool ran = false;
    std::size_t points = 0;
    std::size_t violation_count = 0;
    bool boundary_case = false;
    std::string first_violation;
};

struct RunReport {
    std::string scenario_json;
    std::vector<RouteResult> routes;
    std::vector<PairDeviation> deviations;  // symmetric pairs, emitted once
    SignAuditRecord sign_audit;
    Def2Summary def2;
    std::vector<std::string> placeholder_params;
    double tol_cross = 1e-6;
    bool compare_requested = false;
    bool compare_ok = true;
    int exit_code = exit_ok;
};

// Runs the requested routes, writes one CSV per route plus report.txt,
// report.json and plot.gp into out_dir, and returns the exit code:
// 0 all requested verifications pass, 1 invalid scenario, 2 a route failed,
// 3 a comparison tolerance was exceeded (artifacts still written).
int run(const Scenario& scenario, const RunOptions& opt,
        RunReport* report_out = nullptr);

// Pairwise max-abs and RMS deviations between series sampled on the common
// grid. All series must cover the grid exactly (run() constructs them via
// dense output / closed-form evaluation). Throws on fewer than two series
// or an empty common grid.
std::vector<PairDeviation> compare_routes(
    const std::vector<const SolutionSeries*>& series,
    std::span<const double> common_grid,
    const std::vector<RouteLabel>& labels);

// CSV helpers: UTF-8, comma separated, '\n' line endings, header row,
// shortest round-trip decimal formatting.
void write_csv(const std::string& path, const SolutionSeries& series,
               const std::vector<std::string>& column_names);
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header = nullptr);

std::string format_report_text(const RunReport& r, const std::string& timestamp);
std::string format_report_json(const RunReport& r, const std::string& timestamp);

}  // namespace abelgas

#endif
