#include "abelgas/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "abelgas/abel.hpp"
#include "abelgas/canonical.hpp"

namespace abelgas {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(RouteLabel r) {
    switch (r) {
        case RouteLabel::full_system: return "full-system";
        case RouteLabel::subsystem: return "subsystem";
        case RouteLabel::upper_ode: return "upper-ode";
        case RouteLabel::abel_time: return "abel-time";
        case RouteLabel::abel_w: return "abel-w";
        case RouteLabel::case1: return "case1";
        case RouteLabel::case2: return "case2";
    }
    return "?";
}

std::optional<RouteLabel> route_from_string(const std::string& name) {
    for (RouteLabel r :
         {RouteLabel::full_system, RouteLabel::subsystem, RouteLabel::upper_ode,
          RouteLabel::abel_time, RouteLabel::abel_w, RouteLabel::case1,
          RouteLabel::case2})
        if (name == to_string(r)) return r;
    return std::nullopt;
}

bool produces_s1_upper(RouteLabel r) {
    return r == RouteLabel::upper_ode || r == RouteLabel::abel_time ||
           r == RouteLabel::abel_w || r == RouteLabel::case1 ||
           r == RouteLabel::case2;
}

namespace {

std::string shortest(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = b;
    return g;
}

// Deterministic uniform deviates for the report's transform-identity probe.
struct SplitMix {
    std::uint64_t s;
    double next() {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

}  // namespace

void write_csv(const std::string& path, const SolutionSeries& series,
               const std::vector<std::string>& column_names) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << "t";
    for (const auto& c : column_names) out << "," << c;
    out << "\n";
    for (std::size_t i = 0; i < series.grid.size(); ++i) {
        out << shortest(series.grid[i]);
        for (double v : series.values[i]) out << "," << shortest(v);
        out << "\n";
    }
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read CSV: " + path);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (first) {
            if (header) {
                while (std::getline(ss, cell, ',')) header->push_back(cell);
            }
            first = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            double v = 0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{})
                throw std::runtime_error("bad CSV number '" + cell + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<PairDeviation> compare_routes(
    const std::vector<const SolutionSeries*>& series,
    std::span<const double> common_grid,
    const std::vector<RouteLabel>& labels) {
    if (series.size() < 2)
        throw std::invalid_argument("compare_routes: need at least two series");
    if (common_grid.empty())
        throw std::invalid_argument(
            "compare_routes: empty domain intersection, nothing to compare");
    for (const auto* s : series) {
        if (s->grid.size() != common_grid.size())
            throw std::invalid_argument(
                "compare_routes: series does not cover the common grid");
        for (std::size_t i = 0; i < common_grid.size(); ++i)
            if (std::abs(s->grid[i] - common_grid[i]) >
                1e-12 * std::max(1.0, std::abs(common_grid[i])))
                throw std::invalid_argument(
                    "compare_routes: series grid mismatch with the common grid");
    }

    std::vector<PairDeviation> out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = i + 1; j < series.size(); ++j) {
            PairDeviation d;
            d.a = labels[i];
            d.b = labels[j];
            double sum2 = 0;
            for (std::size_t g = 0; g < common_grid.size(); ++g) {
                const double diff =
                    series[i]->values[g][0] - series[j]->values[g][0];
                d.max_abs = std::max(d.max_abs, std::abs(diff));
                sum2 += diff * diff;
            }
            d.rms = std::sqrt(sum2 / static_cast<double>(common_grid.size()));
            out.push_back(d);
        }
    }
    return out;
}

namespace {

// One solution route evaluated on the requested grid; values[.][0] is
// S1_upper for the envelope routes.
RouteResult run_route(RouteLabel label, const Scenario& sc,
                      const RunOptions& opt, std::span<const double> grid) {
    RouteResult rr;
    rr.label = label;
    const ModelParams& p = sc.params;
    const SignConvention conv = opt.paper_literal_signs
                                    ? SignConvention::paper_literal
                                    : SignConvention::audited;
    try {
        switch (label) {
            case RouteLabel::full_system: {
                IvpProblem prob;
                prob.dimension = 7;
                prob.x0 = 0;
                prob.x_end = sc.t_end;
                const AdState& s0 = sc.initial_state;
                prob.y0 = {s0.X1, s0.X2, s0.S1, s0.S2, s0.A, s0.C, s0.F_M};
                prob.rhs = [&p](double, std::span<const double> y,
                                std::span<double> dy) {
                    AdState s{y[0], y[1], y[2], y[3], y[4], y[5], y[6]};
                    const AdState d = rhs_full(s, p);
                    dy[0] = d.X1; dy[1] = d.X2; dy[2] = d.S1; dy[3] = d.S2;
                    dy[4] = d.A; dy[5] = d.C; dy[6] = d.F_M;
                };
                rr.series = solve_ivp(prob, grid);
                rr.series.name = "state";
                if (rr.series.status == SolveStatus::complete) {
                    rr.has_min_state = true;
                    rr.min_state = 0;
                    for (const auto& row : rr.series.values)
                        for (int j : {0, 1, 2, 3, 6})
                            rr.min_state = std::min(rr.min_state, row[j]);
                }
                break;
            }
            case RouteLabel::subsystem: {
                IvpProblem prob;
                prob.dimension = 2;
                prob.x0 = 0;
                prob.x_end = sc.t_end;
                prob.y0 = {sc.initial_state.X1, sc.initial_state.S1};
                prob.rhs = [&p](double, std::span<const double> y,
                                std::span<double> dy) {
                    rhs_subsystem(y[0], y[1], p, dy[0], dy[1]);
                };
                rr.series = solve_ivp(prob, grid);
                rr.series.name = "X1,S1";
                break;
            }
            case RouteLabel::upper_ode: {
                const EnvelopePair env =
                    make_envelopes(sc.initial_state.X1, sc.gamma, p);
                IvpProblem prob;
                prob.dimension = 1;
                prob.x0 = 0;
                prob.x_end = sc.t_end;
                prob.y0 = {sc.initial_state.S1};
                prob.rhs = [&p, env](double t, std::span<const double> y,
                                     std::span<double> dy) {
                    dy[0] = rhs_upper_S1(t, y[0], env, p);
                };
                rr.series = solve_ivp(prob, grid);
                rr.series.name = "S1_upper";
                break;
            }
            case RouteLabel::abel_time: {
                const AbelConstants k = derive_constants(
                    p, sc.initial_state.X1, sc.gamma,
                    sc.integration_constants.value_or(IntegrationConstants{}));
                IvpProblem prob;
                prob.dimension = 1;
                prob.x0 = 0;
                prob.x_end = sc.t_end;
                prob.y0 = {substrate_to_V(sc.initial_state.S1, p.K_S1)};
                prob.rhs = [k, conv](double t, std::span<const double> y,
                                     std::span<double> dy) {
                    dy[0] = abel_rhs_time(t, y[0], k, conv);
                };
                rr.series = solve_ivp(prob, grid);
                for (auto& row : rr.series.values)
                    row[0] = V_to_substrate(row[0], p.K_S1);
                rr.series.name = "S1_upper";
                break;
            }
            case RouteLabel::abel_w: {
                const AbelConstants k = derive_constants(
                    p, sc.initial_state.X1, sc.gamma,
                    sc.integration_constants.value_or(IntegrationConstants{}));
                IvpProblem prob;
                prob.dimension = 1;
                prob.x0 = 1.0;  // w(0) = 1
                prob.x_end = std::exp(k.m * sc.t_end);
                prob.y0 = {substrate_to_V(sc.initial_state.S1, p.K_S1)};
                prob.rhs = [k, conv](double w, std::span<const double> y,
                                     std::span<double> dy) {
                    dy[0] = abel_rhs_w(w, y[0], k, conv);
                };
                std::vector<double> wgrid(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i)
                    wgrid[i] = std::exp(k.m * grid[i]);
                wgrid.front() = 1.0;
                wgrid.back() = prob.x_end;
                rr.series = solve_ivp(prob, wgrid);
                rr.series.grid.assign(grid.begin(), grid.end());  // back to t
                for (auto& row : rr.series.values)
                    row[0] = V_to_substrate(row[0], p.K_S1);
                rr.series.name = "S1_upper";
                break;
            }
            case RouteLabel::case1:
            case RouteLabel::case2: {
                IntegrationConstants ic =
                    sc.integration_constants.value_or(IntegrationConstants{});
                const ClosedFormCase which = label == RouteLabel::case1
                                                 ? ClosedFormCase::case1
                                                 : ClosedFormCase::case2;
                if (which == ClosedFormCase::case2 && ic.C0 == 0 &&
                    !sc.integration_constants)
                    ic.C0 = 0.01;  // default forcing constant, real branch sign
                const AbelConstants k =
                    derive_constants(p, sc.initial_state.X1, sc.gamma, ic);
                if (!sc.integration_constants) {
                    const double V0 =
                        substrate_to_V(sc.initial_state.S1, p.K_S1);
                    ic = fit_radicand_constant(which, k, ic, V0, conv);
                }
                const ClosedFormSolution sol =
                    which == ClosedFormCase::case1 ? case1_solution(k, ic, conv)
                                                   : case2_solution(k, ic, conv);
                rr.domain_lo = sol.domain_lo;
                rr.domain_hi = sol.domain_hi;
                rr.max_sampled_residual = sol.max_sampled_residual;
                rr.has_residual = true;
                rr.series.name = "S1_upper";
                rr.series.status = SolveStatus::complete;
                for (double t : grid) {
                    if (t <= sol.domain_lo || t >= sol.domain_hi) break;
                    rr.series.grid.push_back(t);
                    rr.series.values.push_back({sol.S1_of_t(t)});
                }
                rr.series.last_x =
                    rr.series.grid.empty() ? 0.0 : rr.series.grid.back();
                if (rr.series.grid.empty())
                    throw std::domain_error(
                        "closed-form validity domain does not reach the "
                        "output grid");
                break;
            }
        }
        rr.series.route = to_string(label);
        rr.ok = rr.series.status == SolveStatus::complete;
        if (!rr.ok) rr.error = rr.series.message;
    } catch (const std::exception& e) {
        rr.ok = false;
        rr.error = e.what();
    }
    return rr;
}

Def2Summary run_def2_check(const Scenario& sc,
                           std::span<const double> grid) {
    Def2Summary sum;
    const ModelParams& p = sc.params;
    try {
        const EnvelopePair env = make_envelopes(sc.initial_state.X1, sc.gamma, p);
        CandidateEnvelopes cand;
        cand.t.assign(grid.begin(), grid.end());
        cand.c1 = sc.initial_state.X1;
        cand.c2 = sc.initial_state.S1;
        for (double t : grid) {
            cand.x1_lower.push_back(env.lower_X1(t));
            cand.x1_upper.push_back(env.upper_X1(t));
        }
        IvpProblem up;
        up.dimension = 1;
        up.x0 = 0;
        up.x_end = grid.back();
        up.y0 = {sc.initial_state.S1};
        up.rhs = [&p, env](double t, std::span<const double> y,
                           std::span<double> dy) {
            dy[0] = rhs_upper_S1(t, y[0], env, p);
        };
        auto su = solve_ivp(up, grid);
        IvpProblem lo = up;
        lo.rhs = [&p, env](double t, std::span<const double> y,
                           std::span<double> dy) {
            dy[0] = rhs_lower_S1(t, y[0], env, p);
        };
        auto sl = solve_ivp(lo, grid);
        if (su.status != SolveStatus::complete ||
            sl.status != SolveStatus::complete)
            return sum;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cand.s1_upper.push_back(su.values[i][0]);
            cand.s1_lower.push_back(sl.values[i][0]);
        }
        const Def2Report rep = check_lower_upper(cand, p);
        sum.ran = true;
        sum.points = rep.points_checked;
        sum.violation_count = rep.violations.size();
        sum.boundary_case = rep.boundary_case;
        if (!rep.violations.empty()) {
            const auto& v = rep.violations.front();
            sum.first_violation = v.condition + " at t = " +
                                  shortest(cand.t[v.index]) +
                                  " (magnitude " + shortest(v.magnitude) + ")";
        }
    } catch (const std::exception&) {
        sum.ran = false;
    }
    return sum;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

std::string format_report_text(const RunReport& r, const std::string& timestamp) {
    std::ostringstream o;
    o << "abelgas run report\n";
    o << "generated: " << timestamp << "\n";
    o << "\n== scenario ==\n" << r.scenario_json << "\n";

    o << "\n== routes ==\n";
    for (const auto& rt : r.routes) {
        o << to_string(rt.label) << ": ";
        if (rt.ok) {
            o << "ok, " << rt.series.grid.size() << " points";
            const auto& d = rt.series.diagnostics;
            if (d.n_steps > 0)
                o << ", steps " << d.n_accepted << " (+" << d.n_rejected
                  << " rejected), max est local error "
                  << shortest(d.max_est_error);
            if (rt.has_residual) {
                o << ", domain (" << shortest(rt.domain_lo) << ", "
                  << shortest(rt.domain_hi) << ")"
                  << ", max sampled residual "
                  << shortest(rt.max_sampled_residual);
            }
            if (rt.has_min_state) {
                o << ", min of X1,X2,S1,S2,F_M " << shortest(rt.min_state)
                  << (rt.min_state >= -1e-9 ? " (nonnegative within 1e-9)"
                                            : " (NEGATIVE beyond 1e-9)");
            }
            o << ", csv " << rt.csv_file;
        } else {
            o << "FAILED: " << rt.error;
        }
        o << "\n";
    }

    o << "\n== sign audit ==\n";
    o << "active convention: " << r.sign_audit.active_convention << "\n";
    o << "b1 (legacy closed-form exponent): " << shortest(r.sign_audit.b1_legacy)
      << "\n";
    o << "b1 (audited, from the chain-rule f3): "
      << shortest(r.sign_audit.b1_audited) << "\n";
    o << "transform identity max rel deviation (audited rhs, 32 samples): "
      << shortest(r.sign_audit.transform_identity_max_rel) << "\n";

    o << "\n== lower/upper solution check ==\n";
    if (r.def2.ran) {
        o << "points checked: " << r.def2.points << "\n";
        o << "violations: " << r.def2.violation_count << "\n";
        if (r.def2.boundary_case)
            o << "boundary case: zero-margin envelopes, differential "
                 "inequalities degenerate\n";
        if (!r.def2.first_violation.empty())
            o << "first: " << r.def2.first_violation << "\n";
    } else {
        o << "not run (requires the upper-ode route)\n";
    }

    if (r.compare_requested) {
        o << "\n== cross-route deviations (S1_upper) ==\n";
        o << "tolerance: " << shortest(r.tol_cross) << "\n";
        for (const auto& d : r.deviations) {
            o << to_string(d.a) << " vs " << to_string(d.b) << ": max-abs "
              << shortest(d.max_abs) << ", rms " << shortest(d.rms)
              << (d.max_abs <= r.tol_cross ? "  [ok]" : "  [EXCEEDED]") << "\n";
        }
    }

    o << "\n== placeholder parameters ==\n";
    if (r.placeholder_params.empty()) {
        o << "none (all parameters provided by the scenario)\n";
    } else {
        o << "the following parameters use placeholder defaults, not "
             "calibrated values:\n";
        for (const auto& n : r.placeholder_params) o << "  " << n << "\n";
    }

    o << "\nexit code: " << r.exit_code << "\n";
    return o.str();
}

std::string format_report_json(const RunReport& r, const std::string& timestamp) {
    json j;
    j["generated"] = timestamp;
    j["scenario"] = json::parse(r.scenario_json);
    j["routes"] = json::array();
    for (const auto& rt : r.routes) {
        json jr;
        jr["route"] = to_string(rt.label);
        jr["ok"] = rt.ok;
        if (rt.ok) {
            jr["points"] = rt.series.grid.size();
            jr["csv"] = rt.csv_file;
            jr["steps_accepted"] = rt.series.diagnostics.n_accepted;
            jr["steps_rejected"] = rt.series.diagnostics.n_rejected;
            jr["max_est_local_error"] = rt.series.diagnostics.max_est_error;
            if (rt.has_residual) {
                jr["domain"] = {rt.domain_lo, rt.domain_hi};
                jr["max_sampled_residual"] = rt.max_sampled_residual;
            }
            if (rt.has_min_state) {
                jr["min_state"] = rt.min_state;
                jr["nonnegative_within_1e-9"] = rt.min_state >= -1e-9;
            }
        } else {
            jr["error"] = rt.error;
        }
        j["routes"].push_back(jr);
    }
    j["sign_audit"] = {
        {"active_convention", r.sign_audit.active_convention},
        {"b1_legacy", r.sign_audit.b1_legacy},
        {"b1_audited", r.sign_audit.b1_audited},
        {"transform_identity_max_rel", r.sign_audit.transform_identity_max_rel},
    };
    j["def2"] = {
        {"ran", r.def2.ran},
        {"points", r.def2.points},
        {"violations", r.def2.violation_count},
        {"boundary_case", r.def2.boundary_case},
        {"first_violation", r.def2.first_violation},
    };
    if (r.compare_requested) {
        j["deviations"] = json::array();
        for (const auto& d : r.deviations) {
            j["deviations"].push_back({{"a", to_string(d.a)},
                                       {"b", to_string(d.b)},
                                       {"max_abs", d.max_abs},
                                       {"rms", d.rms}});
        }
        j["tol_cross"] = r.tol_cross;
    }
    j["placeholder_params"] = r.placeholder_params;
    j["exit_code"] = r.exit_code;
    return j.dump(2);
}

namespace {

void write_plot_script(const std::string& path,
                       const std::vector<const RouteResult*>& s1_routes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot script: " + path);
    out << "# gnuplot script: substrate envelope S1_upper(t) for every route\n";
    out << "set datafile separator ','\n";
    out << "set xlabel 'time [days]'\n";
    out << "set ylabel 'S1 upper envelope [g/l]'\n";
    out << "set key left top\n";
    out << "plot ";
    bool first = true;
    for (const auto* rt : s1_routes) {
        if (!first) out << ", \\\n     ";
        out << "'" << rt->csv_file << "' using 1:2 with lines title '"
            << to_string(rt->label) << "'";
        first = false;
    }
    out << "\n";
}

}  // namespace

int run(const Scenario& scenario, const RunOptions& opt, RunReport* report_out) {
    RunReport rep;
    rep.tol_cross = opt.tol_cross;
    rep.compare_requested = opt.compare;
    rep.scenario_json = write_scenario(scenario);
    rep.placeholder_params = placeholders_used(scenario);

    std::vector<RouteLabel> routes = opt.routes;
    if (routes.empty()) {
        for (const auto& name : scenario.routes) {
            const auto r = route_from_string(name);
            if (!r)
                throw std::invalid_argument("unknown route '" + name + "'");
            routes.push_back(*r);
        }
    }
    if (routes.empty())
        throw std::invalid_argument("no routes requested");
    // each requested route appears exactly once, first occurrence wins
    {
        std::vector<RouteLabel> unique;
        for (RouteLabel r : routes) {
            bool seen = false;
            for (RouteLabel u : unique) seen = seen || (u == r);
            if (!seen) unique.push_back(r);
        }
        routes = std::move(unique);
    }

    fs::create_directories(opt.out_dir);

    const std::size_t n_grid = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(scenario.t_end / scenario.output_step)) + 1);
    std::vector<double> grid(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i)
        grid[i] = std::min(scenario.t_end,
                           static_cast<double>(i) * scenario.output_step);
    grid.back() = scenario.t_end;

    bool any_failed = false;
    for (RouteLabel label : routes) {
        RouteResult rr = run_route(label, scenario, opt, grid);
        if (rr.ok) {
            std::vector<std::string> cols;
            if (label == RouteLabel::full_system)
                cols = {"X1", "X2", "S1", "S2", "A", "C", "F_M"};
            else if (label == RouteLabel::subsystem)
                cols = {"X1", "S1"};
            else
                cols = {"S1_upper"};
            rr.csv_file = std::string(to_string(label)) + ".csv";
            write_csv((fs::path(opt.out_dir) / rr.csv_file).string(), rr.series,
                      cols);
        } else {
            any_failed = true;
        }
        rep.routes.push_back(std::move(rr));
    }

    // Sign audit record: the transform identity sampled deterministically.
    {
        rep.sign_audit.active_convention =
            opt.paper_literal_signs ? "paper-literal" : "audited";
        try {
            const AbelConstants k = derive_constants(
                scenario.params, scenario.initial_state.X1, scenario.gamma,
                scenario.integration_constants.value_or(IntegrationConstants{}));
            rep.sign_audit.b1_legacy = k.b1;
            rep.sign_audit.b1_audited = k.b1_audited;
            const EnvelopePair env = make_envelopes(
                scenario.initial_state.X1, scenario.gamma, scenario.params);
            SplitMix rng{0x5eed5eedULL};
            double worst = 0;
            for (int i = 0; i < 32; ++i) {
                const double t = rng.next() * scenario.t_end;
                const double S = 0.1 + rng.next() * 30.0;
                const double V = substrate_to_V(S, scenario.params.K_S1);
                const double lhs =
                    abel_rhs_time(t, V, k, SignConvention::audited);
                const double rhs =
                    -V * V * rhs_upper_S1(t, S, env, scenario.params);
                worst = std::max(worst, std::abs(lhs - rhs) /
                                            std::max(1e-30, std::abs(rhs)));
            }
            rep.sign_audit.transform_identity_max_rel = worst;
        } catch (const std::exception&) {
            // m == 0 scenarios have no algebrization; leave zeros
        }
    }

    // Informational lower/upper check over the output window.
    bool has_upper = false;
    for (RouteLabel r : routes)
        if (r == RouteLabel::upper_ode) has_upper = true;
    if (has_upper) rep.def2 = run_def2_check(scenario, grid);

    // Cross-route comparison over the S1_upper-producing routes.
    if (opt.compare) {
        std::vector<const RouteResult*> cands;
        for (const auto& rr : rep.routes)
            if (rr.ok && produces_s1_upper(rr.label)) cands.push_back(&rr);
        if (cands.size() >= 2) {
            // common grid: 512 uniform points over the intersection of
            // route domains
            double lo = 0, hi = scenario.t_end;
            for (const auto* rr : cands) {
                lo = std::max(lo, rr->series.grid.front());
                hi = std::min(hi, rr->series.grid.back());
            }
            if (!(hi > lo))
                throw std::invalid_argument(
                    "compare: empty domain intersection between routes");
            const auto cgrid = uniform_grid(lo, hi, 512);
            std::vector<SolutionSeries> resampled(cands.size());
            std::vector<const SolutionSeries*> ptrs;
            std::vector<RouteLabel> labels;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                RouteResult rr = run_route(cands[i]->label, scenario, opt, cgrid);
                if (!rr.ok)
                    throw std::runtime_error(
                        "compare: route failed on the common grid: " + rr.error);
                resampled[i] = std::move(rr.series);
                ptrs.push_back(&resampled[i]);
                labels.push_back(cands[i]->label);
            }
            rep.deviations = compare_routes(ptrs, cgrid, labels);
            for (const auto& d : rep.deviations)
                if (!(d.max_abs <= opt.tol_cross)) rep.compare_ok = false;
        }
    }

    rep.exit_code = exit_ok;
    if (any_failed)
        rep.exit_code = exit_route_failed;
    else if (opt.compare && !rep.compare_ok)
        rep.exit_code = exit_tolerance_exceeded;

    // Artifacts.
    const std::string stamp = now_iso8601();
    {
        std::ofstream t((fs::path(opt.out_dir) / "report.txt").string(),
                        std::ios::binary);
        t << format_report_text(rep, stamp);
        std::ofstream js((fs::path(opt.out_dir) / "report.json").string(),
                         std::ios::binary);
        js << format_report_json(rep, stamp) << "\n";
        std::vector<const RouteResult*> s1_routes;
        for (const auto& rr : rep.routes)
            if (rr.ok && produces_s1_upper(rr.label)) s1_routes.push_back(&rr);
        if (!s1_routes.empty())
            write_plot_script((fs::path(opt.out_dir) / "plot.gp").string(),
                              s1_routes);
    }

    const int code = rep.exit_code;
    if (report_out) *report_out = std::move(rep);
    return code;
}

}  // namespace abelgas
