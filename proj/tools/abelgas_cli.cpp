// abelgas command line: run a scenario through the requested solution routes,
// write CSV series, a verification report and a plot script.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abelgas/model.hpp"
#include "abelgas/run.hpp"

namespace fs = std::filesystem;

namespace {

std::string resolve_scenario_path(const std::string& given) {
    if (fs::exists(given)) return given;
    if (const char* seed = std::getenv("ABELGAS_SEED_DIR")) {
        const fs::path alt = fs::path(seed) / given;
        if (fs::exists(alt)) return alt.string();
    }
    return given;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anaerobic digestion / Abel equation solution toolkit"};
    app.name("abelgas");

    std::string scenario_path, out_dir;
    std::string routes_csv;
    bool compare = false;
    bool paper_literal = false;
    double tol_cross = 1e-6;

    app.add_option("scenario", scenario_path, "scenario JSON file")->required();
    app.add_option("outdir", out_dir, "output directory")->required();
    app.add_option("--routes", routes_csv,
                   "comma-separated route list (default: the scenario's)");
    app.add_flag("--compare", compare,
                 "cross-compare the substrate envelope across routes");
    app.add_option("--tol-cross", tol_cross,
                   "max-abs tolerance for --compare (default 1e-6)");
    app.add_flag("--paper-literal-signs", paper_literal,
                 "evaluate the legacy sign convention of the cubic "
                 "coefficients and closed forms");

    CLI11_PARSE(app, argc, argv);

    abelgas::Scenario scenario;
    try {
        scenario = abelgas::load_scenario(resolve_scenario_path(scenario_path));
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return abelgas::exit_invalid_scenario;
    }

    abelgas::RunOptions opt;
    opt.compare = compare;
    opt.tol_cross = tol_cross;
    opt.paper_literal_signs = paper_literal;
    opt.out_dir = out_dir;
    if (!routes_csv.empty()) {
        std::string cur;
        for (char ch : routes_csv + ",") {
            if (ch == ',') {
                if (!cur.empty()) {
                    const auto r = abelgas::route_from_string(cur);
                    if (!r) {
                        std::cerr << "scenario error: unknown route '" << cur
                                  << "'\n";
                        return abelgas::exit_invalid_scenario;
                    }
                    opt.routes.push_back(*r);
                    cur.clear();
                }
            } else {
                cur += ch;
            }
        }
    }

    abelgas::RunReport report;
    int code;
    try {
        code = abelgas::run(scenario, opt, &report);
    } catch (const std::exception& e) {
        std::cerr << "run error: " << e.what() << "\n";
        return abelgas::exit_invalid_scenario;
    }

    for (const auto& rt : report.routes) {
        if (rt.ok)
            std::cout << abelgas::to_string(rt.label) << ": ok ("
                      << rt.series.grid.size() << " points)\n";
        else
            std::cout << abelgas::to_string(rt.label) << ": FAILED: " << rt.error
                      << "\n";
    }
    if (report.compare_requested) {
        for (const auto& d : report.deviations)
            std::cout << abelgas::to_string(d.a) << " vs "
                      << abelgas::to_string(d.b) << ": max-abs " << d.max_abs
                      << (d.max_abs <= report.tol_cross ? " [ok]"
                                                        : " [EXCEEDED]")
                      << "\n";
    }
    std::cout << "report: " << (fs::path(out_dir) / "report.txt").string()
              << " (exit " << code << ")\n";
    return code;
}
