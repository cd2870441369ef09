#ifndef ABELGAS_MODEL_HPP
#define ABELGAS_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

namespace abelgas {

// Rate/yield/inflow constants of the two-stage digestion model.
// Units are documentation-level only (see table1_metadata); nothing is
// dimensionally checked.
struct ModelParams {
    double mu1max = 1.2;   // 1/day, acidogenesis max growth rate
    double mu2max = 1.0;   // 1/day (placeholder)
    double K_S1 = 12.1;    // g/l, half-saturation of the acidogenic stage
    double K_S2 = 1.0;     // mmol/l (placeholder)
    double K_I2 = 1.0;     // mmol/l, inhibition constant (placeholder)
    double D = 0.395;      // 1/day, dilution rate
    double alpha = 0.5;    // reactor heterogeneity, 0 = fixed bed, 1 = CSTR
    double S1in = 10.0;    // g/l
    double S2in = 5.0;     // mmol/l (placeholder)
    double A_in = 50.0;    // mmol/l (placeholder)
    double C_in = 50.0;    // mmol/l (placeholder)
    double K_La = 1.0;     // 1/day, gas transfer rate (placeholder)
    double B = 50.0;       // mmol/l, K_H * P_C (placeholder)
    double k1 = 23.2;      // yield coefficients
    double k2 = 1.0;       // (placeholder)
    double k3 = 1.0;       // (placeholder)
    double k4 = 1.0;       // (placeholder)
    double k5 = 1.0;       // (placeholder)
    double k6 = 1.0;       // (placeholder)

    bool operator==(const ModelParams&) const = default;
};

// The seven state components, per-day dynamics.
struct AdState {
    double X1 = 0;   // g/l, acidogenic biomass
    double X2 = 0;   // g/l, methanogenic biomass
    double S1 = 0;   // g/l, organic substrate
    double S2 = 0;   // mmol/l, volatile fatty acids
    double A = 0;    // mmol/l, alkalinity
    double C = 0;    // mmol/l, total inorganic carbon
    double F_M = 0;  // mmol/l/day, methane production

    bool operator==(const AdState&) const = default;
};

bool all_finite(const AdState& s);
// Componentwise >= -tol. A checkable predicate, not a construction
// constraint: envelope trajectories may legitimately leave the cone.
bool is_physical(const AdState& s, double tol = 0.0);

// Free constants of the closed-form solution families.
struct IntegrationConstants {
    double C = 0.0;
    double C0 = 0.0;
    double C1 = 1.0;  // must be nonzero; > 0 where ln(C1) is evaluated
    double C2 = 0.0;
    double C3 = 0.0;

    bool operator==(const IntegrationConstants&) const = default;
};

struct Scenario {
    ModelParams params;
    AdState initial_state;
    double gamma = 1.0;        // envelope margin, > 0
    double t_end = 10.0;       // days
    double output_step = 0.05; // days
    std::optional<IntegrationConstants> integration_constants;
    std::vector<std::string> routes;

    // Bookkeeping (not part of value identity): which parameter keys the
    // source document provided explicitly.
    std::vector<std::string> provided_param_keys;

    // Value identity over the scenario fields; the bookkeeping member does
    // not participate.
    bool operator==(const Scenario& o) const {
        return params == o.params && initial_state == o.initial_state &&
               gamma == o.gamma && t_end == o.t_end &&
               output_step == o.output_step &&
               integration_constants == o.integration_constants &&
               routes == o.routes;
    }
};

// Calibrated defaults where available, flagged placeholders elsewhere.
ModelParams default_params();

// Parameter names whose defaults are placeholders rather than calibrated
// values; run reports must flag any of these that a scenario leaves at
// default.
const std::vector<std::string>& placeholder_param_names();

struct Table1Row {
    std::string name;
    double value;
    std::string units;         // empty when the source leaves it blank
    std::optional<double> sd;  // stored as metadata, never used in computation
};
const std::vector<Table1Row>& table1_metadata();

// Throws std::invalid_argument naming the offending field.
void validate(const ModelParams& p);
void validate(const Scenario& s);

// Scenario file I/O. JSON with keys: params, initial_state, gamma, t_end,
// output_step, integration_constants, routes. Unknown keys are an error.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
std::string write_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

// Names of placeholder-valued parameters the given scenario actually relies
// on (i.e. not provided explicitly by its file).
std::vector<std::string> placeholders_used(const Scenario& s);

}  // namespace abelgas

#endif
