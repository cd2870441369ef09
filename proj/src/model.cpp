#include "abelgas/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace abelgas {

using nlohmann::json;

ModelParams default_params() { return ModelParams{}; }

const std::vector<std::string>& placeholder_param_names() {
    static const std::vector<std::string> names = {
        "mu2max", "k_s2", "k_i2", "s2in", "a_in", "c_in", "k_la", "b",
        "k2",     "k3",   "k4",   "k5",   "k6"};
    return names;
}

const std::vector<Table1Row>& table1_metadata() {
    // SD column stored as given; blanks stay unset. The source gives no
    // units for k1; stored as-is without guessing.
    static const std::vector<Table1Row> rows = {
        {"alpha", 0.5, "", 0.4},
        {"d", 0.395, "1/d", 0.135},
        {"s1in", 10.0, "g/l", 6.4},
        {"k_s1", 12.1, "g/l", 20.62},
        {"mu1max", 1.2, "1/d", std::nullopt},
        {"k1", 23.2, "", std::nullopt},
    };
    return rows;
}

bool all_finite(const AdState& s) {
    return std::isfinite(s.X1) && std::isfinite(s.X2) && std::isfinite(s.S1) &&
           std::isfinite(s.S2) && std::isfinite(s.A) && std::isfinite(s.C) &&
           std::isfinite(s.F_M);
}

bool is_physical(const AdState& s, double tol) {
    return all_finite(s) && s.X1 >= -tol && s.X2 >= -tol && s.S1 >= -tol &&
           s.S2 >= -tol && s.A >= -tol && s.C >= -tol && s.F_M >= -tol;
}

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("parameter '") + name +
                                    "' must be strictly positive");
}

struct ParamField {
    const char* key;
    double ModelParams::*member;
};

// snake_case file keys for every parameter.
const ParamField kParamFields[] = {
    {"mu1max", &ModelParams::mu1max}, {"mu2max", &ModelParams::mu2max},
    {"k_s1", &ModelParams::K_S1},     {"k_s2", &ModelParams::K_S2},
    {"k_i2", &ModelParams::K_I2},     {"d", &ModelParams::D},
    {"alpha", &ModelParams::alpha},   {"s1in", &ModelParams::S1in},
    {"s2in", &ModelParams::S2in},     {"a_in", &ModelParams::A_in},
    {"c_in", &ModelParams::C_in},     {"k_la", &ModelParams::K_La},
    {"b", &ModelParams::B},           {"k1", &ModelParams::k1},
    {"k2", &ModelParams::k2},         {"k3", &ModelParams::k3},
    {"k4", &ModelParams::k4},         {"k5", &ModelParams::k5},
    {"k6", &ModelParams::k6},
};

struct StateField {
    const char* key;
    double AdState::*member;
};

const StateField kStateFields[] = {
    {"X1", &AdState::X1}, {"X2", &AdState::X2}, {"S1", &AdState::S1},
    {"S2", &AdState::S2}, {"A", &AdState::A},   {"C", &AdState::C},
    {"F_M", &AdState::F_M},
};

struct ConstField {
    const char* key;
    double IntegrationConstants::*member;
};

const ConstField kConstFields[] = {
    {"C", &IntegrationConstants::C},   {"C0", &IntegrationConstants::C0},
    {"C1", &IntegrationConstants::C1}, {"C2", &IntegrationConstants::C2},
    {"C3", &IntegrationConstants::C3},
};

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const char* where) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw std::invalid_argument(std::string("unknown key '") +
                                        item.key() + "' in " + where);
    }
}

double get_number(const json& j, const std::string& key, const char* where) {
    if (!j.at(key).is_number())
        throw std::invalid_argument("key '" + key + "' in " + where +
                                    " must be a number");
    return j.at(key).get<double>();
}

}  // namespace

void validate(const ModelParams& p) {
    require_positive(p.mu1max, "mu1max");
    require_positive(p.mu2max, "mu2max");
    require_positive(p.K_S1, "k_s1");
    require_positive(p.K_S2, "k_s2");
    require_positive(p.K_I2, "k_i2");
    require_positive(p.D, "d");
    require_positive(p.S1in, "s1in");
    require_positive(p.S2in, "s2in");
    require_positive(p.A_in, "a_in");
    require_positive(p.C_in, "c_in");
    require_positive(p.K_La, "k_la");
    require_positive(p.B, "b");
    require_positive(p.k1, "k1");
    require_positive(p.k2, "k2");
    require_positive(p.k3, "k3");
    require_positive(p.k4, "k4");
    require_positive(p.k5, "k5");
    require_positive(p.k6, "k6");
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
        throw std::invalid_argument(
            "parameter 'alpha' must lie in [0, 1]");
}

void validate(const Scenario& s) {
    validate(s.params);
    if (!all_finite(s.initial_state))
        throw std::invalid_argument("field 'initial_state' must be finite");
    if (!(s.gamma > 0))
        throw std::invalid_argument("field 'gamma' must be > 0");
    if (!(s.t_end > 0))
        throw std::invalid_argument("field 't_end' must be > 0");
    if (!(s.output_step > 0))
        throw std::invalid_argument("field 'output_step' must be > 0");
    if (s.output_step > s.t_end)
        throw std::invalid_argument("field 'output_step' must be <= t_end");
    if (s.integration_constants && s.integration_constants->C1 == 0.0)
        throw std::invalid_argument("constant 'C1' must be nonzero");
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario parse error: ") +
                                 e.what());
    }

    reject_unknown_keys(j,
                        {"params", "initial_state", "gamma", "t_end",
                         "output_step", "integration_constants", "routes"},
                        "scenario");

    Scenario s;
    if (j.contains("params")) {
        const json& jp = j["params"];
        std::set<std::string> allowed;
        for (const auto& f : kParamFields) allowed.insert(f.key);
        reject_unknown_keys(jp, allowed, "params");
        for (const auto& f : kParamFields) {
            if (jp.contains(f.key)) {
                s.params.*(f.member) = get_number(jp, f.key, "params");
                s.provided_param_keys.push_back(f.key);
            }
        }
    }
    if (j.contains("initial_state")) {
        const json& js = j["initial_state"];
        std::set<std::string> allowed;
        for (const auto& f : kStateFields) allowed.insert(f.key);
        reject_unknown_keys(js, allowed, "initial_state");
        for (const auto& f : kStateFields)
            if (js.contains(f.key))
                s.initial_state.*(f.member) = get_number(js, f.key, "initial_state");
    }
    if (j.contains("gamma")) s.gamma = get_number(j, "gamma", "scenario");
    if (j.contains("t_end")) s.t_end = get_number(j, "t_end", "scenario");
    if (j.contains("output_step"))
        s.output_step = get_number(j, "output_step", "scenario");
    if (j.contains("integration_constants")) {
        const json& jc = j["integration_constants"];
        std::set<std::string> allowed;
        for (const auto& f : kConstFields) allowed.insert(f.key);
        reject_unknown_keys(jc, allowed, "integration_constants");
        IntegrationConstants ic;
        for (const auto& f : kConstFields)
            if (jc.contains(f.key))
                ic.*(f.member) = get_number(jc, f.key, "integration_constants");
        s.integration_constants = ic;
    }
    if (j.contains("routes")) {
        if (!j["routes"].is_array())
            throw std::invalid_argument("key 'routes' must be an array of strings");
        for (const auto& r : j["routes"]) {
            if (!r.is_string())
                throw std::invalid_argument("key 'routes' must be an array of strings");
            s.routes.push_back(r.get<std::string>());
        }
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string write_scenario(const Scenario& s) {
    json j;
    json jp;
    for (const auto& f : kParamFields) jp[f.key] = s.params.*(f.member);
    j["params"] = jp;
    json js;
    for (const auto& f : kStateFields) js[f.key] = s.initial_state.*(f.member);
    j["initial_state"] = js;
    j["gamma"] = s.gamma;
    j["t_end"] = s.t_end;
    j["output_step"] = s.output_step;
    if (s.integration_constants) {
        json jc;
        for (const auto& f : kConstFields)
            jc[f.key] = (*s.integration_constants).*(f.member);
        j["integration_constants"] = jc;
    }
    j["routes"] = s.routes;
    return j.dump(2);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write scenario file: " + path);
    out << write_scenario(s) << "\n";
}

std::vector<std::string> placeholders_used(const Scenario& s) {
    std::vector<std::string> out;
    for (const auto& name : placeholder_param_names()) {
        bool provided = false;
        for (const auto& k : s.provided_param_keys)
            if (k == name) { provided = true; break; }
        if (!provided) out.push_back(name);
    }
    return out;
}

}  // namespace abelgas
