// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/ao_driver.hpp"
#include "faa/common.hpp"
#include "faa/harness/units.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace faa {

enum class SweepAxis { Pmax_dBm, N, M, kappa, xi, none };

inline std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::Pmax_dBm: return "Pmax_dBm";
    case SweepAxis::N: return "N";
    case SweepAxis::M: return "M";
    case SweepAxis::kappa: return "kappa";
    case SweepAxis::xi: return "xi";
    case SweepAxis::none: return "none";
    }
    return "?";
}

inline std::optional<SweepAxis> parse_axis(std::string_view name) {
    for (auto a : {SweepAxis::Pmax_dBm, SweepAxis::N, SweepAxis::M, SweepAxis::kappa, SweepAxis::xi, SweepAxis::none})
        if (to_string(a) == name) return a;
    return std::nullopt;
}

// Invalid configuration; the message names the offending field.
class ConfigError : public DomainError {
  public:
    using DomainError::DomainError;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::none;
    std::vector<double> values;
};

// Defaults reproduce the reference parameter set. Powers are given in dBm/dB
// and converted once, at load time.
struct ExperimentConfig {
    double lambda_m = 0.0107;
    int n_h = 3;
    int n_v = 3;
    std::optional<double> d_m; // defaults to lambda / 2
    double p_max_dbm = 0.0;
    double sigma2_dbm = -92.0;
    int num_paths = 10;
    bool omni = false;
    double kappa = 4.0;
    double g0_db = -40.0;
    double alpha_pl = 2.8;
    double d_bob_m = 50.0;
    double d_eve_m = 80.0;
    double xi = 0.0;
    int m_eves = 1;
    int n_mc = 1000;
    std::uint64_t base_seed = 1;
    AoOptions ao;
    PgaOptions pga;
    SweepSpec sweep;
    std::vector<Scheme> schemes{Scheme::Joint};
    std::vector<DeformationModel> models{DeformationModel::Rotate};

    double spacing_m() const { return d_m.value_or(lambda_m / 2.0); }
    double p_max_w() const { return units::dbm_to_watts(p_max_dbm); }
    double sigma2_w() const { return units::dbm_to_watts(sigma2_dbm); }
    double g0_linear() const { return units::db_to_linear(g0_db); }

    // Sweep values, or a single placeholder 0 when there is no sweep axis.
    std::vector<double> axis_values() const {
        if (sweep.axis == SweepAxis::none) return {0.0};
        return sweep.values;
    }

    // Copy with one sweep value applied.
    ExperimentConfig at(double value) const {
        ExperimentConfig c = *this;
        switch (sweep.axis) {
        case SweepAxis::Pmax_dBm: c.p_max_dbm = value; break;
        case SweepAxis::N: {
            const int side = static_cast<int>(std::lround(std::sqrt(value)));
            c.n_h = side;
            c.n_v = side;
            break;
        }
        case SweepAxis::M: c.m_eves = static_cast<int>(std::lround(value)); break;
        case SweepAxis::kappa: c.kappa = value; break;
        case SweepAxis::xi: c.xi = value; break;
        case SweepAxis::none: break;
        }
        return c;
    }

    void validate() const {
        auto require = [](bool ok, const char *msg) {
            if (!ok) throw ConfigError(msg);
        };
        require(lambda_m > 0.0 && std::isfinite(lambda_m), "lambda_m: must be > 0");
        require(n_h >= 1, "N_h: must be >= 1");
        require(n_v >= 1, "N_v: must be >= 1");
        require(spacing_m() > 0.0 && std::isfinite(spacing_m()), "d_m: must be > 0");
        require(std::isfinite(p_max_dbm), "P_max_dBm: must be finite");
        require(std::isfinite(sigma2_dbm), "sigma2_dBm: must be finite");
        require(num_paths >= 1, "L: must be >= 1");
        require(kappa >= 0.0 && std::isfinite(kappa), "kappa: must be >= 0");
        require(std::isfinite(g0_db), "g0_dB: must be finite");
        require(alpha_pl > 0.0 && std::isfinite(alpha_pl), "alpha_pl: must be > 0");
        require(d_bob_m > 0.0, "d_Bob_m: must be > 0");
        require(d_eve_m > 0.0, "d_Eve_m: must be > 0");
        require(xi >= 0.0 && xi <= 1.0, "xi: must lie in [0, 1]");
        require(m_eves >= 1, "M: must be >= 1");
        require(n_mc >= 1, "N_MC: must be >= 1");
        require(ao.k_ao >= 1, "K_AO: must be >= 1");
        require(ao.eps_ao > 0.0, "eps_AO: must be > 0");
        require(ao.max_extrapolations >= 0, "AO_extrapolations: must be >= 0");
        require(!schemes.empty(), "schemes: must not be empty");
        require(!models.empty(), "models: must not be empty");
        try {
            pga.validate();
        } catch (const DomainError &e) {
            throw ConfigError(std::string("pga: ") + e.what());
        }
        if (sweep.axis != SweepAxis::none) {
            require(!sweep.values.empty(), "sweep.values: must not be empty");
            for (double v : sweep.values) {
                require(std::isfinite(v), "sweep.values: must be finite");
                switch (sweep.axis) {
                case SweepAxis::N: {
                    const double side = std::round(std::sqrt(v));
                    require(v >= 1.0 && side * side == v, "sweep.values: N must be a perfect square (N_h = N_v)");
                    break;
                }
                case SweepAxis::M: require(v >= 1.0 && v == std::round(v), "sweep.values: M must be an integer >= 1"); break;
                case SweepAxis::kappa: require(v >= 0.0, "sweep.values: kappa must be >= 0"); break;
                case SweepAxis::xi: require(v >= 0.0 && v <= 1.0, "sweep.values: xi must lie in [0, 1]"); break;
                default: break;
                }
            }
        }
    }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json &obj, const std::set<std::string> &known, const std::string &where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) throw ConfigError(where + it.key() + ": unknown key");
}

template <class T>
void read_field(const json &obj, const char *key, T &out, const std::string &where = "") {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError(where + key + ": wrong type");
    }
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json &root) {
    using detail::read_field;
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    detail::reject_unknown(root,
                           {"lambda_m", "N_h", "N_v", "d_m", "P_max_dBm", "sigma2_dBm", "L", "pattern", "kappa", "g0_dB",
                            "alpha_pl", "d_Bob_m", "d_Eve_m", "xi", "M", "N_MC", "base_seed", "K_AO", "eps_AO",
                            "AO_extrapolations", "pga", "sweep", "schemes", "models"},
                           "");
    ExperimentConfig c;
    read_field(root, "lambda_m", c.lambda_m);
    read_field(root, "N_h", c.n_h);
    read_field(root, "N_v", c.n_v);
    if (root.contains("d_m")) {
        double d = 0.0;
        read_field(root, "d_m", d);
        c.d_m = d;
    }
    read_field(root, "P_max_dBm", c.p_max_dbm);
    read_field(root, "sigma2_dBm", c.sigma2_dbm);
    read_field(root, "L", c.num_paths);
    if (root.contains("pattern")) {
        std::string p;
        read_field(root, "pattern", p);
        if (p == "omni") c.omni = true;
        else if (p == "directional") c.omni = false;
        else throw ConfigError("pattern: expected \"omni\" or \"directional\"");
    }
    read_field(root, "kappa", c.kappa);
    read_field(root, "g0_dB", c.g0_db);
    read_field(root, "alpha_pl", c.alpha_pl);
    read_field(root, "d_Bob_m", c.d_bob_m);
    read_field(root, "d_Eve_m", c.d_eve_m);
    read_field(root, "xi", c.xi);
    read_field(root, "M", c.m_eves);
    read_field(root, "N_MC", c.n_mc);
    read_field(root, "base_seed", c.base_seed);
    read_field(root, "K_AO", c.ao.k_ao);
    read_field(root, "eps_AO", c.ao.eps_ao);
    read_field(root, "AO_extrapolations", c.ao.max_extrapolations);

    if (root.contains("pga")) {
        const auto &p = root.at("pga");
        if (!p.is_object()) throw ConfigError("pga: must be an object");
        detail::reject_unknown(p, {"learning_rate", "beta1", "beta2", "max_iter", "tol_psi_deg", "n_starts", "grad_cap", "step_rule"},
                               "pga.");
        read_field(p, "learning_rate", c.pga.learning_rate, "pga.");
        read_field(p, "beta1", c.pga.beta1, "pga.");
        read_field(p, "beta2", c.pga.beta2, "pga.");
        read_field(p, "max_iter", c.pga.max_iter, "pga.");
        read_field(p, "n_starts", c.pga.n_starts, "pga.");
        read_field(p, "grad_cap", c.pga.grad_cap, "pga.");
        if (p.contains("tol_psi_deg")) {
            double deg = 0.0;
            read_field(p, "tol_psi_deg", deg, "pga.");
            c.pga.tol_psi_rad = deg_to_rad(deg);
        }
        if (p.contains("step_rule")) {
            std::string rule;
            read_field(p, "step_rule", rule, "pga.");
            if (rule == "Adam") c.pga.rule = StepRule::Adam;
            else if (rule == "AdaGrad") c.pga.rule = StepRule::AdaGrad;
            else throw ConfigError("pga.step_rule: expected \"Adam\" or \"AdaGrad\"");
        }
    }

    if (root.contains("sweep")) {
        const auto &s = root.at("sweep");
        if (!s.is_object()) throw ConfigError("sweep: must be an object");
        detail::reject_unknown(s, {"axis", "values"}, "sweep.");
        std::string axis = "none";
        read_field(s, "axis", axis, "sweep.");
        const auto parsed = parse_axis(axis);
        if (!parsed) throw ConfigError("sweep.axis: expected one of Pmax_dBm, N, M, kappa, xi, none");
        c.sweep.axis = *parsed;
        read_field(s, "values", c.sweep.values, "sweep.");
    }

    if (root.contains("schemes")) {
        std::vector<std::string> names;
        read_field(root, "schemes", names);
        c.schemes.clear();
        for (const auto &n : names) {
            const auto s = parse_scheme(n);
            if (!s) throw ConfigError("schemes: unknown scheme \"" + n + "\"");
            c.schemes.push_back(*s);
        }
    }
    if (root.contains("models")) {
        std::vector<std::string> names;
        read_field(root, "models", names);
        c.models.clear();
        for (const auto &n : names) {
            const auto m = parse_model(n);
            if (!m) throw ConfigError("models: unknown model \"" + n + "\"");
            c.models.push_back(*m);
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig parse_config_text(const std::string &text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(root);
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace faa
