#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlf/initial_conditions.hpp"
#include "mlf/materials.hpp"

namespace mlf {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full run configuration. Every key has a default; unknown keys are
/// rejected with their JSON path.
struct Config {
    struct Mesh {
        int n_plane = 4;
        int nz_b = 4;
        int nz_f = 4;
        int ns_p = 2;
        double h_p = 0.2;
    } mesh;

    MaterialParams params;

    struct Run {
        double dt = 0.01;
        int steps = 100;
        bool nonlinear = false;
        double picard_tol = 1e-10;
        int picard_max_iter = 50;
    } run;

    IcSpec ic;

    struct Output {
        std::string directory = "out";
        int snapshot_stride = 0;  // 0 = no snapshots
        std::vector<std::string> formats = {"csv"};
    } output;

    void validate() const {
        if (mesh.n_plane < 1 || mesh.nz_b < 1 || mesh.nz_f < 1 || mesh.ns_p < 1)
            throw ConfigError("mesh: cell counts must be >= 1");
        if (!(mesh.h_p > 0)) throw ConfigError("mesh.h_p: must be strictly positive");
        try {
            params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("params.") + e.what());
        }
        if (!(run.dt > 0)) throw ConfigError("run.dt: must be strictly positive");
        if (run.steps < 1) throw ConfigError("run.steps: must be >= 1");
        if (!(run.picard_tol > 0)) throw ConfigError("run.picard_tol: must be strictly positive");
        if (run.picard_max_iter < 1) throw ConfigError("run.picard_max_iter: must be >= 1");
        if (ic.catalog != "zero" && ic.catalog != "random" && ic.catalog != "fourier")
            throw ConfigError("ic.catalog: expected zero, random or fourier, got '" + ic.catalog +
                              "'");
        if (output.snapshot_stride < 0)
            throw ConfigError("output.snapshot_stride: must be >= 0");
        for (const auto& f : output.formats)
            if (f != "csv" && f != "vtk")
                throw ConfigError("output.formats: unknown format '" + f + "'");
    }
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& path) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError("unknown key '" + path + "/" + key + "' in configuration");
}

template <typename T>
void get_to_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace detail

inline Config parse_config_json(const json& j) {
    Config c;
    detail::reject_unknown(j, {"mesh", "params", "run", "ic", "output"}, "");

    if (j.contains("mesh")) {
        const json& m = j.at("mesh");
        detail::reject_unknown(m, {"n_plane", "nz_b", "nz_f", "ns_p", "h_p"}, "mesh");
        detail::get_to_if(m, "n_plane", c.mesh.n_plane);
        detail::get_to_if(m, "nz_b", c.mesh.nz_b);
        detail::get_to_if(m, "nz_f", c.mesh.nz_f);
        detail::get_to_if(m, "ns_p", c.mesh.ns_p);
        detail::get_to_if(m, "h_p", c.mesh.h_p);
    }
    if (j.contains("params")) {
        const json& p = j.at("params");
        detail::reject_unknown(p,
                               {"lambda_b", "mu_b", "rho_b", "alpha_b", "c_b", "k_b", "d_plate",
                                "gamma", "rho_p", "alpha_p", "c_p", "k_p", "rho_f", "mu_f",
                                "beta_bjs"},
                               "params");
        detail::get_to_if(p, "lambda_b", c.params.lambda_b);
        detail::get_to_if(p, "mu_b", c.params.mu_b);
        detail::get_to_if(p, "rho_b", c.params.rho_b);
        detail::get_to_if(p, "alpha_b", c.params.alpha_b);
        detail::get_to_if(p, "c_b", c.params.c_b);
        detail::get_to_if(p, "k_b", c.params.k_b);
        detail::get_to_if(p, "d_plate", c.params.d_plate);
        detail::get_to_if(p, "gamma", c.params.gamma);
        detail::get_to_if(p, "rho_p", c.params.rho_p);
        detail::get_to_if(p, "alpha_p", c.params.alpha_p);
        detail::get_to_if(p, "c_p", c.params.c_p);
        detail::get_to_if(p, "k_p", c.params.k_p);
        detail::get_to_if(p, "rho_f", c.params.rho_f);
        detail::get_to_if(p, "mu_f", c.params.mu_f);
        detail::get_to_if(p, "beta_bjs", c.params.beta_bjs);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        detail::reject_unknown(r, {"dt", "steps", "nonlinear", "picard_tol", "picard_max_iter"},
                               "run");
        detail::get_to_if(r, "dt", c.run.dt);
        detail::get_to_if(r, "steps", c.run.steps);
        detail::get_to_if(r, "nonlinear", c.run.nonlinear);
        detail::get_to_if(r, "picard_tol", c.run.picard_tol);
        detail::get_to_if(r, "picard_max_iter", c.run.picard_max_iter);
    }
    if (j.contains("ic")) {
        const json& i = j.at("ic");
        detail::reject_unknown(i,
                               {"catalog", "seed", "amplitude", "kx", "ky", "amp_eta", "amp_zeta",
                                "amp_pb", "amp_w", "amp_v", "amp_pp", "amp_u"},
                               "ic");
        detail::get_to_if(i, "catalog", c.ic.catalog);
        detail::get_to_if(i, "seed", c.ic.seed);
        detail::get_to_if(i, "amplitude", c.ic.amplitude);
        detail::get_to_if(i, "kx", c.ic.kx);
        detail::get_to_if(i, "ky", c.ic.ky);
        detail::get_to_if(i, "amp_eta", c.ic.amp_eta);
        detail::get_to_if(i, "amp_zeta", c.ic.amp_zeta);
        detail::get_to_if(i, "amp_pb", c.ic.amp_pb);
        detail::get_to_if(i, "amp_w", c.ic.amp_w);
        detail::get_to_if(i, "amp_v", c.ic.amp_v);
        detail::get_to_if(i, "amp_pp", c.ic.amp_pp);
        detail::get_to_if(i, "amp_u", c.ic.amp_u);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        detail::reject_unknown(o, {"directory", "snapshot_stride", "formats"}, "output");
        detail::get_to_if(o, "directory", c.output.directory);
        detail::get_to_if(o, "snapshot_stride", c.output.snapshot_stride);
        detail::get_to_if(o, "formats", c.output.formats);
    }
    c.validate();
    return c;
}

inline Config parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration root must be a JSON object");
    return parse_config_json(j);
}

inline Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline json serialize_config(const Config& c) {
    json j;
    j["mesh"] = {{"n_plane", c.mesh.n_plane}, {"nz_b", c.mesh.nz_b},  {"nz_f", c.mesh.nz_f},
                 {"ns_p", c.mesh.ns_p},       {"h_p", c.mesh.h_p}};
    j["params"] = {{"lambda_b", c.params.lambda_b},
                   {"mu_b", c.params.mu_b},
                   {"rho_b", c.params.rho_b},
                   {"alpha_b", c.params.alpha_b},
                   {"c_b", c.params.c_b},
                   {"k_b", c.params.k_b},
                   {"d_plate", c.params.d_plate},
                   {"gamma", c.params.gamma},
                   {"rho_p", c.params.rho_p},
                   {"alpha_p", c.params.alpha_p},
                   {"c_p", c.params.c_p},
                   {"k_p", c.params.k_p},
                   {"rho_f", c.params.rho_f},
                   {"mu_f", c.params.mu_f},
                   {"beta_bjs", c.params.beta_bjs}};
    j["run"] = {{"dt", c.run.dt},
                {"steps", c.run.steps},
                {"nonlinear", c.run.nonlinear},
                {"picard_tol", c.run.picard_tol},
                {"picard_max_iter", c.run.picard_max_iter}};
    j["ic"] = {{"catalog", c.ic.catalog},   {"seed", c.ic.seed},
               {"amplitude", c.ic.amplitude}, {"kx", c.ic.kx},
               {"ky", c.ic.ky},             {"amp_eta", c.ic.amp_eta},
               {"amp_zeta", c.ic.amp_zeta}, {"amp_pb", c.ic.amp_pb},
               {"amp_w", c.ic.amp_w},       {"amp_v", c.ic.amp_v},
               {"amp_pp", c.ic.amp_pp},     {"amp_u", c.ic.amp_u}};
    j["output"] = {{"directory", c.output.directory},
                   {"snapshot_stride", c.output.snapshot_stride},
                   {"formats", c.output.formats}};
    return j;
}

inline bool operator==(const Config::Mesh& a, const Config::Mesh& b) {
    return a.n_plane == b.n_plane && a.nz_b == b.nz_b && a.nz_f == b.nz_f && a.ns_p == b.ns_p &&
           a.h_p == b.h_p;
}
inline bool operator==(const MaterialParams& a, const MaterialParams& b) {
    return a.lambda_b == b.lambda_b && a.mu_b == b.mu_b && a.rho_b == b.rho_b &&
           a.alpha_b == b.alpha_b && a.c_b == b.c_b && a.k_b == b.k_b &&
           a.d_plate == b.d_plate && a.gamma == b.gamma && a.rho_p == b.rho_p &&
           a.alpha_p == b.alpha_p && a.c_p == b.c_p && a.k_p == b.k_p && a.rho_f == b.rho_f &&
           a.mu_f == b.mu_f && a.beta_bjs == b.beta_bjs;
}
inline bool operator==(const Config::Run& a, const Config::Run& b) {
    return a.dt == b.dt && a.steps == b.steps && a.nonlinear == b.nonlinear &&
           a.picard_tol == b.picard_tol && a.picard_max_iter == b.picard_max_iter;
}
inline bool operator==(const IcSpec& a, const IcSpec& b) {
    return a.catalog == b.catalog && a.seed == b.seed && a.amplitude == b.amplitude &&
           a.kx == b.kx && a.ky == b.ky && a.amp_eta == b.amp_eta && a.amp_zeta == b.amp_zeta &&
           a.amp_pb == b.amp_pb && a.amp_w == b.amp_w && a.amp_v == b.amp_v &&
           a.amp_pp == b.amp_pp && a.amp_u == b.amp_u;
}
inline bool operator==(const Config::Output& a, const Config::Output& b) {
    return a.directory == b.directory && a.snapshot_stride == b.snapshot_stride &&
           a.formats == b.formats;
}
inline bool operator==(const Config& a, const Config& b) {
    return a.mesh == b.mesh && a.params == b.params && a.run == b.run && a.ic == b.ic &&
           a.output == b.output;
}

}  // namespace mlf
