#include "glasscav/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "glasscav/io.hpp"

namespace glasscav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& path) {
    if (!j.is_object()) throw std::invalid_argument("config: expected object at " + path);
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key))
            throw std::invalid_argument("config: unknown key '" + path + "/" + key + "'");
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
    check_keys(j, {"geometry", "physical", "density", "sites", "schedule", "engine", "replicas",
                   "quadrature", "image"},
               "");
    ExperimentConfig cfg;

    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        check_keys(g, {"M", "N", "q0_parity", "eta", "w0_um", "L_cm", "R_mirror_cm", "phi"},
                   "geometry");
        cfg.geometry.M = get_or(g, "M", cfg.geometry.M);
        cfg.geometry.N = get_or(g, "N", cfg.geometry.N);
        const std::string parity = get_or<std::string>(g, "q0_parity", "odd");
        if (parity != "odd" && parity != "even")
            throw std::invalid_argument("config: geometry/q0_parity must be 'odd' or 'even'");
        cfg.geometry.q0_parity = (parity == "odd") ? Parity::odd : Parity::even;
        cfg.geometry.eta = get_or(g, "eta", cfg.geometry.eta);
        cfg.geometry.w0_um = get_or(g, "w0_um", cfg.geometry.w0_um);
        cfg.geometry.length_cm = get_or(g, "L_cm", cfg.geometry.length_cm);
        cfg.geometry.mirror_radius_cm = get_or(g, "R_mirror_cm", cfg.geometry.mirror_radius_cm);
        cfg.geometry.phi = get_or(g, "phi", cfg.geometry.phi);
        cfg.geometry.validate();
    }

    if (j.contains("physical")) {
        const auto& p = j.at("physical");
        check_keys(p,
                   {"N_A", "g0_2pi_MHz", "kappa_2pi_kHz", "Delta_A_2pi_GHz", "Delta_C_2pi_MHz",
                    "E_r_2pi_kHz", "omega_z_2pi_kHz", "lambda_pump_um"},
                   "physical");
        auto& ph = cfg.physical;
        ph.atoms_per_ensemble = get_or(p, "N_A", ph.atoms_per_ensemble);
        if (p.contains("g0_2pi_MHz")) ph.g0_rad_s = kTwoPi * 1e6 * p.at("g0_2pi_MHz").get<double>();
        if (p.contains("kappa_2pi_kHz"))
            ph.kappa_rad_s = kTwoPi * 1e3 * p.at("kappa_2pi_kHz").get<double>();
        if (p.contains("Delta_A_2pi_GHz"))
            ph.delta_a_rad_s = kTwoPi * 1e9 * p.at("Delta_A_2pi_GHz").get<double>();
        if (p.contains("Delta_C_2pi_MHz"))
            ph.delta_c_rad_s = kTwoPi * 1e6 * p.at("Delta_C_2pi_MHz").get<double>();
        if (p.contains("E_r_2pi_kHz"))
            ph.recoil_rad_s = kTwoPi * 1e3 * p.at("E_r_2pi_kHz").get<double>();
        if (p.contains("omega_z_2pi_kHz"))
            ph.omega_z_rad_s = kTwoPi * 1e3 * p.at("omega_z_2pi_kHz").get<double>();
        else if (p.contains("E_r_2pi_kHz"))
            ph.omega_z_rad_s = 2.0 * ph.recoil_rad_s;
        ph.pump_wavelength_um = get_or(p, "lambda_pump_um", ph.pump_wavelength_um);
        ph.validate();
    }

    if (j.contains("density")) {
        const auto& d = j.at("density");
        check_keys(d, {"sigma_x_um", "sigma_y_um", "a00", "a01", "a10"}, "density");
        cfg.density.sigma_x_um = get_or(d, "sigma_x_um", cfg.density.sigma_x_um);
        cfg.density.sigma_y_um = get_or(d, "sigma_y_um", cfg.density.sigma_y_um);
        cfg.density.a00 = get_or(d, "a00", cfg.density.a00);
        cfg.density.a01 = get_or(d, "a01", cfg.density.a01);
        cfg.density.a10 = get_or(d, "a10", cfg.density.a10);
        cfg.density.validate();
    }

    if (j.contains("sites")) {
        const auto& s = j.at("sites");
        check_keys(s, {"fixture", "group", "seed", "explicit_um"}, "sites");
        cfg.sites.fixture = get_or<std::string>(s, "fixture", "");
        cfg.sites.group = get_or<std::string>(s, "group", "");
        cfg.sites.seed = get_or<std::uint64_t>(s, "seed", 1);
        if (s.contains("explicit_um")) {
            for (const auto& pos : s.at("explicit_um")) {
                if (!pos.is_array() || pos.size() != 2)
                    throw std::invalid_argument("config: sites/explicit_um entries must be [x, y]");
                cfg.sites.explicit_um.push_back({pos[0].get<double>(), pos[1].get<double>()});
            }
        }
        const int specified = (!cfg.sites.fixture.empty()) + (!cfg.sites.group.empty()) +
                              (!cfg.sites.explicit_um.empty());
        if (specified != 1)
            throw std::invalid_argument(
                "config: sites must specify exactly one of fixture, group, explicit_um");
    } else {
        cfg.sites.fixture = "J1";
    }

    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        check_keys(s, {"t_ramp_ms", "t_quench_us", "ramp_target", "quench_target", "tau_fraction"},
                   "schedule");
        if (s.contains("t_ramp_ms")) cfg.schedule.t_ramp_s = 1e-3 * s.at("t_ramp_ms").get<double>();
        if (s.contains("t_quench_us"))
            cfg.schedule.t_quench_s = 1e-6 * s.at("t_quench_us").get<double>();
        cfg.schedule.ramp_target = get_or(s, "ramp_target", cfg.schedule.ramp_target);
        cfg.schedule.quench_target = get_or(s, "quench_target", cfg.schedule.quench_target);
        cfg.schedule.tau_fraction = get_or(s, "tau_fraction", cfg.schedule.tau_fraction);
        cfg.schedule.validate();
    }

    if (j.contains("engine")) {
        const auto& e = j.at("engine");
        check_keys(e,
                   {"type", "noise_epsilon", "damping_scale", "rel_tol", "descent_max_iters",
                    "descent_stationarity_tol"},
                   "engine");
        const std::string type = get_or<std::string>(e, "type", "semiclassical");
        if (type == "semiclassical")
            cfg.engine = Engine::semiclassical;
        else if (type == "descent")
            cfg.engine = Engine::descent;
        else
            throw std::invalid_argument("config: engine/type must be semiclassical or descent");
        cfg.engine_options.noise_epsilon = get_or(e, "noise_epsilon", cfg.engine_options.noise_epsilon);
        cfg.engine_options.damping_scale = get_or(e, "damping_scale", cfg.engine_options.damping_scale);
        cfg.engine_options.rel_tol = get_or(e, "rel_tol", cfg.engine_options.rel_tol);
        cfg.engine_options.descent_max_iters =
            get_or(e, "descent_max_iters", cfg.engine_options.descent_max_iters);
        cfg.engine_options.descent_stationarity_tol =
            get_or(e, "descent_stationarity_tol", cfg.engine_options.descent_stationarity_tol);
    }

    if (j.contains("replicas")) {
        const auto& r = j.at("replicas");
        check_keys(r, {"n_reps", "base_seed"}, "replicas");
        cfg.n_reps = get_or(r, "n_reps", 0);
        cfg.base_seed = get_or<std::uint64_t>(r, "base_seed", 1);
    }

    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        check_keys(q, {"gh_nodes", "uniform_nodes", "uniform_halfwidth_sigma"}, "quadrature");
        cfg.quadrature.gauss_hermite_nodes = get_or(q, "gh_nodes", cfg.quadrature.gauss_hermite_nodes);
        cfg.quadrature.uniform_nodes = get_or(q, "uniform_nodes", cfg.quadrature.uniform_nodes);
        cfg.quadrature.uniform_halfwidth_sigma =
            get_or(q, "uniform_halfwidth_sigma", cfg.quadrature.uniform_halfwidth_sigma);
    }

    if (j.contains("image")) {
        const auto& im = j.at("image");
        check_keys(im, {"n_px", "pixel_pitch_um", "oversample"}, "image");
        cfg.image_grid.n_px = get_or(im, "n_px", cfg.image_grid.n_px);
        cfg.image_grid.pixel_pitch_um = get_or(im, "pixel_pitch_um", cfg.image_grid.pixel_pitch_um);
        cfg.frft_oversample = get_or(im, "oversample", cfg.frft_oversample);
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    return parse_config(nlohmann::json::parse(read_text_file(path)));
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["geometry"] = {{"M", cfg.geometry.M},
                     {"N", cfg.geometry.N},
                     {"q0_parity", cfg.geometry.q0_parity == Parity::odd ? "odd" : "even"},
                     {"eta", cfg.geometry.eta},
                     {"w0_um", cfg.geometry.w0_um},
                     {"L_cm", cfg.geometry.length_cm},
                     {"R_mirror_cm", cfg.geometry.mirror_radius_cm},
                     {"phi", cfg.geometry.phi}};
    j["physical"] = {{"N_A", cfg.physical.atoms_per_ensemble},
                     {"g0_2pi_MHz", cfg.physical.g0_rad_s / (kTwoPi * 1e6)},
                     {"kappa_2pi_kHz", cfg.physical.kappa_rad_s / (kTwoPi * 1e3)},
                     {"Delta_A_2pi_GHz", cfg.physical.delta_a_rad_s / (kTwoPi * 1e9)},
                     {"Delta_C_2pi_MHz", cfg.physical.delta_c_rad_s / (kTwoPi * 1e6)},
                     {"E_r_2pi_kHz", cfg.physical.recoil_rad_s / (kTwoPi * 1e3)},
                     {"omega_z_2pi_kHz", cfg.physical.omega_z_rad_s / (kTwoPi * 1e3)},
                     {"lambda_pump_um", cfg.physical.pump_wavelength_um}};
    j["density"] = {{"sigma_x_um", cfg.density.sigma_x_um},
                    {"sigma_y_um", cfg.density.sigma_y_um},
                    {"a00", cfg.density.a00},
                    {"a01", cfg.density.a01},
                    {"a10", cfg.density.a10}};
    nlohmann::json sites;
    if (!cfg.sites.fixture.empty()) sites["fixture"] = cfg.sites.fixture;
    if (!cfg.sites.group.empty()) {
        sites["group"] = cfg.sites.group;
        sites["seed"] = cfg.sites.seed;
    }
    if (!cfg.sites.explicit_um.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : cfg.sites.explicit_um) arr.push_back({p[0], p[1]});
        sites["explicit_um"] = arr;
    }
    j["sites"] = sites;
    j["schedule"] = {{"t_ramp_ms", cfg.schedule.t_ramp_s * 1e3},
                     {"t_quench_us", cfg.schedule.t_quench_s * 1e6},
                     {"ramp_target", cfg.schedule.ramp_target},
                     {"quench_target", cfg.schedule.quench_target},
                     {"tau_fraction", cfg.schedule.tau_fraction}};
    j["engine"] = {{"type", cfg.engine == Engine::semiclassical ? "semiclassical" : "descent"},
                   {"noise_epsilon", cfg.engine_options.noise_epsilon},
                   {"damping_scale", cfg.engine_options.damping_scale},
                   {"rel_tol", cfg.engine_options.rel_tol},
                   {"descent_max_iters", cfg.engine_options.descent_max_iters},
                   {"descent_stationarity_tol", cfg.engine_options.descent_stationarity_tol}};
    j["replicas"] = {{"n_reps", cfg.n_reps}, {"base_seed", cfg.base_seed}};
    j["quadrature"] = {{"gh_nodes", cfg.quadrature.gauss_hermite_nodes},
                       {"uniform_nodes", cfg.quadrature.uniform_nodes},
                       {"uniform_halfwidth_sigma", cfg.quadrature.uniform_halfwidth_sigma}};
    j["image"] = {{"n_px", cfg.image_grid.n_px},
                  {"pixel_pitch_um", cfg.image_grid.pixel_pitch_um},
                  {"oversample", cfg.frft_oversample}};
    return j;
}

std::vector<SpinSite> resolve_sites(const ExperimentConfig& cfg) {
    if (cfg.sites.fixture == "J1") return j1_fixture(cfg.density);
    if (!cfg.sites.fixture.empty())
        throw std::invalid_argument("config: unknown fixture '" + cfg.sites.fixture + "'");
    if (!cfg.sites.group.empty()) {
        if (cfg.sites.group.size() != 1)
            throw std::invalid_argument("config: group must be A, B, C or D");
        return sample_positions(position_group(cfg.sites.group[0]), cfg.sites.seed, cfg.density);
    }
    std::vector<SpinSite> sites;
    for (const auto& p : cfg.sites.explicit_um) sites.push_back(SpinSite{p, cfg.density});
    if (sites.empty()) throw std::invalid_argument("config: no sites specified");
    return sites;
}

}  // namespace glasscav
