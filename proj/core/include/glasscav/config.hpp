#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glasscav/coupling.hpp"
#include "glasscav/dynamics.hpp"
#include "glasscav/imaging.hpp"

namespace glasscav {

/// Site specification: a named fixture, a sampled group, or explicit positions.
struct SiteSpec {
    std::string fixture;                 ///< "J1" or empty
    std::string group;                   ///< "A".."D" or empty
    std::uint64_t seed = 1;
    std::vector<Vec2> explicit_um;       ///< used when fixture/group empty
};

struct ExperimentConfig {
    CavityGeometry geometry;
    PhysicalParams physical;
    DensityProfile density;
    SiteSpec sites;
    RampSchedule schedule;
    Engine engine = Engine::semiclassical;
    EngineOptions engine_options;
    int n_reps = 0;                      ///< 0: per-size default
    std::uint64_t base_seed = 1;
    QuadratureConfig quadrature;
    ImageGridSpec image_grid;
    int frft_oversample = 2;
};

/// Parse with schema validation; unknown keys are rejected with their JSON path.
/// Units are explicit in key names; *_2pi_* values are angular frequencies / (2 pi).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_file(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Materialize the site list (fixture / sampled group / explicit positions).
std::vector<SpinSite> resolve_sites(const ExperimentConfig& cfg);

}  // namespace glasscav
