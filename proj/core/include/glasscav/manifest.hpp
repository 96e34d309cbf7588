#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace glasscav {

/// Reproducibility record written next to every CLI output. Stores the resolved
/// settings and digests of all inputs/outputs so a run can be replayed and verified.
struct RunManifest {
    std::string tool = "glasscav";
    std::string version;
    std::string command;
    nlohmann::json settings;
    std::uint64_t base_seed = 0;
    int threads = 1;
    std::map<std::string, std::string> input_digests;
    std::map<std::string, std::string> output_digests;
    std::string created_utc;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);

    void add_output(const std::string& path);
    void add_input(const std::string& path);
    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);

    /// Recompute digests of the recorded outputs and compare; returns mismatched paths.
    std::vector<std::string> verify_outputs() const;
};

std::string tool_version();
std::string utc_timestamp();

}  // namespace glasscav
