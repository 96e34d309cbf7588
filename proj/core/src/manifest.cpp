#include "glasscav/manifest.hpp"

#include <ctime>
#include <vector>

#include "glasscav/io.hpp"

namespace glasscav {

std::string tool_version() { return "0.1.0"; }

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = tool;
    j["version"] = version;
    j["command"] = command;
    j["settings"] = settings;
    j["base_seed"] = base_seed;
    j["threads"] = threads;
    j["inputs"] = input_digests;
    j["outputs"] = output_digests;
    j["created_utc"] = created_utc;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.settings = j.at("settings");
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.threads = j.at("threads").get<int>();
    m.input_digests = j.at("inputs").get<std::map<std::string, std::string>>();
    m.output_digests = j.at("outputs").get<std::map<std::string, std::string>>();
    m.created_utc = j.at("created_utc").get<std::string>();
    return m;
}

void RunManifest::add_output(const std::string& path) {
    output_digests[path] = sha256_file_hex(path);
}

void RunManifest::add_input(const std::string& path) {
    input_digests[path] = sha256_file_hex(path);
}

void RunManifest::save(const std::string& path) const {
    write_text_file(path, to_json().dump(2) + "\n");
}

RunManifest RunManifest::load(const std::string& path) {
    return from_json(nlohmann::json::parse(read_text_file(path)));
}

std::vector<std::string> RunManifest::verify_outputs() const {
    std::vector<std::string> bad;
    for (const auto& [path, digest] : output_digests) {
        try {
            if (sha256_file_hex(path) != digest) bad.push_back(path);
        } catch (const std::exception&) {
            bad.push_back(path);
        }
    }
    return bad;
}

}  // namespace glasscav
