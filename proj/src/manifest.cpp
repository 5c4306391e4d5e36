#include "dino/manifest.hpp"

#include "dino/csv.hpp"
#include "dino/errors.hpp"
#include "dino/version.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace dino::manifest
{
std::uint64_t fnv1a64(const std::string &bytes)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes)
    {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string fnv1a64_hex(const std::string &bytes)
{
    std::ostringstream oss;
    oss << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
    return oss.str();
}

std::string hash_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ValidationError("manifest: cannot open input " + path.string());
    }
    std::ostringstream oss;
    oss << in.rdbuf();
    return fnv1a64_hex(oss.str());
}

nlohmann::json make_manifest(const std::string &command, const nlohmann::json &config_echo,
                             std::uint64_t seed,
                             const std::vector<std::pair<std::string, std::string>> &input_hashes,
                             const std::vector<std::string> &outputs)
{
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto &[path, hash] : input_hashes)
    {
        inputs.push_back({{"path", path}, {"fnv1a64", hash}});
    }
    return {{"dinoreflect_manifest", true},
            {"schema_version", kConfigSchemaVersion},
            {"tool_version", kToolVersion},
            {"command", command},
            {"seed", seed},
            {"config", config_echo},
            {"inputs", inputs},
            {"outputs", outputs}};
}

bool is_manifest(const nlohmann::json &object)
{
    return object.is_object() && object.value("dinoreflect_manifest", false);
}

nlohmann::json config_from_manifest(const nlohmann::json &object)
{
    if (!object.contains("config"))
    {
        throw ValidationError("manifest: missing embedded 'config'");
    }
    return object.at("config");
}

void write_json(const std::filesystem::path &path, const nlohmann::json &object)
{
    csv::write_file_atomic(path, object.dump(2) + "\n");
}

} // namespace dino::manifest
