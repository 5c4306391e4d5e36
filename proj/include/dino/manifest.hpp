#ifndef DINO_MANIFEST_HPP
#define DINO_MANIFEST_HPP

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace dino::manifest
{
// FNV-1a 64-bit content hash used to tie run manifests to their inputs.
std::uint64_t fnv1a64(const std::string &bytes);
std::string fnv1a64_hex(const std::string &bytes);
std::string hash_file(const std::filesystem::path &path);

// A manifest echoes the full effective config, so a run can be reproduced by
// pointing --config at the manifest itself.
nlohmann::json make_manifest(const std::string &command, const nlohmann::json &config_echo,
                             std::uint64_t seed,
                             const std::vector<std::pair<std::string, std::string>> &input_hashes,
                             const std::vector<std::string> &outputs);

bool is_manifest(const nlohmann::json &object);
nlohmann::json config_from_manifest(const nlohmann::json &object);

void write_json(const std::filesystem::path &path, const nlohmann::json &object);

} // namespace dino::manifest

#endif // DINO_MANIFEST_HPP
