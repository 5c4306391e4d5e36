#ifndef DINO_VERSION_HPP
#define DINO_VERSION_HPP

namespace dino
{
inline constexpr const char *kToolVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;
} // namespace dino

#endif // DINO_VERSION_HPP
