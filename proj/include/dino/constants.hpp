#ifndef DINO_CONSTANTS_HPP
#define DINO_CONSTANTS_HPP

namespace dino
{
// Speed of light in nm*THz (nm/ps). With frequencies in THz and lengths in
// nm, optical phases are 2*pi*nu*n*d / kSpeedOfLight.
inline constexpr double kSpeedOfLight = 299792.458;

inline constexpr double kPi = 3.14159265358979323846;

// counts/s -> counts/us
inline constexpr double kCpsToPerUs = 1e-6;

} // namespace dino

#endif // DINO_CONSTANTS_HPP
