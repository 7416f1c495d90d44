#pragma once

// Atomic units throughout: hbar = m_e = 1, c = 137.036.
// Lengths in Bohr radii, times in hbar/Hartree, energies in Hartree.

namespace diracsea::units {

inline constexpr double light_speed = 137.036;              // c [a.u.]
inline constexpr double electron_mass = 1.0;                 // m [a.u.]
inline constexpr double rest_energy = light_speed * light_speed;   // m c^2
inline constexpr double compton_wavelength = 1.0 / light_speed;    // hbar / (m c)

}  // namespace diracsea::units
