#pragma once

// Physical constants (2019 SI exact values where defined).
namespace terafet::constants {

inline constexpr double q_e = 1.602176634e-19;     // elementary charge, C
inline constexpr double m_e = 9.1093837015e-31;    // electron rest mass, kg
inline constexpr double k_b = 1.380649e-23;        // Boltzmann constant, J/K
inline constexpr double pi = 3.14159265358979323846;

} // namespace terafet::constants
