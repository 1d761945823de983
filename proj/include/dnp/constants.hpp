#pragma once

// CODATA 2018.
namespace dnp::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
inline constexpr double mu0_over_4pi = 1.00000000055e-7;  // T^2 m^3/J
inline constexpr double boltzmann = 1.380649e-23;       // J/K
inline constexpr double gamma_free_electron = -1.76085963023e11;  // rad/s/T
inline constexpr double gamma_proton = 2.6752218744e8;            // rad/s/T

inline constexpr double angstrom = 1e-10;

}  // namespace dnp::constants
