// Reference values computed once at 60 significant digits with mpmath
// (series, quadrature and closed forms independent of this code base) and
// frozen here.  Do not regenerate them from the library.
#pragma once

namespace oracle {

inline constexpr double gamma_half = 1.772453850905516;
inline constexpr double gamma_three_halves = 0.88622692545275801;
inline constexpr double gamma_4_3 = 8.8553433604540349;
inline constexpr double gamma_0_013 = 76.358567751324645;

// E_alpha(-x)
inline constexpr double ml_half_at_1 = 0.427583576155807;        // e erfc(1)
inline constexpr double ml_half_at_10 = 0.056140992743822586;    // e^100 erfc(10)
inline constexpr double ml_0_7_at_2 = 0.21378672701529727;
inline constexpr double ml_0_3_at_5 = 0.13708086898057039;
inline constexpr double ml_0_4_at_3x2pow04 = 0.15399275779687857;  // x = 3 * 2^0.4
inline constexpr double ml_0_9_at_30 = 0.003713707698459853;

inline constexpr double e1_at_1 = 0.21938393439552027;
inline constexpr double e1_at_1em3 = 6.3315393641361493;
inline constexpr double scaled_e1_at_100 = 0.0099019422867330184;  // e^x E1(x)
inline constexpr double scaled_e1_at_1e4 = 9.999000199940024e-5;

inline constexpr double j_half_at_2 = 0.51301613656182775;
inline constexpr double j0_at_10 = -0.24593576445134834;
inline constexpr double j_1_5_at_50 = -0.10947687298831804;
inline constexpr double j_2_5_at_200 = 0.048854529236358557;

// Ultraslow pair: k = int_0^1 g_beta d beta, l = e^t E1(t).
inline constexpr double ultraslow_k_at_0_01 = 4.8792819049266551;
inline constexpr double ultraslow_k_at_1 = 0.54123573432867053;
inline constexpr double ultraslow_k_at_1e4 = 0.10019296328982986;
inline constexpr double ultraslow_cumulative_l_at_1 = 1.1735630272247269;
inline constexpr double ultraslow_cumulative_l_at_1e4 = 9.787656026879715;
// Switched pair: (1*l)(1) = int_1^2 dx / Gamma(x).
inline constexpr double switched_cumulative_l_at_1 = 1.0851426643574701;

}  // namespace oracle
