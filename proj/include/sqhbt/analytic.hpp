#ifndef SQHBT_ANALYTIC_HPP
#define SQHBT_ANALYTIC_HPP

#include <complex>

#include "sqhbt/clicks.hpp"
#include "sqhbt/state.hpp"

namespace sqhbt {

/// Shorthands of the closed-form coherences:
///   omega = alpha (cosh r - e^{i theta} sinh r)
///   A = |omega|^2 + sinh^2 r                          (mean photon number)
///   B = (conj(omega)^2 e^{i theta} + omega^2 e^{-i theta}) cosh r sinh r
///   C = cosh 2r + 3 sinh^2 r
///   D = 13 cosh^2 r + 23 cosh 2r
struct AnalyticIntermediates {
    std::complex<double> omega;
    double a_val = 0.0;
    double b_val = 0.0;
    double c_val = 0.0;
    double d_val = 0.0;
};

AnalyticIntermediates intermediates(const StateParams& params);

/// Ideal (lossless, noiseless) coherences of the squeezed state.
///
/// g2 and g3 use the closed forms in A, B and omega. g4 comes from
/// normal_ordered_moment(params, 4) / A^4: the bracket form in A..D does not
/// reproduce the factorial moments of the photon distribution, so it is only
/// available separately as g4_as_printed(). `mean_clicks` carries A.
/// Throws UndefinedCoherence for the vacuum.
CoherenceTriple g_ideal(const StateParams& params);

/// The bracket form of g4 in A, B, C, D, evaluated literally. Kept for
/// comparison; it disagrees with the moments once r > 0.
double g4_as_printed(const StateParams& params);

/// <a^{dag k} a^k> for the Gaussian state with mean omega, <da^dag da> =
/// sinh^2 r and <da da> = -e^{i theta} cosh r sinh r, expanded by Wick pairings.
double normal_ordered_moment(const StateParams& params, int k);

/// All three g's as normal_ordered_moment(k) / A^k.
CoherenceTriple moment_closed_form(const StateParams& params);

/// g(m) = <n(n-1)...(n-m+1)> / <n>^m for m = 2..order_max, summed over the
/// truncated distribution. Orders above order_max are NaN.
/// Throws UndefinedCoherence for a zero-mean distribution.
CoherenceTriple factorial_moments(const PhotonDistribution& dist, int order_max = 4);

}  // namespace sqhbt

#endif
