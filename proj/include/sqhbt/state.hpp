#ifndef SQHBT_STATE_HPP
#define SQHBT_STATE_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace sqhbt {

/// Squeezed coherent state S(xi) D(alpha) |0>, xi = r e^{i theta}, alpha real.
struct StateParams {
    double r = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
};

/// Throws InvalidParameter naming the field when r < 0 or a value is not finite.
void validate(const StateParams& params);

/// Photon-number probabilities p_0..p_N plus the mass left beyond N.
struct PhotonDistribution {
    std::vector<double> probs;
    double tail_mass = 0.0;

    std::size_t size() const noexcept { return probs.size(); }
    double total() const noexcept;  // sum(probs), tail excluded
    double mean() const noexcept;

    static PhotonDistribution fock(std::size_t n);
    static PhotonDistribution vacuum() { return fock(0); }
};

/// Checks non-negativity and normalization (sum + tail within 1e-10 of 1).
void validate(const PhotonDistribution& dist);

inline constexpr double default_tail_tolerance = 1e-12;
inline constexpr std::size_t hard_max_photons = 4096;
/// Below this squeezing the coherent-state branch is used.
inline constexpr double min_squeezing = 1e-8;

/// u_n = H_n(x) t^{n/2} / sqrt(n!) for n = 0..n_max, via the scaled three-term
/// recurrence. Requires finite x and t in [0, 0.5].
std::vector<std::complex<double>> hermite_scaled(std::size_t n_max, std::complex<double> x, double t);

/// Poisson(mean) truncated once the remaining mass drops below tol.
PhotonDistribution poisson_distribution(double mean, double tol = default_tail_tolerance);

PhotonDistribution coherent_distribution(double alpha, double tol = default_tail_tolerance);

/// Photon-number distribution of the phase-dependent squeezed state.
///
/// p_n = exp(-alpha^2 + alpha^2 cos(theta) tanh r) / cosh r * |u_n|^2 with
/// x = alpha e^{-i theta/2} / sqrt(2 cosh r sinh r) and t = tanh(r)/2.
/// The series is extended until the remaining mass is below tol; hitting
/// hard_max_photons first throws TruncationFailure.
PhotonDistribution squeezed_distribution(const StateParams& params, double tol = default_tail_tolerance);

}  // namespace sqhbt

#endif
