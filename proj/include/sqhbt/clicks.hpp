#ifndef SQHBT_CLICKS_HPP
#define SQHBT_CLICKS_HPP

#include <array>

#include "sqhbt/state.hpp"

namespace sqhbt {

inline constexpr int detector_count = 4;

/// Probabilities that exactly i of the four on/off detectors fire, i = 0..4.
struct ClickDistribution {
    std::array<double, detector_count + 1> gamma_click{};
    double mean_clicks = 0.0;
    /// Input mass beyond truncation; it is not assigned to any bucket.
    double truncation_defect = 0.0;
};

/// g2, g3, g4 together with the mean they were normalised by.
struct CoherenceTriple {
    double g2 = 0.0;
    double g3 = 0.0;
    double g4 = 0.0;
    double mean_clicks = 0.0;

    double order(int m) const;
};

/// Click probabilities behind three cascaded 50/50 splitters. L photons land
/// independently and uniformly on the four detectors; the distribution of the
/// number of occupied detectors is advanced one photon at a time, so the cost
/// is linear in the support of `dist`.
ClickDistribution click_probabilities(const PhotonDistribution& dist);

/// Independent route: inclusion-exclusion count of occupied cells,
/// C(4,j) sum_i (-1)^i C(j,i) ((j-i)/4)^L.
ClickDistribution occupancy_oracle(const PhotonDistribution& dist);

/// g2 = (8 G2 + 24 G3 + 48 G4) / (3 <n>^2), g3 = 16 G3 / <n>^3,
/// g4 = 256 G4 / <n>^4. Throws NoSignal when <n> = 0.
CoherenceTriple coherence_from_clicks(const ClickDistribution& clicks);

}  // namespace sqhbt

#endif
