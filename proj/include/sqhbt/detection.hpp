#ifndef SQHBT_DETECTION_HPP
#define SQHBT_DETECTION_HPP

#include "sqhbt/state.hpp"

namespace sqhbt {

/// Overall efficiency eta and mean background photon number gamma.
struct DetectionParams {
    double eta = 1.0;
    double gamma = 0.0;
};

void validate(const DetectionParams& params);

/// Binomial thinning: each photon survives with probability eta. The output
/// keeps the input length and carries the input tail mass unchanged.
PhotonDistribution bernoulli_loss(const PhotonDistribution& dist, double eta);

/// Convolution with Poisson(gamma) background photons. The support grows by
/// ceil(gamma + 10 sqrt(gamma) + 20); mass pushed past the new end joins the tail.
PhotonDistribution noise_convolve(const PhotonDistribution& dist, double gamma);

/// Loss first, then noise.
PhotonDistribution detect(const PhotonDistribution& dist, const DetectionParams& params);

}  // namespace sqhbt

#endif
