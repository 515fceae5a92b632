#include "sqhbt/detection.hpp"

#include <algorithm>
#include <cmath>

#include "sqhbt/errors.hpp"

namespace sqhbt {

namespace {

std::vector<double> log_factorials(std::size_t n_max) {
    std::vector<double> lf(n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) lf[k] = std::lgamma(static_cast<double>(k) + 1.0);
    return lf;
}

}  // namespace

void validate(const DetectionParams& params) {
    if (!(params.eta >= 0.0 && params.eta <= 1.0)) {
        throw InvalidParameter("eta", "efficiency must lie in [0, 1]");
    }
    if (!std::isfinite(params.gamma) || params.gamma < 0.0) {
        throw InvalidParameter("gamma", "background mean must be finite and >= 0");
    }
}

PhotonDistribution bernoulli_loss(const PhotonDistribution& dist, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw InvalidParameter("eta", "efficiency must lie in [0, 1]");
    }
    if (eta == 1.0) return dist;

    PhotonDistribution out;
    out.tail_mass = dist.tail_mass;
    out.probs.assign(dist.size(), 0.0);
    if (eta == 0.0) {
        out.probs[0] = dist.total();
        return out;
    }

    const std::vector<double> lf = log_factorials(dist.size());
    const double log_keep = std::log(eta);
    const double log_lose = std::log1p(-eta);
    for (std::size_t n = 0; n < dist.size(); ++n) {
        const double pn = dist.probs[n];
        if (pn == 0.0) continue;
        for (std::size_t m = 0; m <= n; ++m) {
            const double log_binom = lf[n] - lf[m] - lf[n - m] + static_cast<double>(m) * log_keep +
                                     static_cast<double>(n - m) * log_lose;
            out.probs[m] += pn * std::exp(log_binom);
        }
    }
    return out;
}

PhotonDistribution noise_convolve(const PhotonDistribution& dist, double gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw InvalidParameter("gamma", "background mean must be finite and >= 0");
    }
    if (gamma == 0.0) return dist;

    const auto extra = static_cast<std::size_t>(std::ceil(gamma + 10.0 * std::sqrt(gamma) + 20.0));
    const std::size_t len = dist.size() + extra;

    // (L - m)! is the empty product 1 at L = m.
    std::vector<double> noise(len);
    const double log_gamma = std::log(gamma);
    for (std::size_t k = 0; k < len; ++k) {
        const double kk = static_cast<double>(k);
        noise[k] = std::exp(-gamma + kk * log_gamma - std::lgamma(kk + 1.0));
    }

    PhotonDistribution out;
    out.probs.assign(len, 0.0);
    for (std::size_t m = 0; m < dist.size(); ++m) {
        const double pm = dist.probs[m];
        if (pm == 0.0) continue;
        for (std::size_t L = m; L < len; ++L) out.probs[L] += pm * noise[L - m];
    }
    out.tail_mass = dist.tail_mass + std::max(0.0, dist.total() - out.total());
    return out;
}

PhotonDistribution detect(const PhotonDistribution& dist, const DetectionParams& params) {
    validate(params);
    return noise_convolve(bernoulli_loss(dist, params.eta), params.gamma);
}

}  // namespace sqhbt
