#include "sqhbt/clicks.hpp"

#include <cmath>

#include "sqhbt/errors.hpp"

namespace sqhbt {

namespace {

void finalize(ClickDistribution& c, const PhotonDistribution& dist) {
    c.mean_clicks = 0.0;
    for (int i = 1; i <= detector_count; ++i) c.mean_clicks += i * c.gamma_click[static_cast<std::size_t>(i)];
    c.truncation_defect = dist.tail_mass;
}

}  // namespace

double CoherenceTriple::order(int m) const {
    switch (m) {
        case 2: return g2;
        case 3: return g3;
        case 4: return g4;
        default: throw InvalidParameter("order", "coherence order must be 2, 3 or 4");
    }
}

ClickDistribution click_probabilities(const PhotonDistribution& dist) {
    constexpr auto cells = static_cast<double>(detector_count);
    std::array<double, detector_count + 1> occupied{};
    occupied[0] = 1.0;

    ClickDistribution c;
    for (std::size_t L = 0; L < dist.size(); ++L) {
        const double pL = dist.probs[L];
        for (std::size_t j = 0; j <= detector_count; ++j) c.gamma_click[j] += pL * occupied[j];

        // Next photon hits an occupied detector w.p. j/4, a fresh one otherwise.
        std::array<double, detector_count + 1> next{};
        for (std::size_t j = 0; j <= detector_count; ++j) {
            next[j] += occupied[j] * static_cast<double>(j) / cells;
            if (j < detector_count) next[j + 1] += occupied[j] * (cells - static_cast<double>(j)) / cells;
        }
        occupied = next;
    }
    finalize(c, dist);
    return c;
}

ClickDistribution occupancy_oracle(const PhotonDistribution& dist) {
    constexpr std::array<double, 5> binom4{1, 4, 6, 4, 1};
    auto choose = [](int n, int k) {
        double v = 1.0;
        for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
        return v;
    };

    ClickDistribution c;
    for (std::size_t L = 0; L < dist.size(); ++L) {
        const double pL = dist.probs[L];
        if (pL == 0.0) continue;
        for (int j = 0; j <= detector_count; ++j) {
            double s = 0.0;
            for (int i = 0; i <= j; ++i) {
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                const double frac = static_cast<double>(j - i) / detector_count;
                // 0^0 = 1 covers the vacuum term.
                s += sign * choose(j, i) * std::pow(frac, static_cast<double>(L));
            }
            c.gamma_click[static_cast<std::size_t>(j)] += pL * binom4[static_cast<std::size_t>(j)] * s;
        }
    }
    finalize(c, dist);
    return c;
}

CoherenceTriple coherence_from_clicks(const ClickDistribution& clicks) {
    const double n = clicks.mean_clicks;
    if (!(n > 0.0)) {
        throw NoSignal("mean click number is zero; coherences are undefined");
    }
    const auto& g = clicks.gamma_click;
    CoherenceTriple t;
    t.g2 = (8.0 * g[2] + 24.0 * g[3] + 48.0 * g[4]) / (3.0 * n * n);
    t.g3 = 16.0 * g[3] / (n * n * n);
    t.g4 = 256.0 * g[4] / (n * n * n * n);
    t.mean_clicks = n;
    return t;
}

}  // namespace sqhbt
