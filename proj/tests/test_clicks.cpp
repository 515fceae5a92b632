#include <cmath>
#include <random>

#include "doctest.h"
#include "sqhbt/analytic.hpp"
#include "sqhbt/clicks.hpp"
#include "sqhbt/detection.hpp"
#include "sqhbt/errors.hpp"
#include "support/oracles.hpp"

using namespace sqhbt;
using sqhbt::testing::enumerate_routings;
using sqhbt::testing::nested_sum_clicks;
using sqhbt::testing::random_distribution;
using sqhbt::testing::relative_diff;

TEST_SUITE("click_probabilities") {
    TEST_CASE("vacuum never clicks") {
        const auto c = click_probabilities(PhotonDistribution::vacuum());
        CHECK(c.gamma_click[0] == 1.0);
        for (int i = 1; i <= 4; ++i) CHECK(c.gamma_click[static_cast<std::size_t>(i)] == 0.0);
        CHECK(c.mean_clicks == 0.0);
    }

    TEST_CASE("one photon gives exactly one click") {
        const auto c = click_probabilities(PhotonDistribution::fock(1));
        CHECK(c.gamma_click[1] == 1.0);
    }

    TEST_CASE("two photons: 4 of 16 routings coincide") {
        const auto c = click_probabilities(PhotonDistribution::fock(2));
        CHECK(c.gamma_click[1] == doctest::Approx(0.25).scale(0).epsilon(1e-15));
        CHECK(c.gamma_click[2] == doctest::Approx(0.75).scale(0).epsilon(1e-15));
    }

    TEST_CASE("agrees with brute-force routing enumeration") {
        for (unsigned L = 0; L <= 9; ++L) {
            CAPTURE(L);
            const auto expected = enumerate_routings(L);
            const auto c = click_probabilities(PhotonDistribution::fock(L));
            const auto o = occupancy_oracle(PhotonDistribution::fock(L));
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(std::abs(c.gamma_click[j] - expected[j]) < 1e-14);
                CHECK(std::abs(o.gamma_click[j] - expected[j]) < 1e-14);
            }
        }
    }

    TEST_CASE("truncation defect is reported, not folded into a bucket") {
        PhotonDistribution d = PhotonDistribution::fock(2);
        d.probs[2] = 1.0 - 1e-11;
        d.tail_mass = 1e-11;
        const auto c = click_probabilities(d);
        CHECK(c.truncation_defect == 1e-11);
        CHECK(c.gamma_click[0] == 0.0);
        double sum = 0.0;
        for (double v : c.gamma_click) sum += v;
        CHECK(std::abs(sum + c.truncation_defect - 1.0) < 1e-15);
    }

    TEST_CASE("property: three routes agree on random distributions") {
        std::mt19937_64 rng(42);
        std::uniform_int_distribution<std::size_t> len(1, 60);
        for (int trial = 0; trial < 100; ++trial) {
            const auto d = random_distribution(rng, len(rng));
            const auto c = click_probabilities(d);
            const auto o = occupancy_oracle(d);
            const auto n = nested_sum_clicks(d);
            double sum = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(std::abs(c.gamma_click[j] - o.gamma_click[j]) <= 1e-12);
                CHECK(std::abs(c.gamma_click[j] - n[j]) <= 1e-12);
                sum += c.gamma_click[j];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            CHECK(c.mean_clicks >= 0.0);
            CHECK(c.mean_clicks <= 4.0);
        }
    }

    TEST_CASE("property: more background noise never lowers the click rate") {
        const auto base = bernoulli_loss(squeezed_distribution({0.05, 0.3, 0.2}), 0.5);
        double last_zero = 2.0;
        double last_mean = -1.0;
        for (double gamma : {0.0, 1e-9, 1e-7, 1e-5, 1e-3, 0.1, 1.0, 5.0}) {
            const auto c = click_probabilities(noise_convolve(base, gamma));
            CHECK(c.gamma_click[0] <= last_zero);
            CHECK(c.mean_clicks >= last_mean);
            last_zero = c.gamma_click[0];
            last_mean = c.mean_clicks;
        }
    }
}

TEST_SUITE("occupancy_oracle") {
    TEST_CASE("four photons fill all detectors with probability 3/32") {
        const auto o = occupancy_oracle(PhotonDistribution::fock(4));
        CHECK(o.gamma_click[4] == doctest::Approx(3.0 / 32.0).scale(0).epsilon(1e-15));
    }

    TEST_CASE("spot values") {
        CHECK(occupancy_oracle(PhotonDistribution::fock(1)).gamma_click[1] == 1.0);
        CHECK(occupancy_oracle(PhotonDistribution::fock(2)).gamma_click[2] == doctest::Approx(0.75).scale(0));
    }
}

TEST_SUITE("coherence_from_clicks") {
    TEST_CASE("deterministic two-photon input") {
        const auto g = coherence_from_clicks(click_probabilities(PhotonDistribution::fock(2)));
        CHECK(g.mean_clicks == doctest::Approx(7.0 / 4.0).scale(0).epsilon(1e-15));
        CHECK(g.g2 == doctest::Approx(32.0 / 49.0).scale(0).epsilon(1e-14));
        CHECK(g.g3 == 0.0);
        CHECK(g.g4 == 0.0);
    }

    TEST_CASE("weak coherent light is Poissonian") {
        const auto g = coherence_from_clicks(click_probabilities(coherent_distribution(0.01)));
        CHECK(std::abs(g.g2 - 1.0) < 1e-3);
        CHECK(std::abs(g.g3 - 1.0) < 1e-3);
        CHECK(std::abs(g.g4 - 1.0) < 1e-3);
    }

    TEST_CASE("support on {0,1} gives exact zeros") {
        PhotonDistribution d;
        d.probs = {0.7, 0.3};
        const auto g = coherence_from_clicks(click_probabilities(d));
        CHECK(g.g2 == 0.0);
        CHECK(g.g3 == 0.0);
        CHECK(g.g4 == 0.0);
    }

    TEST_CASE("no signal") {
        CHECK_THROWS_AS(coherence_from_clicks(click_probabilities(PhotonDistribution::vacuum())), NoSignal);
    }

    TEST_CASE("feasible anti-bunching point") {
        const auto detected = detect(squeezed_distribution({0.001, 0.0, 0.032}), {0.5, 1e-5});
        const auto g = coherence_from_clicks(click_probabilities(detected));
        CHECK(std::abs(g.g2 - 0.042) / 0.042 < 0.05);
    }

    TEST_CASE("saturation bias vanishes along an intensity-scaling family") {
        // r -> s r, alpha -> sqrt(s) alpha keeps the coherences roughly fixed
        // while the mean photon number scales with s.
        for (double theta : {0.0, 1.0, 3.14159}) {
            double last = 1.0;
            for (double s : {1.0, 0.1, 0.01, 0.001}) {
                const StateParams p{0.02 * s, theta, 0.3 * std::sqrt(s)};
                const auto ideal = g_ideal(p);
                const auto click = coherence_from_clicks(click_probabilities(squeezed_distribution(p)));
                const double bias = relative_diff(click.g2, ideal.g2);
                CHECK(bias <= last);
                last = bias;
            }
            CHECK(last < 1e-3);
        }
    }
}
