#ifndef SQHBT_MONTECARLO_HPP
#define SQHBT_MONTECARLO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sqhbt/clicks.hpp"
#include "sqhbt/detection.hpp"
#include "sqhbt/errors.hpp"
#include "sqhbt/state.hpp"

namespace sqhbt {

/// Counter-based generator: the stream for trial i under seed s is
/// SplitMix64 started from a hash of (s, i), so results do not depend on how
/// trials are scheduled across threads.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial);

    std::uint64_t next() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

struct McConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    StateParams state;
    DetectionParams detection;
    /// Replaces the squeezed-state source when set (e.g. a Fock state).
    std::optional<PhotonDistribution> source;
    /// When > 0, trials are stratified by source photon number (n < k, n >= k)
    /// and, if gamma > 0, by background count (none, at least one). The common
    /// stratum (n < k, no noise) gets 1 - tail_fraction of the trials, the rare
    /// strata share the rest, and estimates are reweighted by the stratum
    /// probabilities.
    std::size_t stratify_at = 0;
    double tail_fraction = 0.5;
    double tol = default_tail_tolerance;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

void validate(const McConfig& config);

struct McStratum {
    double weight = 0.0;
    std::uint64_t trials = 0;
    std::array<std::uint64_t, detector_count + 1> click_histogram{};
};

struct McResult {
    std::array<std::uint64_t, detector_count + 1> click_histogram{};
    std::array<double, detector_count + 1> gamma_hat{};
    std::array<double, detector_count + 1> gamma_std_error{};
    CoherenceTriple estimated;
    /// Delta-method standard errors of g2, g3, g4 and the mean click number.
    CoherenceTriple std_errors;
    /// One entry per stratum; a single entry with weight 1 when unstratified.
    std::vector<McStratum> strata;
};

/// Raised when no trial produced a click; the histogram is kept.
class McNoSignal : public NoSignal {
public:
    explicit McNoSignal(McResult partial)
        : NoSignal("no clicks observed in Monte-Carlo run"), partial_(std::move(partial)) {}

    const McResult& partial() const noexcept { return partial_; }

private:
    McResult partial_;
};

/// Simulates the source, loss, noise and random routing onto four on/off
/// detectors trial by trial. Bit-identical for identical configs.
McResult run_mc(const McConfig& config);

}  // namespace sqhbt

#endif
