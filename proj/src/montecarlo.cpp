#include "sqhbt/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

namespace sqhbt {

namespace {

std::uint64_t splitmix(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Inverse-CDF sampler over a discrete table.
class DiscreteSampler {
public:
    explicit DiscreteSampler(const std::vector<double>& probs) : cdf_(probs.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            cdf_[i] = acc;
        }
    }

    double mass_below(std::size_t k) const { return k == 0 ? 0.0 : cdf_[std::min(k, cdf_.size()) - 1]; }
    double mass() const { return cdf_.empty() ? 0.0 : cdf_.back(); }

    /// Sample restricted to [lo_mass, hi_mass) of the cumulative mass.
    std::size_t sample(double u, double lo_mass, double hi_mass) const {
        const double target = lo_mass + u * (hi_mass - lo_mass);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                                 static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    }

private:
    std::vector<double> cdf_;
};

struct MassRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct Stratum {
    MassRange source;
    // Empty range: unrestricted noise, including the untabulated far tail.
    std::optional<MassRange> noise;
    std::uint64_t first = 0;
    std::uint64_t count = 0;
    double weight = 0.0;
};

using Histogram = std::array<std::uint64_t, detector_count + 1>;

struct Simulator {
    const DiscreteSampler& source;
    const DiscreteSampler& noise;
    double eta;
    double gamma;
    std::uint64_t seed;

    int trial(std::uint64_t index, const Stratum& s) const {
        TrialRng rng(seed, index);
        const std::size_t n = source.sample(rng.uniform(), s.source.lo, s.source.hi);
        std::size_t photons = 0;
        if (eta == 1.0) {
            photons = n;
        } else {
            for (std::size_t i = 0; i < n; ++i) photons += rng.uniform() < eta ? 1 : 0;
        }
        if (gamma > 0.0) {
            photons += s.noise ? noise.sample(rng.uniform(), s.noise->lo, s.noise->hi) : sample_noise(rng);
        }

        unsigned mask = 0;
        for (std::size_t i = 0; i < photons && mask != 0xF; ++i) {
            mask |= 1u << (rng.next() >> 62);
        }
        return std::popcount(mask);
    }

    std::size_t sample_noise(TrialRng& rng) const {
        const double u = rng.uniform();
        if (u < noise.mass()) return noise.sample(u, 0.0, 1.0);
        // Past the table (probability < 1e-12): continue the Poisson recursion.
        auto k = static_cast<std::size_t>(std::ceil(gamma + 10.0 * std::sqrt(gamma) + 20.0));
        double log_p = -gamma + static_cast<double>(k) * std::log(gamma) - std::lgamma(static_cast<double>(k) + 1.0);
        double acc = noise.mass();
        for (;;) {
            acc += std::exp(log_p);
            if (acc > u || log_p < -745.0) return k;
            ++k;
            log_p += std::log(gamma / static_cast<double>(k));
        }
    }
};

std::vector<double> noise_table(double gamma) {
    if (gamma == 0.0) return {1.0};
    const auto len = static_cast<std::size_t>(std::ceil(gamma + 10.0 * std::sqrt(gamma) + 20.0));
    std::vector<double> p(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double kk = static_cast<double>(k);
        p[k] = std::exp(-gamma + kk * std::log(gamma) - std::lgamma(kk + 1.0));
    }
    return p;
}

Histogram run_range(const Simulator& sim, const Stratum& s, std::uint64_t begin, std::uint64_t end) {
    Histogram h{};
    for (std::uint64_t i = begin; i < end; ++i) ++h[static_cast<std::size_t>(sim.trial(i, s))];
    return h;
}

Histogram run_stratum(const Simulator& sim, const Stratum& s, unsigned threads) {
    Histogram total{};
    if (s.count == 0) return total;
    const std::uint64_t workers = std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, s.count / 4096 + 1));
    std::vector<Histogram> parts(workers);
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = s.count / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t b = s.first + w * chunk;
            const std::uint64_t e = (w + 1 == workers) ? s.first + s.count : b + chunk;
            pool.emplace_back([&, w, b, e] { parts[w] = run_range(sim, s, b, e); });
        }
    }
    for (const auto& p : parts) {
        for (std::size_t j = 0; j < total.size(); ++j) total[j] += p[j];
    }
    return total;
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix(s);
    std::uint64_t t = trial ^ a;
    state_ = splitmix(t) ^ seed;
}

std::uint64_t TrialRng::next() noexcept { return splitmix(state_); }

void validate(const McConfig& config) {
    if (config.trials < 1) throw InvalidParameter("trials", "must be >= 1");
    if (!(config.tail_fraction > 0.0 && config.tail_fraction < 1.0)) {
        throw InvalidParameter("tail_fraction", "must lie in (0, 1)");
    }
    validate(config.detection);
    if (config.source) {
        validate(*config.source);
    } else {
        validate(config.state);
    }
}

McResult run_mc(const McConfig& config) {
    validate(config);
    const PhotonDistribution source_dist =
        config.source ? *config.source : squeezed_distribution(config.state, config.tol);
    const DiscreteSampler source(source_dist.probs);
    const DiscreteSampler noise(noise_table(config.detection.gamma));
    const Simulator sim{source, noise, config.detection.eta, config.detection.gamma, config.seed};
    const unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());

    std::vector<Stratum> strata;
    const double source_mass = source.mass();
    const double split = source.mass_below(config.stratify_at);
    const bool split_source = config.stratify_at > 0 && split > 0.0 && split < source_mass;
    const bool split_noise = config.stratify_at > 0 && config.detection.gamma > 0.0;
    if (split_source || split_noise) {
        std::vector<MassRange> source_ranges{{0.0, split_source ? split : source_mass}};
        if (split_source) source_ranges.push_back({split, source_mass});
        const double quiet = noise.mass_below(1);
        std::vector<MassRange> noise_ranges{{0.0, split_noise ? quiet : noise.mass()}};
        if (split_noise) noise_ranges.push_back({quiet, noise.mass()});

        for (const MassRange& sr : source_ranges) {
            for (const MassRange& nr : noise_ranges) {
                Stratum s;
                s.source = sr;
                s.noise = nr;
                s.weight = (sr.hi - sr.lo) / source_mass * (nr.hi - nr.lo) / noise.mass();
                strata.push_back(s);
            }
        }
        const double rare = static_cast<double>(strata.size() - 1);
        std::uint64_t assigned = 0;
        for (std::size_t i = 1; i < strata.size(); ++i) {
            strata[i].count = static_cast<std::uint64_t>(
                std::llround(config.tail_fraction / rare * static_cast<double>(config.trials)));
            assigned += strata[i].count;
        }
        if (assigned >= config.trials) throw InvalidParameter("trials", "too few trials for stratified sampling");
        strata[0].count = config.trials - assigned;
        std::uint64_t first = 0;
        for (Stratum& s : strata) {
            s.first = first;
            first += s.count;
        }
    } else {
        Stratum s;
        s.source = {0.0, source_mass};
        s.count = config.trials;
        s.weight = 1.0;
        strata.push_back(s);
    }

    McResult res;
    constexpr std::size_t buckets = detector_count + 1;
    std::array<std::array<double, buckets>, buckets> cov{};
    for (const Stratum& s : strata) {
        McStratum summary{s.weight, s.count, run_stratum(sim, s, threads)};
        res.strata.push_back(summary);
        if (s.count == 0) continue;
        const double n = static_cast<double>(s.count);
        std::array<double, buckets> pi{};
        for (std::size_t j = 0; j < buckets; ++j) {
            res.click_histogram[j] += summary.click_histogram[j];
            pi[j] = static_cast<double>(summary.click_histogram[j]) / n;
            res.gamma_hat[j] += s.weight * pi[j];
        }
        for (std::size_t i = 0; i < buckets; ++i) {
            for (std::size_t j = 0; j < buckets; ++j) {
                cov[i][j] += s.weight * s.weight * ((i == j ? pi[i] : 0.0) - pi[i] * pi[j]) / n;
            }
        }
    }
    for (std::size_t j = 0; j < buckets; ++j) res.gamma_std_error[j] = std::sqrt(std::max(0.0, cov[j][j]));

    ClickDistribution clicks;
    clicks.gamma_click = res.gamma_hat;
    for (std::size_t j = 1; j < buckets; ++j) clicks.mean_clicks += static_cast<double>(j) * res.gamma_hat[j];
    if (!(clicks.mean_clicks > 0.0)) {
        throw McNoSignal(res);
    }
    res.estimated = coherence_from_clicks(clicks);

    const double m = clicks.mean_clicks;
    const auto& g = res.estimated;
    auto propagate = [&](const std::array<double, buckets>& grad) {
        double v = 0.0;
        for (std::size_t i = 0; i < buckets; ++i) {
            for (std::size_t j = 0; j < buckets; ++j) v += grad[i] * cov[i][j] * grad[j];
        }
        return std::sqrt(std::max(0.0, v));
    };
    std::array<double, buckets> d2{}, d3{}, d4{}, dn{};
    for (std::size_t j = 0; j < buckets; ++j) {
        const auto jj = static_cast<double>(j);
        dn[j] = jj;
        d2[j] = -2.0 * g.g2 * jj / m;
        d3[j] = -3.0 * g.g3 * jj / m;
        d4[j] = -4.0 * g.g4 * jj / m;
    }
    d2[2] += 8.0 / (3.0 * m * m);
    d2[3] += 24.0 / (3.0 * m * m);
    d2[4] += 48.0 / (3.0 * m * m);
    d3[3] += 16.0 / (m * m * m);
    d4[4] += 256.0 / (m * m * m * m);
    res.std_errors.g2 = propagate(d2);
    res.std_errors.g3 = propagate(d3);
    res.std_errors.g4 = propagate(d4);
    res.std_errors.mean_clicks = propagate(dn);
    return res;
}

}  // namespace sqhbt
