#include "sqhbt/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqhbt/errors.hpp"

namespace sqhbt {

namespace {

void check_tolerance(double tol) {
    if (!(tol > 0.0 && tol <= 1e-6)) {
        throw InvalidParameter("tol", "must lie in (0, 1e-6], got " + std::to_string(tol));
    }
}

// Neumaier-compensated running sum; the stopping rule compares 1 - sum to
// tolerances near 1e-12, so plain accumulation is not accurate enough.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Stop once the remaining mass is below tol and the latest two terms no longer
// move a fourth-moment-weighted sum; weak fields otherwise lose the few-photon
// terms that dominate g3 and g4.
class TruncationRule {
public:
    explicit TruncationRule(double tol) : tol_(tol) {}

    bool done(std::size_t n, double p, double total) {
        const double w = std::pow(static_cast<double>(n) + 1.0, 4) * p;
        weighted_.add(w);
        const bool negligible = w + last_w_ <= 1e-17 * weighted_.value();
        last_w_ = w;
        return 1.0 - total < tol_ && negligible;
    }

private:
    double tol_;
    double last_w_ = 0.0;
    CompensatedSum weighted_;
};

PhotonDistribution finish(std::vector<double> probs, double total) {
    if (total > 1.0 + 1e-10) {
        throw InvariantViolation("photon distribution sums to " + std::to_string(total));
    }
    PhotonDistribution d;
    d.probs = std::move(probs);
    d.tail_mass = std::max(0.0, 1.0 - total);
    return d;
}

}  // namespace

void validate(const StateParams& params) {
    if (!std::isfinite(params.r) || params.r < 0.0) {
        throw InvalidParameter("r", "squeezing parameter must be finite and >= 0");
    }
    if (!std::isfinite(params.theta)) {
        throw InvalidParameter("theta", "squeezing phase must be finite");
    }
    if (!std::isfinite(params.alpha)) {
        throw InvalidParameter("alpha", "displacement must be finite");
    }
}

double PhotonDistribution::total() const noexcept {
    CompensatedSum s;
    for (double p : probs) s.add(p);
    return s.value();
}

double PhotonDistribution::mean() const noexcept {
    double m = 0.0;
    for (std::size_t n = 1; n < probs.size(); ++n) m += static_cast<double>(n) * probs[n];
    return m;
}

PhotonDistribution PhotonDistribution::fock(std::size_t n) {
    PhotonDistribution d;
    d.probs.assign(n + 1, 0.0);
    d.probs[n] = 1.0;
    return d;
}

void validate(const PhotonDistribution& dist) {
    if (dist.probs.empty()) {
        throw InvariantViolation("photon distribution is empty");
    }
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
        if (!(dist.probs[n] >= 0.0) || !std::isfinite(dist.probs[n])) {
            throw InvariantViolation("p_" + std::to_string(n) + " is negative or not finite");
        }
    }
    if (!(dist.tail_mass >= 0.0)) {
        throw InvariantViolation("negative tail mass");
    }
    const double norm = dist.total() + dist.tail_mass;
    if (std::abs(norm - 1.0) > 1e-10) {
        throw InvariantViolation("photon distribution normalization off by " + std::to_string(norm - 1.0));
    }
}

std::vector<std::complex<double>> hermite_scaled(std::size_t n_max, std::complex<double> x, double t) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        throw InvalidParameter("x", "Hermite argument must be finite");
    }
    if (!(t >= 0.0 && t <= 0.5)) {
        throw InvalidParameter("t", "Hermite scale must lie in [0, 0.5]");
    }
    std::vector<std::complex<double>> u(n_max + 1);
    u[0] = 1.0;
    if (n_max == 0) return u;
    u[1] = 2.0 * std::sqrt(t) * x;
    for (std::size_t n = 1; n < n_max; ++n) {
        const double k = static_cast<double>(n);
        u[n + 1] = 2.0 * std::sqrt(t / (k + 1.0)) * x * u[n] - 2.0 * t * std::sqrt(k / (k + 1.0)) * u[n - 1];
    }
    return u;
}

PhotonDistribution poisson_distribution(double mean, double tol) {
    if (!std::isfinite(mean) || mean < 0.0) {
        throw InvalidParameter("mean", "Poisson mean must be finite and >= 0");
    }
    if (mean == 0.0) return PhotonDistribution::vacuum();

    const double log_mean = std::log(mean);
    std::vector<double> probs;
    CompensatedSum total;
    TruncationRule rule(tol);
    for (std::size_t n = 0; n < hard_max_photons; ++n) {
        const double k = static_cast<double>(n);
        const double p = std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
        probs.push_back(p);
        total.add(p);
        if (rule.done(n, p, total.value()) && k >= mean) {
            return finish(std::move(probs), total.value());
        }
    }
    throw TruncationFailure("Poisson tail above tolerance at " + std::to_string(hard_max_photons) + " photons");
}

PhotonDistribution coherent_distribution(double alpha, double tol) {
    check_tolerance(tol);
    if (!std::isfinite(alpha)) {
        throw InvalidParameter("alpha", "displacement must be finite");
    }
    return poisson_distribution(alpha * alpha, tol);
}

PhotonDistribution squeezed_distribution(const StateParams& params, double tol) {
    validate(params);
    check_tolerance(tol);
    if (params.r < min_squeezing) {
        return coherent_distribution(params.alpha, tol);
    }

    const double r = params.r;
    const double a2 = params.alpha * params.alpha;
    const double t = std::tanh(r) / 2.0;
    const std::complex<double> x =
        params.alpha * std::polar(1.0, -params.theta / 2.0) / std::sqrt(2.0 * std::cosh(r) * std::sinh(r));
    const double prefactor = std::exp(-a2 + a2 * std::cos(params.theta) * std::tanh(r)) / std::cosh(r);

    // Same recurrence as hermite_scaled, seeded with sqrt(prefactor) so that
    // |u_n| = sqrt(p_n) <= 1 throughout.
    std::complex<double> prev = 0.0;
    std::complex<double> cur = std::sqrt(prefactor);
    std::vector<double> probs;
    CompensatedSum total;
    TruncationRule rule(tol);
    for (std::size_t n = 0; n < hard_max_photons; ++n) {
        const double p = std::norm(cur);
        if (!std::isfinite(p)) {
            throw InvariantViolation("non-finite probability at n = " + std::to_string(n));
        }
        probs.push_back(p);
        total.add(p);
        if (rule.done(n, p, total.value())) {
            return finish(std::move(probs), total.value());
        }
        const double k = static_cast<double>(n);
        const std::complex<double> next =
            2.0 * std::sqrt(t / (k + 1.0)) * x * cur - 2.0 * t * std::sqrt(k / (k + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    throw TruncationFailure("squeezed-state tail above tolerance at " + std::to_string(hard_max_photons) +
                            " photons (r = " + std::to_string(r) + ")");
}

}  // namespace sqhbt
