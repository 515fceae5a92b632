#include "sqhbt/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sqhbt/errors.hpp"

namespace sqhbt {

namespace {

void require_real(std::complex<double> v, double scale, const char* what) {
    if (std::abs(v.imag()) > 1e-10 * std::max(scale, std::numeric_limits<double>::min())) {
        throw InvariantViolation(std::string(what) + " has imaginary residue " + std::to_string(v.imag()));
    }
}

void require_not_vacuum(const AnalyticIntermediates& im) {
    if (!(im.a_val > 0.0)) {
        throw UndefinedCoherence("vacuum input: coherences are undefined");
    }
}

double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

double factorial(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

template <typename T>
T ipow(T base, int e) {
    T v = T(1.0);
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

// (n-1)!! with the convention (-1)!! = 1.
double odd_double_factorial(int n) {
    double v = 1.0;
    for (int i = n - 1; i > 1; i -= 2) v *= i;
    return v;
}

}  // namespace

AnalyticIntermediates intermediates(const StateParams& params) {
    validate(params);
    const double r = params.r;
    const double ch = std::cosh(r);
    const double sh = std::sinh(r);
    const std::complex<double> phase = std::polar(1.0, params.theta);

    AnalyticIntermediates im;
    im.omega = params.alpha * (ch - phase * sh);
    im.a_val = std::norm(im.omega) + sh * sh;
    const std::complex<double> b =
        (std::conj(im.omega) * std::conj(im.omega) * phase + im.omega * im.omega * std::conj(phase)) * ch * sh;
    require_real(b, std::norm(im.omega) * ch * sh, "B");
    im.b_val = b.real();
    im.c_val = std::cosh(2.0 * r) + 3.0 * sh * sh;
    im.d_val = 13.0 * ch * ch + 23.0 * std::cosh(2.0 * r);
    return im;
}

CoherenceTriple g_ideal(const StateParams& params) {
    const AnalyticIntermediates im = intermediates(params);
    require_not_vacuum(im);

    const double r = params.r;
    const double o2 = std::norm(im.omega);
    const double s2 = std::sinh(r) * std::sinh(r);
    const double c2r = std::cosh(2.0 * r);
    const double A = im.a_val;
    const double B = im.b_val;

    CoherenceTriple t;
    t.g2 = 1.0 - (B - (2.0 * o2 + c2r) * s2) / (A * A);
    t.g3 = 1.0 - (3.0 * B * (o2 + 3.0 * s2) - (2.0 + 7.0 * c2r) * s2 * s2 -
                  3.0 * o2 * s2 * (2.0 * o2 + 4.0 * c2r - 1.0)) /
                     (A * A * A);
    t.g4 = normal_ordered_moment(params, 4) / (A * A * A * A);
    t.mean_clicks = A;
    return t;
}

double g4_as_printed(const StateParams& params) {
    const AnalyticIntermediates im = intermediates(params);
    require_not_vacuum(im);

    const double r = params.r;
    const double o2 = std::norm(im.omega);
    const double s2 = std::sinh(r) * std::sinh(r);
    const double c2r = std::cosh(2.0 * r);
    const double A = im.a_val;
    const double B = im.b_val;
    const double C = im.c_val;
    const double D = im.d_val;

    const double bracket = 3.0 * B * B + (3.0 - 7.0 * c2r + 13.0 * std::cosh(4.0 * r)) * s2 * s2 +
                           12.0 * o2 * o2 * o2 * s2 * s2 * s2 -
                           6.0 * B * (o2 * o2 - 8.0 * o2 * s2 - 3.0 * C * s2) +
                           6.0 * o2 * s2 * (2.0 * C + 3.0 * c2r) + 4.0 * D * o2 * s2 * s2;
    return 1.0 + bracket / (A * A * A * A);
}

double normal_ordered_moment(const StateParams& params, int k) {
    validate(params);
    if (k < 0 || k > 8) {
        throw InvalidParameter("k", "moment order must lie in [0, 8]");
    }
    const double ch = std::cosh(params.r);
    const double sh = std::sinh(params.r);
    const std::complex<double> omega = params.alpha * (ch - std::polar(1.0, params.theta) * sh);
    const double n_th = sh * sh;
    const std::complex<double> m = -std::polar(1.0, params.theta) * ch * sh;

    // E[da^dag^i da^j]: p cross pairs, the rest paired within each kind.
    auto fluctuation = [&](int i, int j) {
        std::complex<double> e = 0.0;
        for (int p = 0; p <= std::min(i, j); ++p) {
            if ((i - p) % 2 != 0 || (j - p) % 2 != 0) continue;
            const double count = binomial(i, p) * binomial(j, p) * factorial(p) * odd_double_factorial(i - p) *
                                 odd_double_factorial(j - p);
            e += count * ipow(n_th, p) * ipow(std::conj(m), (i - p) / 2) * ipow(m, (j - p) / 2);
        }
        return e;
    };

    std::complex<double> total = 0.0;
    double scale = 0.0;
    for (int i = 0; i <= k; ++i) {
        for (int j = 0; j <= k; ++j) {
            const std::complex<double> term = binomial(k, i) * binomial(k, j) * ipow(std::conj(omega), k - i) *
                                              ipow(omega, k - j) * fluctuation(i, j);
            total += term;
            scale += std::abs(term);
        }
    }
    require_real(total, scale, "normal-ordered moment");
    return total.real();
}

CoherenceTriple moment_closed_form(const StateParams& params) {
    const double A = normal_ordered_moment(params, 1);
    if (!(A > 0.0)) {
        throw UndefinedCoherence("vacuum input: coherences are undefined");
    }
    CoherenceTriple t;
    t.g2 = normal_ordered_moment(params, 2) / (A * A);
    t.g3 = normal_ordered_moment(params, 3) / (A * A * A);
    t.g4 = normal_ordered_moment(params, 4) / (A * A * A * A);
    t.mean_clicks = A;
    return t;
}

CoherenceTriple factorial_moments(const PhotonDistribution& dist, int order_max) {
    if (order_max < 2 || order_max > 4) {
        throw InvalidParameter("order_max", "must be 2, 3 or 4");
    }
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t n = 1; n < dist.size(); ++n) {
        const double k = static_cast<double>(n);
        const double p = dist.probs[n];
        const double f2 = k * (k - 1.0);
        const double f3 = f2 * (k - 2.0);
        m1 += k * p;
        m2 += f2 * p;
        m3 += f3 * p;
        m4 += f3 * (k - 3.0) * p;
    }
    if (!(m1 > 0.0)) {
        throw UndefinedCoherence("zero-mean distribution: coherences are undefined");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CoherenceTriple t;
    t.g2 = m2 / (m1 * m1);
    t.g3 = order_max >= 3 ? m3 / (m1 * m1 * m1) : nan;
    t.g4 = order_max >= 4 ? m4 / (m1 * m1 * m1 * m1) : nan;
    t.mean_clicks = m1;
    return t;
}

}  // namespace sqhbt
