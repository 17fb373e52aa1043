#pragma once

#include <cmath>
#include <stdexcept>

#include "levylmm/common.hpp"
#include "levylmm/rng.hpp"

namespace levylmm {

// ============================================================================
// Normal inverse Gaussian distribution / Levy process.
//
// Parameterised per unit time: increments over dt are NIG(alpha, beta,
// mu*dt, delta_bar*dt). The cumulant generating function is
//
//     kappa(u) = mu*u + delta_bar*(sqrt(alpha^2-beta^2) - sqrt(alpha^2-(beta+u)^2)),
//
// finite for |beta + u| <= alpha. For beta = mu = 0 this is
// delta_bar*alpha - delta_bar*sqrt(alpha^2 - u^2).
// ============================================================================

struct NigParams {
    double alpha;      // tail heaviness, > 0
    double beta;       // asymmetry, |beta| < alpha
    double mu;         // location per unit time
    double delta_bar;  // scale per unit time, > 0

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("NigParams: alpha must be > 0");
        if (!(delta_bar > 0.0)) throw std::invalid_argument("NigParams: delta_bar must be > 0");
        if (!(std::abs(beta) < alpha))
            throw std::invalid_argument("NigParams: |beta| must be < alpha");
    }

    double gamma() const { return std::sqrt(alpha * alpha - beta * beta); }

    static NigParams standardized(double alpha_and_delta = 12.0) {
        return NigParams{alpha_and_delta, 0.0, 0.0, alpha_and_delta};
    }
};

// kappa(u); throws CumulantDomainError outside |beta + u| <= alpha.
inline double nig_cumulant(const NigParams& p, double u) {
    const double shifted = p.beta + u;
    if (std::abs(shifted) > p.alpha)
        throw CumulantDomainError(strfmt(
            "nig_cumulant: |beta + u| = %.6g exceeds alpha = %.6g (exponential-moment bound)",
            std::abs(shifted), p.alpha));
    return p.mu * u + p.delta_bar * (p.gamma() - std::sqrt(p.alpha * p.alpha - shifted * shifted));
}

// kappa'(0) = mu + delta_bar*beta/gamma, exact.
inline double nig_mean(const NigParams& p) { return p.mu + p.delta_bar * p.beta / p.gamma(); }

// kappa''(0) = delta_bar*alpha^2/gamma^3, exact; delta_bar/alpha when beta = 0.
inline double nig_variance(const NigParams& p) {
    const double g = p.gamma();
    return p.delta_bar * p.alpha * p.alpha / (g * g * g);
}

// Levy measure density F(x) = (delta_bar*alpha/pi) * exp(beta*x) * K1(alpha|x|)/|x|.
// Behaves like delta_bar/(pi*x^2) near zero and decays like exp(beta*x - alpha|x|).
inline double nig_levy_density(const NigParams& p, double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) throw std::invalid_argument("nig_levy_density: x must be nonzero");
    static constexpr double inv_pi = 0.3183098861837907;
    const double k1 = std::cyl_bessel_k(1.0, p.alpha * ax);
    return p.delta_bar * p.alpha * inv_pi * std::exp(p.beta * x) * k1 / ax;
}

// Inverse Gaussian draw with mean m and shape lam (Michael-Schucany-Haas).
inline double inverse_gaussian_sample(double m, double lam, double z, double u) {
    const double v = z * z;
    const double w = m * v;
    const double x = m + m / (2.0 * lam) * (w - std::sqrt(w * (4.0 * lam + w)));
    return (u <= m / (m + x)) ? x : m * m / x;
}

// One exact increment H_{t+dt} - H_t via inverse Gaussian subordination of a
// Gaussian: no discretization bias at any step size.
inline double sample_nig_increment(const NigParams& p, double dt, const IncrementDraws& d,
                                   bool antithetic = false) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_nig_increment: dt must be > 0");
    const double scale = p.delta_bar * dt;
    const double ig_mean = scale / p.gamma();
    const double ig_shape = scale * scale;
    const double subordinator = inverse_gaussian_sample(ig_mean, ig_shape, d.z_subordinator,
                                                        d.u_subordinator);
    const double z = antithetic ? -d.z_gaussian : d.z_gaussian;
    return p.mu * dt + p.beta * subordinator + std::sqrt(subordinator) * z;
}

inline double sample_nig_increment(const NigParams& p, double dt, const PathStream& stream,
                                   std::uint32_t step, bool antithetic = false) {
    return sample_nig_increment(p, dt, stream.increment_draws(step), antithetic);
}

}  // namespace levylmm
