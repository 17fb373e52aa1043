#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace levylmm {

// ============================================================================
// Counter-based random numbers.
//
// Monte Carlo paths draw from Philox4x32-10 keyed by the master seed, with the
// counter laid out as (draw slot, time step, path index, tag). A draw is a pure
// function of (seed, path, step, slot), so results do not depend on thread
// count, scheduling or evaluation order.
// ============================================================================

struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
            const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Uniform in (0,1), both endpoints excluded.
inline double uniform_from_bits(std::uint64_t bits) {
    return (double(bits >> 11) + 0.5) * 0x1p-53;
}

// Inverse standard normal CDF: Acklam's rational approximation polished with
// one Halley step against erfc, giving close to full double precision.
inline double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement on Phi(x) - p = 0.
    static constexpr double sqrt2 = 1.4142135623730951;
    static constexpr double sqrt_2pi = 2.5066282746310002;
    const double e = 0.5 * std::erfc(-x / sqrt2) - p;
    const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

// Raw draws for one driver increment. The antithetic partner of a path reuses
// z_subordinator and u_subordinator and flips the sign of the Gaussian parts.
// The diffusion normal is only materialised for drivers with c > 0.
struct IncrementDraws {
    double z_subordinator;
    double u_subordinator;
    double z_gaussian;
    double u_diffusion;

    double z_diffusion() const { return inverse_normal_cdf(u_diffusion); }
};

// Value-typed stream for one path; freely copyable across threads.
class PathStream {
  public:
    PathStream(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

    // Two uniforms from counter block (slot, step, path_lo, path_hi^tag).
    std::array<double, 2> uniform_pair(std::uint32_t step, std::uint32_t slot) const {
        const std::array<std::uint32_t, 4> ctr = {slot, step, std::uint32_t(path_),
                                                  std::uint32_t(path_ >> 32) ^ 0x4c4d4d31u};
        const std::array<std::uint32_t, 2> key = {std::uint32_t(seed_),
                                                  std::uint32_t(seed_ >> 32)};
        const auto r = Philox4x32::block(ctr, key);
        const std::uint64_t u0 = (std::uint64_t(r[0]) << 32) | r[1];
        const std::uint64_t u1 = (std::uint64_t(r[2]) << 32) | r[3];
        return {uniform_from_bits(u0), uniform_from_bits(u1)};
    }

    IncrementDraws increment_draws(std::uint32_t step) const {
        const auto b0 = uniform_pair(step, 0);
        const auto b1 = uniform_pair(step, 1);
        return IncrementDraws{inverse_normal_cdf(b0[0]), b0[1], inverse_normal_cdf(b1[0]),
                              b1[1]};
    }

    std::uint64_t path() const { return path_; }

  private:
    std::uint64_t seed_;
    std::uint64_t path_;
};

// Master seed plus the pairing policy; the per-path stream index is the
// antithetic unit, so a pair shares one stream.
struct RngPolicy {
    std::uint64_t master_seed = 12345;
    bool antithetic = false;

    PathStream stream(std::uint64_t unit) const { return PathStream(master_seed, unit); }
};

}  // namespace levylmm
