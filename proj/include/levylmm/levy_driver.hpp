#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "levylmm/common.hpp"
#include "levylmm/nig.hpp"
#include "levylmm/rng.hpp"

namespace levylmm {

// ============================================================================
// Driving process: local characteristics (b, c, F) with b fixed so the driver
// is a martingale under the terminal measure, plus the cumulant machinery the
// drift formulas consume. Currently NIG jumps plus an optional Brownian
// component with diffusion coefficient c >= 0.
// ============================================================================

struct LevyDriverSpec {
    enum class Kind { Nig };

    Kind kind = Kind::Nig;
    NigParams nig = NigParams::standardized();
    double c = 0.0;          // diffusion coefficient c_s; 0 for pure-jump NIG
    double em_bound_M = 12.0;  // exponential-moment bound; equals alpha for NIG

    static LevyDriverSpec nig_driver(const NigParams& p, double diffusion = 0.0) {
        p.validate();
        if (diffusion < 0.0)
            throw std::invalid_argument("LevyDriverSpec: diffusion coefficient must be >= 0");
        return LevyDriverSpec{Kind::Nig, p, diffusion, p.alpha};
    }

    // Strict bound: arguments must satisfy |u| <= M and |beta + u| <= alpha.
    void check_domain(double u) const {
        if (std::abs(u) > em_bound_M)
            throw CumulantDomainError(
                strfmt("cumulant argument %.6g outside [-M, M] with M = %.6g", u, em_bound_M));
        if (std::abs(nig.beta + u) > nig.alpha)
            throw CumulantDomainError(
                strfmt("cumulant argument %.6g shifts outside NIG domain (alpha = %.6g)", u,
                       nig.alpha));
    }

    // Compensated jump cumulant: integral of (e^{ux} - 1 - ux) F(dx).
    double jump_cumulant(double u) const {
        check_domain(u);
        return nig_cumulant(nig, u) - nig_mean(nig) * u;
    }

    // Full driver cumulant c*u^2/2 + jump part; kappa(0) = 0, kappa'(0) = 0.
    double cumulant(double u) const { return 0.5 * c * u * u + jump_cumulant(u); }

    double variance_rate() const { return c + nig_variance(nig); }

    double levy_density(double x) const { return nig_levy_density(nig, x); }

    // Martingale increment over dt: compensated NIG jump part plus the
    // Brownian component when c > 0.
    double sample_increment(double dt, const IncrementDraws& d, bool antithetic = false) const {
        double inc = sample_nig_increment(nig, dt, d, antithetic) - nig_mean(nig) * dt;
        if (c > 0.0) {
            const double z = antithetic ? -d.z_diffusion() : d.z_diffusion();
            inc += std::sqrt(c * dt) * z;
        }
        return inc;
    }
};

// ============================================================================
// Quadrature over the Levy measure on R \ {0}.
//
// The NIG density has an |x|^{-2} singularity at zero, so a ball [-r, r] is
// excluded from the node set and its contribution is restored analytically:
// for integrands that are O(x^2) at zero,
//
//     int_{|x|<=r} g(x) F(dx)  ~=  g''(0)/2 * int_{|x|<=r} x^2 F(dx),
//
// where the small-jump mass uses x^2 F(x) -> (delta_bar/pi) e^{beta x}. The
// outer part is adaptive Gauss-Kronrod refined against a family of cumulant-
// type test integrands, then frozen into plain nodes and density weights.
// ============================================================================

struct QuadratureOptions {
    double inner_radius = 1e-6;
    double truncation_radius = 0.0;  // 0 picks 400 / em_bound_M
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

class LevyMeasureQuadrature {
  public:
    explicit LevyMeasureQuadrature(const LevyDriverSpec& spec, QuadratureOptions opts = {})
        : spec_(spec), opts_(opts) {
        if (opts_.truncation_radius <= 0.0)
            opts_.truncation_radius = 400.0 / spec.em_bound_M;
        build();
    }

    // Sum of w_j * f(x_j) over the frozen nodes plus the inner-ball term.
    // Precondition: f is O(x^2) near zero and grows slower than e^{M|x|}.
    template <typename F>
    double integrate(F&& f) const {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            if (weights_[j] != 0.0) acc += (long double)(weights_[j] * f(nodes_[j]));
        }
        const double h = 1e-3;  // curvature probe; g(0) = g'(0) = 0 by precondition
        const double second_deriv = (f(h) + f(-h)) / (h * h);
        acc += (long double)(0.5 * second_deriv * inner_mass2_);
        return double(acc);
    }

    bool converged() const { return converged_; }
    std::size_t node_count() const { return nodes_.size(); }
    double inner_radius() const { return opts_.inner_radius; }
    double truncation_radius() const { return opts_.truncation_radius; }

  private:
    // 15-point Kronrod / 7-point Gauss pairs: node, G7 weight, K15 weight.
    static constexpr double kNw[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0, 0.204432940075298},
        {0.586087235467691, 0.0, 0.169004726639267},
        {0.864864423359769, 0.0, 0.104790010322250},
        {0.991455371120813, 0.0, 0.022935322010529},
    };

    struct Interval {
        double a, b;
        std::vector<double> xs;    // 15 abscissae
        std::vector<double> dens;  // density at abscissae
        std::vector<double> k15;   // per test integrand
        std::vector<double> err;   // |K15 - G7| per test integrand
    };

    void build() {
        const double r = opts_.inner_radius;
        const double R = opts_.truncation_radius;
        const double M = spec_.em_bound_M;

        // Cumulant-type probes spanning the admissible growth range, plus x^2.
        std::vector<double> exps = {0.9 * M, -0.9 * M, 0.45 * M, -0.45 * M, 0.1 * M, -0.1 * M};
        const std::size_t n_tests = exps.size() + 1;
        auto test_fn = [&](std::size_t t, double x) -> double {
            if (t < exps.size()) {
                const double z = exps[t];
                return std::expm1(z * x) - z * x;
            }
            return x * x;
        };

        // Geometric seed intervals on both sides of the excluded ball.
        std::vector<Interval> ivs;
        for (int side = 0; side < 2; ++side) {
            double lo = r;
            while (lo < R) {
                double hi = std::min(lo * 10.0, R);
                Interval iv;
                iv.a = side == 0 ? lo : -hi;
                iv.b = side == 0 ? hi : -lo;
                ivs.push_back(iv);
                lo = hi;
            }
        }

        auto evaluate = [&](Interval& iv) {
            const double mid = 0.5 * (iv.a + iv.b);
            const double half = 0.5 * (iv.b - iv.a);
            iv.xs.assign(15, 0.0);
            iv.dens.assign(15, 0.0);
            int k = 0;
            for (int i = 0; i < 8; ++i) {
                iv.xs[k++] = mid + half * kNw[i][0];
                if (i > 0) iv.xs[k++] = mid - half * kNw[i][0];
            }
            for (int j = 0; j < 15; ++j) iv.dens[j] = spec_.levy_density(iv.xs[j]);
            iv.k15.assign(n_tests, 0.0);
            iv.err.assign(n_tests, 0.0);
            for (std::size_t t = 0; t < n_tests; ++t) {
                double k15 = 0.0, g7 = 0.0;
                int idx = 0;
                for (int i = 0; i < 8; ++i) {
                    double y = test_fn(t, iv.xs[idx]) * iv.dens[idx];
                    ++idx;
                    if (i > 0) {
                        y += test_fn(t, iv.xs[idx]) * iv.dens[idx];
                        ++idx;
                    }
                    k15 += kNw[i][2] * y;
                    g7 += kNw[i][1] * y;
                }
                iv.k15[t] = half * k15;
                iv.err[t] = half * std::abs(k15 - g7);
            }
        };

        for (auto& iv : ivs) evaluate(iv);

        auto done = [&]() {
            for (std::size_t t = 0; t < n_tests; ++t) {
                double total = 0.0, err = 0.0;
                for (const auto& iv : ivs) {
                    total += iv.k15[t];
                    err += iv.err[t];
                }
                if (err > opts_.rel_tol * std::max(std::abs(total), 1e-6)) return false;
            }
            return true;
        };

        while (!done() && int(ivs.size()) < opts_.max_intervals) {
            std::size_t worst = 0;
            double worst_err = -1.0;
            for (std::size_t i = 0; i < ivs.size(); ++i) {
                double e = 0.0;
                for (std::size_t t = 0; t < n_tests; ++t) e += ivs[i].err[t];
                if (e > worst_err) {
                    worst_err = e;
                    worst = i;
                }
            }
            const double a = ivs[worst].a, b = ivs[worst].b, m = 0.5 * (a + b);
            ivs[worst].a = a;
            ivs[worst].b = m;
            evaluate(ivs[worst]);
            Interval right;
            right.a = m;
            right.b = b;
            evaluate(right);
            ivs.push_back(std::move(right));
        }
        converged_ = done();

        std::sort(ivs.begin(), ivs.end(),
                  [](const Interval& l, const Interval& rgt) { return l.a < rgt.a; });
        nodes_.clear();
        weights_.clear();
        for (const auto& iv : ivs) {
            const double half = 0.5 * (iv.b - iv.a);
            int idx = 0;
            for (int i = 0; i < 8; ++i) {
                nodes_.push_back(iv.xs[idx]);
                weights_.push_back(half * kNw[i][2] * iv.dens[idx]);
                ++idx;
                if (i > 0) {
                    nodes_.push_back(iv.xs[idx]);
                    weights_.push_back(half * kNw[i][2] * iv.dens[idx]);
                    ++idx;
                }
            }
        }

        // Mass of x^2 F(dx) on the excluded ball, exact to O(r^3 log r).
        const double br = spec_.nig.beta * r;
        double integral_exp;  // int_{-r}^{r} e^{beta x} dx
        if (std::abs(br) < 1e-8) {
            integral_exp = 2.0 * r * (1.0 + br * br / 6.0);
        } else {
            integral_exp = (std::exp(br) - std::exp(-br)) / spec_.nig.beta;
        }
        static constexpr double inv_pi = 0.3183098861837907;
        inner_mass2_ = spec_.nig.delta_bar * inv_pi * integral_exp;
    }

    LevyDriverSpec spec_;
    QuadratureOptions opts_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    double inner_mass2_ = 0.0;
    bool converged_ = false;
};

// Oracle entry point: integrates against a freshly built node set and refuses
// to return an unconverged value.
template <typename F>
double jump_integral_quadrature(const LevyDriverSpec& spec, F&& integrand,
                                QuadratureOptions opts = {}) {
    LevyMeasureQuadrature quad(spec, opts);
    if (!quad.converged())
        throw QuadratureError("jump_integral_quadrature: node refinement failed to stabilise");
    return quad.integrate(std::forward<F>(integrand));
}

}  // namespace levylmm
