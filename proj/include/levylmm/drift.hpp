#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "levylmm/common.hpp"
#include "levylmm/levy_driver.hpp"

namespace levylmm {

// ============================================================================
// Terminal-measure drift of the log-LIBOR rates.
//
// For rate i with subsequent loadings lambda_l and state weights
// w_l = delta_l L_l / (1 + delta_l L_l), l = i+1..N, the jump part is
//
//   A = int ( (e^{lambda_i x} - 1) prod_l (1 + w_l (e^{lambda_l x} - 1))
//             - lambda_i x ) F(dx),
//
// an N-th order polynomial in the weights with 2^{N-i} expansion terms.
// Expanding the product over subsets and applying inclusion-exclusion turns
// every term into a signed combination of jump cumulants, so A is evaluated
// exactly without quadrature. Truncating the elementary-symmetric expansion
// at degree one or two gives the linear- and quadratic-cost approximations;
// their errors are O(N ||L||^2) and O(N^2 ||L||^3).
//
// The total drift is  b = -lambda_i^2 c/2 - c lambda_i sum_l w_l lambda_l - A.
// ============================================================================

enum class DriftMode { Full, FirstOrder, SecondOrder, Frozen };

inline const char* to_string(DriftMode m) {
    switch (m) {
        case DriftMode::Full: return "full";
        case DriftMode::FirstOrder: return "first_order";
        case DriftMode::SecondOrder: return "second_order";
        case DriftMode::Frozen: return "frozen";
    }
    return "?";
}

// Operation counters for the cost-scaling experiments. Cumulant evaluations
// are counted per literal call with no memoization; multiply-adds count the
// weight/cumulant combining operations.
struct DriftCost {
    std::uint64_t cumulant_evals = 0;
    std::uint64_t multiply_adds = 0;

    DriftCost& operator+=(const DriftCost& o) {
        cumulant_evals += o.cumulant_evals;
        multiply_adds += o.multiply_adds;
        return *this;
    }
};

struct DriftInputs {
    double lambda_i = 0.0;        // loading of the rate being evolved
    std::vector<double> lambdas;  // lambda_l for l = i+1..N
    std::vector<double> weights;  // w_l, in [0, 1)
    double c = 0.0;               // diffusion coefficient
    const LevyDriverSpec* driver = nullptr;
};

inline constexpr int kFullDriftSubsetCap = 25;

// ----------------------------------------------------------------------------
// Elementary symmetric polynomials, stable Newton-triangle recurrence, O(N k).
// ----------------------------------------------------------------------------

inline std::vector<double> elementary_symmetric_all(std::span<const double> values, int kmax) {
    if (kmax < 0 || kmax > int(values.size()))
        throw std::out_of_range("elementary_symmetric: degree out of range");
    std::vector<double> e(std::size_t(kmax) + 1, 0.0);
    e[0] = 1.0;
    int count = 0;
    for (double v : values) {
        ++count;
        for (int j = std::min(kmax, count); j >= 1; --j)
            e[std::size_t(j)] += v * e[std::size_t(j) - 1];
    }
    return e;
}

inline double elementary_symmetric(std::span<const double> values, int k) {
    return elementary_symmetric_all(values, k)[std::size_t(k)];
}

// ----------------------------------------------------------------------------
// Literal evaluators. These realize the cost model exactly: the subset
// expansion performs 2^{|S|+1} - 1 cumulant evaluations per subset S.
// ----------------------------------------------------------------------------

namespace detail {

inline double counted_kappa(const LevyDriverSpec& d, double z, DriftCost* cost) {
    if (cost) ++cost->cumulant_evals;
    return d.jump_cumulant(z);
}

inline double jump_full_impl(const LevyDriverSpec& driver, double lambda_i,
                             std::span<const double> lambdas, std::span<const double> weights,
                             DriftCost* cost, int subset_cap) {
    const int n = int(lambdas.size());
    if (int(weights.size()) != n)
        throw std::invalid_argument("jump_drift_full: lambdas/weights size mismatch");
    if (n > subset_cap)
        throw std::length_error(
            strfmt("jump_drift_full: %d subsequent rates exceed the subset cap %d "
                   "(2^n expansion)",
                   n, subset_cap));

    double total = counted_kappa(driver, lambda_i, cost);  // empty subset: kappa(lambda_i)
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double wprod = 1.0;
        for (int l = 0; l < n; ++l)
            if (mask & (1u << l)) wprod *= weights[std::size_t(l)];
        if (cost) cost->multiply_adds += std::popcount(mask);

        // J(S) = sum over sub-subsets U of S of
        //        (-1)^{|S|-|U|} [kappa(lambda_i + s_U) - kappa(s_U)].
        double j = 0.0;
        const int bits = std::popcount(mask);
        for (std::uint32_t sub = mask;; sub = (sub - 1) & mask) {
            double s = 0.0;
            for (int l = 0; l < n; ++l)
                if (sub & (1u << l)) s += lambdas[std::size_t(l)];
            double term = counted_kappa(driver, lambda_i + s, cost);
            if (sub != 0) term -= counted_kappa(driver, s, cost);
            const int sign = ((bits - std::popcount(sub)) & 1) ? -1 : 1;
            j += sign * term;
            if (cost) ++cost->multiply_adds;
            if (sub == 0) break;
        }
        total += wprod * j;
        if (cost) ++cost->multiply_adds;
    }
    return total;
}

inline double jump_first_impl(const LevyDriverSpec& driver, double lambda_i,
                              std::span<const double> lambdas, std::span<const double> weights,
                              DriftCost* cost) {
    double total = counted_kappa(driver, lambda_i, cost);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double bracket = counted_kappa(driver, lambda_i + lambdas[l], cost) -
                               counted_kappa(driver, lambda_i, cost) -
                               counted_kappa(driver, lambdas[l], cost);
        total += weights[l] * bracket;
        if (cost) cost->multiply_adds += 3;
    }
    return total;
}

inline double jump_second_impl(const LevyDriverSpec& driver, double lambda_i,
                               std::span<const double> lambdas, std::span<const double> weights,
                               DriftCost* cost) {
    double total = jump_first_impl(driver, lambda_i, lambdas, weights, cost);
    const std::size_t n = lambdas.size();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
            const double lk = lambdas[k], ll = lambdas[l];
            const double bracket = counted_kappa(driver, lambda_i + ll + lk, cost) -
                                   counted_kappa(driver, lambda_i + ll, cost) -
                                   counted_kappa(driver, lambda_i + lk, cost) -
                                   counted_kappa(driver, lk + ll, cost) +
                                   counted_kappa(driver, lambda_i, cost) +
                                   counted_kappa(driver, ll, cost) +
                                   counted_kappa(driver, lk, cost);
            total += weights[k] * weights[l] * bracket;
            if (cost) cost->multiply_adds += 9;
        }
    }
    return total;
}

inline double brownian_impl(double c, double lambda_i, std::span<const double> lambdas,
                            std::span<const double> weights) {
    if (c == 0.0) return 0.0;
    double cross = 0.0;
    for (std::size_t l = 0; l < lambdas.size(); ++l) cross += weights[l] * lambdas[l];
    return -0.5 * lambda_i * lambda_i * c - c * lambda_i * cross;
}

}  // namespace detail

inline double jump_drift_full(const DriftInputs& in, DriftCost* cost = nullptr,
                              int subset_cap = kFullDriftSubsetCap) {
    return detail::jump_full_impl(*in.driver, in.lambda_i, in.lambdas, in.weights, cost,
                                  subset_cap);
}

inline double jump_drift_first_order(const DriftInputs& in, DriftCost* cost = nullptr) {
    return detail::jump_first_impl(*in.driver, in.lambda_i, in.lambdas, in.weights, cost);
}

inline double jump_drift_second_order(const DriftInputs& in, DriftCost* cost = nullptr) {
    return detail::jump_second_impl(*in.driver, in.lambda_i, in.lambdas, in.weights, cost);
}

inline double brownian_drift(const DriftInputs& in) {
    return detail::brownian_impl(in.c, in.lambda_i, in.lambdas, in.weights);
}

// Frozen evaluates the Full formula; the caller supplies weights built from
// the initial rates, which makes the result deterministic and precomputable.
inline double total_drift(const DriftInputs& in, DriftMode mode, DriftCost* cost = nullptr,
                          int subset_cap = kFullDriftSubsetCap) {
    double jump = 0.0;
    switch (mode) {
        case DriftMode::Full:
        case DriftMode::Frozen:
            jump = jump_drift_full(in, cost, subset_cap);
            break;
        case DriftMode::FirstOrder:
            jump = jump_drift_first_order(in, cost);
            break;
        case DriftMode::SecondOrder:
            jump = jump_drift_second_order(in, cost);
            break;
    }
    return brownian_drift(in) - jump;
}

// Closed-form operation counts matching the literal evaluators; validated
// against the runtime counters in the unit tests.
inline DriftCost drift_cost_formula(DriftMode mode, int n) {
    DriftCost c;
    const auto un = std::uint64_t(n);
    switch (mode) {
        case DriftMode::Full:
        case DriftMode::Frozen: {
            std::uint64_t p3 = 1, p2 = 1;
            for (int k = 0; k < n; ++k) {
                p3 *= 3;
                p2 *= 2;
            }
            c.cumulant_evals = 2 * p3 - p2;  // sum over subsets of 2^{|S|+1} - 1
            c.multiply_adds = (n > 0 ? un * (p2 / 2) : 0) + (p2 - 1) + (p3 - 1);
            break;
        }
        case DriftMode::FirstOrder:
            c.cumulant_evals = 1 + 3 * un;
            c.multiply_adds = 3 * un;
            break;
        case DriftMode::SecondOrder:
            c.cumulant_evals = 1 + 3 * un + 7 * un * (un - 1) / 2;
            c.multiply_adds = 3 * un + 9 * un * (un - 1) / 2;
            break;
    }
    return c;
}

// ----------------------------------------------------------------------------
// Flat-loading fast path. When every live rate carries the same loading
// lambda, the subset combination for |S| = k depends only on k:
//
//   J_k = sum_{j=0}^{k} C(k,j) (-1)^{k-j} [kappa((j+1) lambda) - kappa(j lambda)]
//
// and  A = kappa(lambda) + sum_k eps_k(w) J_k  with eps_k the elementary
// symmetric polynomials of the weights. The truncated modes are literally the
// prefixes of this series, so one evaluator covers all four drift modes with
// O(N) work per rate after an O(N^2) table build.
// ----------------------------------------------------------------------------

class SymmetricCumulantTable {
  public:
    SymmetricCumulantTable(const LevyDriverSpec& driver, double lambda, int kmax,
                           DriftCost* cost = nullptr)
        : lambda_(lambda), j_(std::size_t(kmax) + 1, 0.0) {
        std::vector<double> kap(std::size_t(kmax) + 2);
        for (int j = 0; j <= kmax + 1; ++j)
            kap[std::size_t(j)] = detail::counted_kappa(driver, j * lambda, cost);
        kappa_self_ = kap[1];
        // Pascal triangle row by row; binomials stay exact well past the
        // magnitudes that matter (higher-order terms are damped by eps_k).
        std::vector<double> binom{1.0};
        for (int k = 1; k <= kmax; ++k) {
            binom.push_back(0.0);
            for (int j = k; j >= 1; --j) binom[std::size_t(j)] += binom[std::size_t(j) - 1];
            double jk = 0.0;
            for (int j = 0; j <= k; ++j) {
                const double diff = kap[std::size_t(j) + 1] - kap[std::size_t(j)];
                jk += (((k - j) & 1) ? -1.0 : 1.0) * binom[std::size_t(j)] * diff;
            }
            j_[std::size_t(k)] = jk;
        }
    }

    double lambda() const { return lambda_; }
    double kappa_self() const { return kappa_self_; }
    double j(int k) const { return j_[std::size_t(k)]; }
    int kmax() const { return int(j_.size()) - 1; }

  private:
    double lambda_;
    double kappa_self_;
    std::vector<double> j_;
};

// Evaluates the total drift for every live rate of one time interval, given a
// weight source. Uses the symmetric-polynomial fast path when the live
// loadings are all equal (the flat structure of the experiments), otherwise
// falls back to the literal evaluators.
class CurveDriftEvaluator {
  public:
    // lambda_by_rate is 1-based with size n_rates+1; entries for dead rates
    // must be zero. live_lo is the lowest rate still evolving.
    CurveDriftEvaluator(const LevyDriverSpec& driver, std::vector<double> lambda_by_rate,
                        int live_lo, DriftMode mode, DriftCost* cost = nullptr)
        : driver_(&driver),
          lambda_(std::move(lambda_by_rate)),
          lo_(live_lo),
          n_(int(lambda_.size()) - 1),
          mode_(mode),
          cost_(cost) {
        flat_ = true;
        for (int i = lo_; i <= n_; ++i)
            if (lambda_[std::size_t(i)] != lambda_[std::size_t(lo_)]) flat_ = false;
        if (flat_ && lo_ <= n_)
            table_.emplace(driver, lambda_[std::size_t(lo_)], n_ - lo_, cost);
    }

    int live_lo() const { return lo_; }
    int n_rates() const { return n_; }
    bool flat() const { return flat_; }
    double lambda(int i) const { return lambda_[std::size_t(i)]; }

    // Incremental decreasing-maturity sweep: drift(i) may be called once the
    // suffix holds exactly the weights of rates i+1..N. The cost sink is
    // per-sweep so concurrent sweeps over one evaluator never share state.
    class Sweep {
      public:
        explicit Sweep(const CurveDriftEvaluator& e, DriftCost* cost = nullptr)
            : e_(e), cost_(cost ? cost : e.cost_) {
            if (e_.flat_) {
                eps_.assign(std::size_t(e_.n_ - e_.lo_) + 1, 0.0);
                eps_[0] = 1.0;
            }
        }

        double drift(int i) {
            const double li = e_.lambda_[std::size_t(i)];
            const double c = e_.driver_->c;
            if (e_.flat_) {
                const auto& t = *e_.table_;
                int cap = count_;
                if (e_.mode_ == DriftMode::FirstOrder) cap = std::min(cap, 1);
                if (e_.mode_ == DriftMode::SecondOrder) cap = std::min(cap, 2);
                double jump = t.kappa_self();
                for (int k = 1; k <= cap; ++k) jump += t.j(k) * eps_[std::size_t(k)];
                double b = -jump;
                if (c > 0.0) b += -0.5 * li * li * c - c * li * (li * eps_[1]);
                return b;
            }
            DriftInputs in;
            in.lambda_i = li;
            in.lambdas = lam_suffix_;
            in.weights = w_suffix_;
            in.c = c;
            in.driver = e_.driver_;
            return total_drift(in, e_.mode_, cost_);
        }

        void push(int i, double w) {
            if (e_.flat_) {
                ++count_;
                for (int k = std::min(count_, int(eps_.size()) - 1); k >= 1; --k)
                    eps_[std::size_t(k)] += w * eps_[std::size_t(k) - 1];
            } else {
                lam_suffix_.insert(lam_suffix_.begin(), e_.lambda_[std::size_t(i)]);
                w_suffix_.insert(w_suffix_.begin(), w);
            }
        }

      private:
        const CurveDriftEvaluator& e_;
        DriftCost* cost_;
        std::vector<double> eps_;
        int count_ = 0;
        std::vector<double> lam_suffix_;
        std::vector<double> w_suffix_;
    };

    // b[i] for i in [live_lo..N] from weights w[i]; both arrays 1-based.
    void evaluate(std::span<const double> w, std::span<double> b,
                  DriftCost* cost = nullptr) const {
        Sweep sweep(*this, cost);
        for (int i = n_; i >= lo_; --i) {
            b[std::size_t(i)] = sweep.drift(i);
            sweep.push(i, w[std::size_t(i)]);
        }
    }

  private:
    const LevyDriverSpec* driver_;
    std::vector<double> lambda_;
    int lo_;
    int n_;
    DriftMode mode_;
    bool flat_ = false;
    std::optional<SymmetricCumulantTable> table_;
    DriftCost* cost_;
};

}  // namespace levylmm
