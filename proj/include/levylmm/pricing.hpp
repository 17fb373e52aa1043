#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levylmm/common.hpp"
#include "levylmm/drift.hpp"
#include "levylmm/market_model.hpp"

namespace levylmm {

// ============================================================================
// Payoff evaluation under the terminal measure. Every payoff observed at T_e
// is discounted with the numeraire change
//
//     dP_{T_{e+1}} / dP_{T_*}  ~  prod_{l=e+1}^{N} (1 + delta_l L(T_e, T_l)),
//
// so the per-path values below are plain P_{T_*}-expectations scaled by
// B(0, T_*): their Monte Carlo mean is the time-0 price.
// ============================================================================

// Snapshot of the surviving curve at one expiry.
struct TerminalCurve {
    int expiry = 0;                     // index e; rates valid for l >= e
    std::vector<double> rates;          // [l] = L(T_e, T_l), 1-based, size N+1
    std::vector<double> suffix_growth;  // [k] = prod_{l=k}^{N} (1 + delta_l rates[l]), size N+2

    double rate(int l) const { return rates[std::size_t(l)]; }
    double growth_from(int k) const { return suffix_growth[std::size_t(k)]; }
};

inline void fill_terminal_curve(const MarketModel& model, int expiry,
                                std::span<const double> log_rates, TerminalCurve& tc) {
    const int n = model.n_rates();
    tc.expiry = expiry;
    tc.rates.assign(std::size_t(n) + 1, 0.0);
    tc.suffix_growth.assign(std::size_t(n) + 2, 1.0);
    for (int l = n; l >= expiry; --l) {
        tc.rates[std::size_t(l)] = std::exp(log_rates[std::size_t(l)]);
        tc.suffix_growth[std::size_t(l)] =
            tc.suffix_growth[std::size_t(l) + 1] *
            (1.0 + model.tenor.accrual(l) * tc.rates[std::size_t(l)]);
    }
}

inline TerminalCurve make_terminal_curve(const MarketModel& model, int expiry,
                                         std::span<const double> log_rates) {
    TerminalCurve tc;
    fill_terminal_curve(model, expiry, log_rates, tc);
    return tc;
}

// Caplet on L(., T_i): delta_i B(0,T_*) prod_{l=i+1}^N (1+delta_l L) (L_i - K)^+.
inline double caplet_payoff(const MarketModel& model, const TerminalCurve& tc, int i, double K) {
    const double intrinsic = std::max(tc.rate(i) - K, 0.0);
    return model.tenor.accrual(i) * model.curve.discount(model.n_rates() + 1) *
           tc.growth_from(i + 1) * intrinsic;
}

// Payer swaption on the swap over [T_i, T_m], product form:
// B(0,T_*) ( -sum_{k=i}^{m} c_k prod_{l=k}^{N}(1+delta_l L) )^+ with
// c_i = -1, c_k = delta_k K for i < k < m, c_m = 1 + delta_m K.
inline double swaption_payoff(const MarketModel& model, const TerminalCurve& tc, int i, int m,
                              double K) {
    if (!(1 <= i && i < m && m <= model.n_rates()))
        throw std::invalid_argument("swaption_payoff: need 1 <= i < m <= N");
    double acc = tc.growth_from(i);  // -c_i * Pi_i
    for (int k = i + 1; k < m; ++k) acc -= model.tenor.accrual(k) * K * tc.growth_from(k);
    acc -= (1.0 + model.tenor.accrual(m) * K) * tc.growth_from(m);
    return model.curve.discount(model.n_rates() + 1) * std::max(acc, 0.0);
}

// Same contract through the coupon-bond form of the time-T_i value,
// (1 - sum_k c_k B(T_i,T_k))^+, carried to time 0 with the numeraire factor.
// Agrees with swaption_payoff path by path; kept as an index-convention check.
inline double swaption_payoff_bond_form(const MarketModel& model, const TerminalCurve& tc, int i,
                                        int m, double K) {
    if (!(1 <= i && i < m && m <= model.n_rates()))
        throw std::invalid_argument("swaption_payoff_bond_form: need 1 <= i < m <= N");
    const double pi_i = tc.growth_from(i);
    double bond = 0.0;
    for (int k = i + 1; k <= m; ++k) {
        const double coupon =
            (k == m) ? 1.0 + model.tenor.accrual(m) * K : model.tenor.accrual(k) * K;
        bond += coupon * tc.growth_from(k) / pi_i;  // B(T_i, T_k)
    }
    return model.curve.discount(model.n_rates() + 1) * pi_i * std::max(1.0 - bond, 0.0);
}

// FRA with strike K expiring at T_i, signed payoff:
// delta_i B(0,T_*) prod_{l=i+1}^N (1+delta_l L) (K - L_i). Zero in expectation
// when struck at the money, for any model.
inline double fra_payoff(const MarketModel& model, const TerminalCurve& tc, int i, double K) {
    return model.tenor.accrual(i) * model.curve.discount(model.n_rates() + 1) *
           tc.growth_from(i + 1) * (K - tc.rate(i));
}

// ============================================================================
// Black-76 reporting layer.
// ============================================================================

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865476); }

inline double black76_price(double forward, double strike, double vol, double expiry,
                            double annuity, bool call = true) {
    if (!(forward > 0.0) || !(strike > 0.0))
        throw std::invalid_argument("black76_price: forward and strike must be positive");
    const double intrinsic = call ? std::max(forward - strike, 0.0)
                                  : std::max(strike - forward, 0.0);
    if (vol <= 0.0 || expiry <= 0.0) return annuity * intrinsic;
    const double sd = vol * std::sqrt(expiry);
    const double d1 = std::log(forward / strike) / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    if (call) return annuity * (forward * normal_cdf(d1) - strike * normal_cdf(d2));
    return annuity * (strike * normal_cdf(-d2) - forward * normal_cdf(-d1));
}

inline double black76_vega(double forward, double strike, double vol, double expiry,
                           double annuity) {
    const double sd = vol * std::sqrt(expiry);
    const double d1 = std::log(forward / strike) / sd + 0.5 * sd;
    static constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return annuity * forward * std::sqrt(expiry) * inv_sqrt_2pi * std::exp(-0.5 * d1 * d1);
}

// Safeguarded Newton with bisection fallback on [1e-8, 5]; price tolerance
// 1e-12 relative to the forward bound, round-trip accurate to ~1e-10 in vol.
inline double black76_implied_vol(double price, double forward, double strike, double expiry,
                                  double annuity, bool call = true) {
    const double intrinsic =
        annuity * (call ? std::max(forward - strike, 0.0) : std::max(strike - forward, 0.0));
    const double upper = annuity * (call ? forward : strike);
    const double scale = std::max(upper, 1e-300);
    if (price < intrinsic - 1e-12 * scale || price > upper + 1e-12 * scale)
        throw std::domain_error(strfmt(
            "black76_implied_vol: price %.12g outside no-arbitrage bounds [%.12g, %.12g]",
            price, intrinsic, upper));
    if (price <= intrinsic + 1e-14 * scale) return 0.0;

    double lo = 1e-8, hi = 5.0;
    const double f_hi = black76_price(forward, strike, hi, expiry, annuity, call) - price;
    if (f_hi < 0.0)
        throw std::domain_error("black76_implied_vol: price above the vol bracket [1e-8, 5]");

    double v = 0.2;
    for (int it = 0; it < 200; ++it) {
        const double f = black76_price(forward, strike, v, expiry, annuity, call) - price;
        if (std::abs(f) <= 1e-12 * scale) return v;
        if (f > 0.0)
            hi = v;
        else
            lo = v;
        if (hi - lo < 1e-11) return 0.5 * (lo + hi);  // vol-space convergence (tiny vega)
        const double vega = black76_vega(forward, strike, v, expiry, annuity);
        double next = v - f / vega;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        v = next;
    }
    return v;
}

// ============================================================================
// Products and estimates.
// ============================================================================

struct Product {
    enum class Kind { Caplet, Swaption, Fra };

    Kind kind = Kind::Caplet;
    int expiry = 1;     // caplet / FRA expiry index, swaption start index
    int end = 0;        // swaption end index, unused otherwise
    double strike = 0;

    static Product caplet(int expiry, double strike) {
        return Product{Kind::Caplet, expiry, 0, strike};
    }
    static Product swaption(int start, int end, double strike) {
        return Product{Kind::Swaption, start, end, strike};
    }
    static Product fra(int expiry, double strike) { return Product{Kind::Fra, expiry, 0, strike}; }

    const char* kind_name() const {
        switch (kind) {
            case Kind::Caplet: return "caplet";
            case Kind::Swaption: return "swaption";
            case Kind::Fra: return "fra";
        }
        return "?";
    }

    std::string label() const {
        if (kind == Kind::Swaption)
            return strfmt("swaption_%d_%d_K%.6g", expiry, end, strike);
        return strfmt("%s_%d_K%.6g", kind_name(), expiry, strike);
    }

    void validate(int n_rates) const {
        if (expiry < 1 || expiry > n_rates)
            throw std::invalid_argument(strfmt("product expiry index %d outside 1..%d", expiry,
                                               n_rates));
        if (kind == Kind::Swaption) {
            if (!(expiry < end && end <= n_rates))
                throw std::invalid_argument("swaption needs start < end <= N");
        }
        if (kind != Kind::Fra && !(strike > 0.0))
            throw std::invalid_argument("caplet/swaption strike must be positive");
    }
};

inline double atm_swap_rate(const MarketModel& model, int start, int end) {
    double annuity = 0.0;
    for (int k = start + 1; k <= end; ++k)
        annuity += model.tenor.accrual(k) * model.curve.discount(k);
    return (model.curve.discount(start) - model.curve.discount(end)) / annuity;
}

inline double atm_strike(const MarketModel& model, const Product& p) {
    if (p.kind == Product::Kind::Swaption) return atm_swap_rate(model, p.expiry, p.end);
    return model.curve.forward(p.expiry);
}

// Per-path payoff bound to its observation date; consumed by the simulation.
struct PathPayoff {
    std::string label;
    std::optional<Product> product;
    int expiry = 1;
    std::function<double(const MarketModel&, const TerminalCurve&)> eval;
};

inline PathPayoff make_payoff(const MarketModel& model, const Product& p) {
    p.validate(model.n_rates());
    PathPayoff pp;
    pp.label = p.label();
    pp.product = p;
    pp.expiry = p.expiry;
    switch (p.kind) {
        case Product::Kind::Caplet:
            pp.eval = [i = p.expiry, K = p.strike](const MarketModel& m, const TerminalCurve& tc) {
                return caplet_payoff(m, tc, i, K);
            };
            break;
        case Product::Kind::Swaption:
            pp.eval = [i = p.expiry, e = p.end, K = p.strike](const MarketModel& m,
                                                              const TerminalCurve& tc) {
                return swaption_payoff(m, tc, i, e, K);
            };
            break;
        case Product::Kind::Fra:
            pp.eval = [i = p.expiry, K = p.strike](const MarketModel& m, const TerminalCurve& tc) {
                return fra_payoff(m, tc, i, K);
            };
            break;
    }
    return pp;
}

struct McEstimate {
    std::string label;
    double price = 0.0;
    double std_error = 0.0;  // sample std of the independent units / sqrt(units)
    std::int64_t n_paths = 0;
    std::int64_t n_units = 0;  // antithetic pairs count once
    std::optional<double> implied_vol;
    std::string scheme;
    std::string mode;
    double wall_ms = 0.0;
    DriftCost cost;
};

// Black-76 implied vol in the model's reporting convention: caplets against
// (L(0,T_i), delta_i B(0,T_{i+1})), swaptions against the flat annuity and
// par swap rate. FRAs have no vol quote. Solver failures map to nullopt.
inline std::optional<double> implied_vol_for(const MarketModel& model, const Product& p,
                                             double price) {
    try {
        if (p.kind == Product::Kind::Caplet) {
            const int i = p.expiry;
            const double annuity = model.tenor.accrual(i) * model.curve.discount(i + 1);
            return black76_implied_vol(price, model.curve.forward(i), p.strike,
                                       model.tenor.date(i), annuity);
        }
        if (p.kind == Product::Kind::Swaption) {
            double annuity = 0.0;
            for (int k = p.expiry + 1; k <= p.end; ++k)
                annuity += model.tenor.accrual(k) * model.curve.discount(k);
            return black76_implied_vol(price, atm_swap_rate(model, p.expiry, p.end), p.strike,
                                       model.tenor.date(p.expiry), annuity);
        }
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace levylmm
