#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "levylmm/common.hpp"
#include "levylmm/levy_driver.hpp"

namespace levylmm {

// ============================================================================
// Tenor structure, initial curve and volatility structure.
//
// Throughout, rate index i in 1..N refers to the forward LIBOR L(., T_i)
// accruing over [T_i, T_{i+1}]; arrays are sized N+2 and indexed 1-based so
// the code matches the usual LMM notation. T_0 = 0 and T_{N+1} is the
// terminal date whose bond is the numeraire.
// ============================================================================

class TenorStructure {
  public:
    // dates must start at 0 and be strictly increasing; needs >= 2 entries.
    explicit TenorStructure(std::vector<double> dates) : dates_(std::move(dates)) {
        if (dates_.size() < 2)
            throw std::invalid_argument("TenorStructure: need at least two dates");
        if (dates_.front() != 0.0)
            throw std::invalid_argument("TenorStructure: T_0 must be 0");
        for (std::size_t i = 1; i < dates_.size(); ++i)
            if (!(dates_[i] > dates_[i - 1]))
                throw std::invalid_argument("TenorStructure: dates must be strictly increasing");
    }

    static TenorStructure regular(int n_rates, double accrual) {
        if (n_rates < 0 || !(accrual > 0.0))
            throw std::invalid_argument("TenorStructure::regular: bad arguments");
        std::vector<double> dates(std::size_t(n_rates) + 2);
        for (std::size_t i = 0; i < dates.size(); ++i) dates[i] = double(i) * accrual;
        return TenorStructure(std::move(dates));
    }

    int n_rates() const { return int(dates_.size()) - 2; }
    double date(int i) const { return dates_[std::size_t(i)]; }
    double terminal_date() const { return dates_.back(); }
    double accrual(int i) const { return dates_[std::size_t(i) + 1] - dates_[std::size_t(i)]; }

  private:
    std::vector<double> dates_;  // T_0 .. T_{N+1}
};

// w = delta*L / (1 + delta*L), the state weight entering every drift formula.
inline double libor_weight(double rate_value, double accrual) {
    const double x = accrual * rate_value;
    if (!(1.0 + x > 0.0))
        throw std::domain_error(strfmt("libor_weight: 1 + delta*L = %.6g must be positive",
                                       1.0 + x));
    return x / (1.0 + x);
}

class InitialCurve {
  public:
    // discounts[i] = B(0, T_i) for i = 1..N+1; must be positive and strictly
    // decreasing, otherwise the implied forwards are not all positive.
    static InitialCurve from_discounts(const TenorStructure& tenor, std::vector<double> discounts) {
        const int n = tenor.n_rates();
        if (int(discounts.size()) != n + 1)
            throw std::invalid_argument("InitialCurve: need N+1 discount factors");
        for (int i = 0; i < n + 1; ++i) {
            if (!(discounts[std::size_t(i)] > 0.0))
                throw std::invalid_argument("InitialCurve: discount factors must be positive");
            if (i > 0 && !(discounts[std::size_t(i)] < discounts[std::size_t(i) - 1]))
                throw std::invalid_argument(
                    "InitialCurve: discount factors must be strictly decreasing");
        }
        InitialCurve c;
        c.discounts_.assign(std::size_t(n) + 2, 0.0);
        c.forwards_.assign(std::size_t(n) + 1, 0.0);
        for (int i = 1; i <= n + 1; ++i) c.discounts_[std::size_t(i)] = discounts[std::size_t(i - 1)];
        for (int i = 1; i <= n; ++i) {
            const double ratio = c.discounts_[std::size_t(i)] / c.discounts_[std::size_t(i) + 1];
            c.forwards_[std::size_t(i)] = (ratio - 1.0) / tenor.accrual(i);
        }
        return c;
    }

    // B(0, T_i) = exp(-r * T_i), the flat curve used in the experiments.
    static InitialCurve flat_continuous(const TenorStructure& tenor, double rate) {
        std::vector<double> d(std::size_t(tenor.n_rates()) + 1);
        for (int i = 1; i <= tenor.n_rates() + 1; ++i)
            d[std::size_t(i - 1)] = std::exp(-rate * tenor.date(i));
        return from_discounts(tenor, std::move(d));
    }

    double discount(int i) const { return discounts_[std::size_t(i)]; }
    double forward(int i) const { return forwards_[std::size_t(i)]; }

  private:
    std::vector<double> discounts_;  // index 1..N+1
    std::vector<double> forwards_;   // index 1..N
};

inline InitialCurve initial_forward_rates(const TenorStructure& tenor,
                                          std::vector<double> discounts) {
    return InitialCurve::from_discounts(tenor, std::move(discounts));
}

// Piecewise-constant loadings: one value per (tenor interval, rate), zero once
// the rate has expired. lambda(s, T_i) is looked up on the interval containing
// s, with s = T_k belonging to [T_k, T_{k+1}).
class VolatilityStructure {
  public:
    VolatilityStructure(const TenorStructure& tenor, std::vector<std::vector<double>> table)
        : n_(tenor.n_rates()), table_(std::move(table)) {
        if (int(table_.size()) != n_ + 1)
            throw std::invalid_argument("VolatilityStructure: need N+1 interval rows");
        for (auto& row : table_)
            if (int(row.size()) != n_ + 1)
                throw std::invalid_argument("VolatilityStructure: rows must have N+1 entries");
        for (int k = 0; k <= n_; ++k)
            for (int i = 1; i <= n_; ++i)
                if (k >= i) table_[std::size_t(k)][std::size_t(i)] = 0.0;  // dead beyond T_i
    }

    static VolatilityStructure flat(const TenorStructure& tenor, double lambda) {
        const int n = tenor.n_rates();
        std::vector<std::vector<double>> t(std::size_t(n) + 1,
                                           std::vector<double>(std::size_t(n) + 1, lambda));
        return VolatilityStructure(tenor, std::move(t));
    }

    // Value on tenor interval k (covering [T_k, T_{k+1})) for rate i.
    double on_interval(int k, int i) const {
        if (k < 0 || k > n_ || i < 1 || i > n_) return 0.0;
        return table_[std::size_t(k)][std::size_t(i)];
    }

    double value(const TenorStructure& tenor, double s, int i) const {
        if (i < 1 || i > n_ || s > tenor.date(i)) return 0.0;
        int k = 0;
        while (k + 1 <= n_ && s >= tenor.date(k + 1)) ++k;
        return on_interval(k, i);
    }

    int n_rates() const { return n_; }

  private:
    int n_;
    std::vector<std::vector<double>> table_;  // [interval 0..N][rate 1..N]
};

struct MarketModel {
    TenorStructure tenor;
    InitialCurve curve;
    VolatilityStructure vols;
    LevyDriverSpec driver;

    int n_rates() const { return tenor.n_rates(); }

    double initial_weight(int i) const {
        return libor_weight(curve.forward(i), tenor.accrual(i));
    }
};

// ============================================================================
// Model validation: report style, one entry per condition.
// ============================================================================

struct ValidationItem {
    std::string code;
    bool pass;
    double slack;  // condition-specific margin; NaN when meaningless
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationItem> items;

    bool ok() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }

    const ValidationItem* find(const std::string& code) const {
        for (const auto& it : items)
            if (it.code == code) return &it;
        return nullptr;
    }

    std::string to_text() const {
        std::string out;
        for (const auto& it : items) {
            out += it.pass ? "PASS " : "FAIL ";
            out += it.code;
            if (std::isfinite(it.slack)) out += strfmt(" slack=%.6g", it.slack);
            if (!it.message.empty()) out += "  (" + it.message + ")";
            out += "\n";
        }
        return out;
    }
};

// Raw inputs so that validation can report violations that the typed
// constructors would reject outright.
struct ModelInputs {
    std::vector<double> tenor_dates;             // T_0 .. T_{N+1}
    std::vector<double> discounts;               // B(0,T_1) .. B(0,T_{N+1})
    std::vector<std::vector<double>> vol_table;  // [interval][rate], 1-based rates
    NigParams nig = NigParams::standardized();
    double diffusion_c = 0.0;
};

inline ValidationReport validate_model(const ModelInputs& in) {
    ValidationReport rep;
    const double nan = std::nan("");

    const int n = int(in.tenor_dates.size()) - 2;
    rep.items.push_back({"tenor_nonempty", n >= 1, double(n),
                         n >= 1 ? "" : "empty tenor: no simulatable rates"});

    bool increasing = in.tenor_dates.size() >= 2 && in.tenor_dates.front() == 0.0;
    for (std::size_t i = 1; increasing && i < in.tenor_dates.size(); ++i)
        if (!(in.tenor_dates[i] > in.tenor_dates[i - 1])) increasing = false;
    rep.items.push_back({"tenor_increasing", increasing, nan,
                         increasing ? "" : "tenor dates must start at 0 and increase"});

    bool driver_ok = true;
    std::string driver_msg;
    try {
        in.nig.validate();
        if (in.diffusion_c < 0.0) throw std::invalid_argument("diffusion must be >= 0");
    } catch (const std::exception& e) {
        driver_ok = false;
        driver_msg = e.what();
    }
    rep.items.push_back({"driver_params", driver_ok, nan, driver_msg});

    // (LR2): strictly positive, strictly decreasing initial term structure.
    bool lr2 = int(in.discounts.size()) == n + 1 && n >= 1;
    for (std::size_t i = 0; lr2 && i < in.discounts.size(); ++i) {
        if (!(in.discounts[i] > 0.0)) lr2 = false;
        if (i > 0 && !(in.discounts[i] < in.discounts[i - 1])) lr2 = false;
    }
    rep.items.push_back({"LR2", lr2, nan,
                         lr2 ? "" : "discount curve not strictly positive and decreasing"});

    // (LR1): sum_i |lambda(s, T_i)| <= M at all tenor dates and midpoints.
    // Loadings are piecewise constant on tenor intervals, so this grid is
    // exhaustive for the supported representation.
    bool lr1 = true;
    double max_sum = 0.0;
    const double M = driver_ok ? in.nig.alpha : 0.0;
    if (n >= 1 && increasing && int(in.vol_table.size()) == n + 1) {
        for (int k = 0; k <= n; ++k) {
            double sum = 0.0;
            for (int i = 1; i <= n; ++i) {
                if (k >= i) continue;  // rate dead on [T_k, T_{k+1})
                if (int(in.vol_table[std::size_t(k)].size()) != n + 1) {
                    lr1 = false;
                    break;
                }
                sum += std::abs(in.vol_table[std::size_t(k)][std::size_t(i)]);
            }
            max_sum = std::max(max_sum, sum);
        }
        lr1 = lr1 && max_sum <= M;
    } else {
        lr1 = false;
    }
    rep.items.push_back({"LR1", lr1, M - max_sum,
                         lr1 ? "" : strfmt("sum |lambda| = %.6g exceeds bound M = %.6g",
                                           max_sum, M)});
    return rep;
}

inline ModelInputs model_inputs_from(const MarketModel& m) {
    ModelInputs in;
    const int n = m.n_rates();
    in.tenor_dates.resize(std::size_t(n) + 2);
    for (int i = 0; i <= n + 1; ++i) in.tenor_dates[std::size_t(i)] = m.tenor.date(i);
    in.discounts.resize(std::size_t(n) + 1);
    for (int i = 1; i <= n + 1; ++i) in.discounts[std::size_t(i - 1)] = m.curve.discount(i);
    in.vol_table.assign(std::size_t(n) + 1, std::vector<double>(std::size_t(n) + 1, 0.0));
    for (int k = 0; k <= n; ++k)
        for (int i = 1; i <= n; ++i)
            in.vol_table[std::size_t(k)][std::size_t(i)] = m.vols.on_interval(k, i);
    in.nig = m.driver.nig;
    in.diffusion_c = m.driver.c;
    return in;
}

inline ValidationReport validate_model(const MarketModel& m) {
    return validate_model(model_inputs_from(m));
}

// The paper's flat test bed: N rates on a delta grid, B(0,T) = exp(-r T),
// constant loading lambda, standardized NIG driver.
inline MarketModel make_flat_model(int n_rates, double accrual, double curve_rate,
                                   double lambda, const NigParams& nig,
                                   double diffusion_c = 0.0) {
    TenorStructure tenor = TenorStructure::regular(n_rates, accrual);
    InitialCurve curve = InitialCurve::flat_continuous(tenor, curve_rate);
    VolatilityStructure vols = VolatilityStructure::flat(tenor, lambda);
    LevyDriverSpec driver = LevyDriverSpec::nig_driver(nig, diffusion_c);
    return MarketModel{std::move(tenor), std::move(curve), std::move(vols), driver};
}

}  // namespace levylmm
