// Acceptance suite: one criterion per command-line argument (1..9), all of
// them when invoked without arguments. Prints one PASS/FAIL line per
// criterion and exits with the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "levylmm/harness.hpp"

using namespace levylmm;

namespace {

struct CheckContext {
    std::string detail;
    bool ok = true;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }

    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

MarketModel desk_model(int n = 20) {
    return make_flat_model(n, 0.5, 0.04, 0.18, NigParams::standardized(12.0));
}

// ----------------------------------------------------------------------------
// 1. Cumulant exactness.
// ----------------------------------------------------------------------------
bool criterion_1(CheckContext& ctx) {
    const NigParams paper = NigParams::standardized(12.0);
    ctx.require(nig_cumulant(paper, 0.0) == 0.0, "kappa(0) must be exactly 0");
    ctx.require(nig_variance(paper) == 1.0, "variance must be exactly 1");

    const LevyDriverSpec driver = LevyDriverSpec::nig_driver(paper);
    LevyMeasureQuadrature quad(driver);
    ctx.require(quad.converged(), "quadrature construction converged");
    for (double z : {0.18, 0.36}) {
        const double numeric =
            quad.integrate([z](double x) { return std::expm1(z * x) - z * x; });
        const double exact = nig_cumulant(paper, z);
        const double err = std::abs(numeric - exact);
        ctx.require(err <= 1e-8,
                    strfmt("quadrature kappa(%.2f): |err| = %.3e > 1e-8", z, err));
    }
    ctx.note(strfmt("kappa(0.18) = %.9f reproduced by %zu-node quadrature",
                    nig_cumulant(paper, 0.18), quad.node_count()));
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 2. Symmetric-polynomial product identity.
// ----------------------------------------------------------------------------
bool criterion_2(CheckContext& ctx) {
    std::mt19937 gen(20260810);
    std::uniform_real_distribution<double> unif(0.0, 0.05);
    std::uniform_int_distribution<int> len(1, 12);
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const int n = len(gen);
        std::vector<double> a(std::size_t(n), 0.0);
        for (auto& x : a) x = unif(gen);
        double prod = 1.0;
        for (double x : a) prod *= 1.0 + x;
        const auto eps = elementary_symmetric_all(a, n);
        double sum = 0.0;
        for (double e : eps) sum += e;
        worst = std::max(worst, std::abs(prod - sum) / std::abs(prod));
    }
    ctx.require(worst <= 1e-12, strfmt("worst relative identity error %.3e > 1e-12", worst));
    ctx.note(strfmt("1000 random vectors, worst relative error %.3e", worst));
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 3. Drift oracle equivalence and truncation ordering.
// ----------------------------------------------------------------------------
bool criterion_3(CheckContext& ctx) {
    const LevyDriverSpec driver = LevyDriverSpec::nig_driver(NigParams::standardized(12.0));
    LevyMeasureQuadrature quad(driver);
    const double lambda = 0.18;
    const double w_flat = libor_weight(2.0 * std::expm1(0.02), 0.5);

    double worst_quad = 0.0;
    for (int n = 1; n <= 8; ++n) {
        DriftInputs in;
        in.lambda_i = lambda;
        in.lambdas.assign(std::size_t(n), lambda);
        in.weights.assign(std::size_t(n), w_flat);
        in.driver = &driver;
        const double exact = jump_drift_full(in);
        const double numeric = quad.integrate([&](double x) {
            const double e1 = std::expm1(lambda * x);
            double prod = 1.0;
            for (int l = 0; l < n; ++l) prod *= 1.0 + w_flat * e1;
            return e1 * prod - lambda * x;
        });
        worst_quad = std::max(worst_quad, std::abs(exact - numeric));
    }
    ctx.require(worst_quad <= 1e-7,
                strfmt("full drift vs quadrature: worst |err| %.3e > 1e-7", worst_quad));

    std::mt19937 gen(31415);
    std::uniform_real_distribution<double> unif(0.0, 0.05);
    std::uniform_int_distribution<int> len(1, 8);
    bool ordering = true;
    for (int it = 0; it < 1000 && ordering; ++it) {
        const int n = len(gen);
        DriftInputs in;
        in.lambda_i = lambda;
        in.lambdas.assign(std::size_t(n), lambda);
        in.weights.assign(std::size_t(n), 0.0);
        for (auto& w : in.weights) w = unif(gen);
        in.driver = &driver;
        const double full = jump_drift_full(in);
        const double first = jump_drift_first_order(in);
        const double second = jump_drift_second_order(in);
        ordering = std::abs(second - full) <= std::abs(first - full) + 1e-18;
    }
    ctx.require(ordering, "|A'' - A| <= |A' - A| violated on a realistic instance");

    double worst_exact = 0.0;
    std::uniform_real_distribution<double> wdist(0.0, 0.05);
    for (int it = 0; it < 200; ++it) {
        for (int n : {1, 2}) {
            DriftInputs in;
            in.lambda_i = lambda;
            in.lambdas.assign(std::size_t(n), lambda);
            in.weights.assign(std::size_t(n), 0.0);
            for (auto& w : in.weights) w = wdist(gen);
            in.driver = &driver;
            const double full = jump_drift_full(in);
            if (n <= 1)
                worst_exact =
                    std::max(worst_exact, std::abs(jump_drift_first_order(in) - full));
            worst_exact =
                std::max(worst_exact, std::abs(jump_drift_second_order(in) - full));
        }
    }
    ctx.require(worst_exact <= 1e-12,
                strfmt("low-degree exactness: worst |err| %.3e > 1e-12", worst_exact));
    ctx.note(strfmt("quad err %.2e, degree-exactness err %.2e", worst_quad, worst_exact));
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 4. Martingale and ATM-FRA zero tests, every scheme, desk scale.
// ----------------------------------------------------------------------------
bool criterion_4(CheckContext& ctx) {
    const auto model = desk_model(20);
    std::vector<PathPayoff> payoffs;
    for (int i = 1; i <= 20; ++i)
        payoffs.push_back(
            make_payoff(model, Product::fra(i, atm_strike(model, Product::fra(i, 0)))));
    PathPayoff last_rate;
    last_rate.label = "last_rate";
    last_rate.expiry = 20;
    last_rate.eval = [](const MarketModel&, const TerminalCurve& tc) { return tc.rate(20); };
    payoffs.push_back(last_rate);

    for (Scheme scheme : {Scheme::Euler, Scheme::Picard, Scheme::PC, Scheme::IPC,
                          Scheme::PicardPC}) {
        RunConfig cfg;
        cfg.scheme = scheme;
        cfg.mode = DriftMode::SecondOrder;
        cfg.grid.steps_per_tenor = 5;
        cfg.n_paths = 500000;
        cfg.rng = RngPolicy{90210, true};
        const auto res = run_simulation(model, cfg, payoffs);

        const auto& mart = res.estimates.back();
        const double mart_err = std::abs(mart.price - model.curve.forward(20));
        ctx.require(mart_err <= 3.0 * mart.std_error,
                    strfmt("%s: martingale |err| %.3e > 3 SE (%.3e)", to_string(scheme),
                           mart_err, mart.std_error));

        double worst_ratio = 0.0;
        int worst_i = 0;
        for (int i = 0; i < 20; ++i) {
            const auto& e = res.estimates[std::size_t(i)];
            const double ratio = std::abs(e.price) / e.std_error;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst_i = i + 1;
            }
        }
        ctx.require(worst_ratio <= 3.0,
                    strfmt("%s: ATM FRA at maturity %d is %.2f SE from zero",
                           to_string(scheme), worst_i, worst_ratio));
    }
    ctx.note("N=20, 5 steps/tenor, 5e5 antithetic paths, second-order drift, all schemes");
    return ctx.ok;
}

// Shared helper for criteria 5 and 6: caplet strip implied vols under one
// (scheme, mode), common random numbers via the fixed seed.
struct CapletGrid {
    std::vector<int> maturity;  // parallel arrays
    std::vector<double> moneyness;
    std::vector<double> iv;
};

CapletGrid caplet_grid(const MarketModel& model, Scheme scheme, DriftMode mode,
                       std::uint64_t seed) {
    std::vector<PathPayoff> payoffs;
    CapletGrid grid;
    for (double f : {0.8, 1.0, 1.2}) {
        for (int i = 1; i <= model.n_rates(); ++i) {
            Product p = Product::caplet(i, f * model.curve.forward(i));
            payoffs.push_back(make_payoff(model, p));
            grid.maturity.push_back(i);
            grid.moneyness.push_back(f);
        }
    }
    RunConfig cfg;
    cfg.scheme = scheme;
    cfg.mode = mode;
    cfg.grid.steps_per_tenor = 5;
    cfg.n_paths = 50000;
    cfg.rng = RngPolicy{seed, false};
    const auto res = run_simulation(model, cfg, payoffs);
    for (const auto& e : res.estimates)
        grid.iv.push_back(e.implied_vol.value_or(std::nan("")));
    return grid;
}

double max_iv_diff_bp(const CapletGrid& a, const CapletGrid& b, int* arg_maturity = nullptr) {
    double worst = -1.0;
    for (std::size_t k = 0; k < a.iv.size(); ++k) {
        if (!std::isfinite(a.iv[k]) || !std::isfinite(b.iv[k])) return std::nan("");
        const double d = std::abs(a.iv[k] - b.iv[k]) / 1e-4;
        if (d > worst) {
            worst = d;
            if (arg_maturity) *arg_maturity = a.maturity[k];
        }
    }
    return worst;
}

// ----------------------------------------------------------------------------
// 5. Picard vs Euler caplet implied vols within 1 bp, mid-maturity peak.
// ----------------------------------------------------------------------------
bool criterion_5(CheckContext& ctx) {
    const auto model = desk_model(20);
    const std::uint64_t seed = 777001;
    const auto euler = caplet_grid(model, Scheme::Euler, DriftMode::Full, seed);
    const auto picard = caplet_grid(model, Scheme::Picard, DriftMode::Full, seed);

    int arg_mat = 0;
    const double worst = max_iv_diff_bp(euler, picard, &arg_mat);
    ctx.require(std::isfinite(worst), "implied vol inversion failed somewhere on the grid");
    ctx.require(worst < 1.0, strfmt("max |iv diff| %.4f bp >= 1 bp", worst));

    // Qualitative shape: the largest difference sits at an interior maturity.
    std::vector<double> per_maturity(std::size_t(model.n_rates()) + 1, 0.0);
    for (std::size_t k = 0; k < euler.iv.size(); ++k)
        per_maturity[std::size_t(euler.maturity[k])] =
            std::max(per_maturity[std::size_t(euler.maturity[k])],
                     std::abs(euler.iv[k] - picard.iv[k]) / 1e-4);
    int peak = 1;
    for (int i = 1; i <= model.n_rates(); ++i)
        if (per_maturity[std::size_t(i)] > per_maturity[std::size_t(peak)]) peak = i;
    ctx.require(peak > 2 && peak < model.n_rates() - 1,
                strfmt("difference peak at maturity %d is not interior", peak));
    ctx.note(strfmt("max |iv diff| = %.4f bp at maturity %d, peak maturity %d", worst, arg_mat,
                    peak));
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 6. Drift-expansion accuracy: second order indistinguishable, first order
//    in between.
// ----------------------------------------------------------------------------
bool criterion_6(CheckContext& ctx) {
    const auto model = desk_model(20);
    const std::uint64_t seed = 777002;
    const auto full = caplet_grid(model, Scheme::Euler, DriftMode::Full, seed);
    const auto second = caplet_grid(model, Scheme::Euler, DriftMode::SecondOrder, seed);
    const auto first = caplet_grid(model, Scheme::Euler, DriftMode::FirstOrder, seed);

    const double d2 = max_iv_diff_bp(full, second);
    const double d1 = max_iv_diff_bp(full, first);
    ctx.require(std::isfinite(d2) && std::isfinite(d1), "implied vol inversion failed");
    ctx.require(d2 < 0.1, strfmt("full vs second order: %.4f bp >= 0.1 bp", d2));
    ctx.require(d1 > d2, strfmt("first order (%.4f bp) not above second order (%.4f bp)", d1, d2));
    ctx.require(d1 < 1.0, strfmt("full vs first order: %.4f bp >= 1 bp", d1));
    ctx.note(strfmt("max |iv diff|: second %.4f bp, first %.4f bp", d2, d1));
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 7. Cost scaling: counter laws exact, wall clock linear in paths.
// ----------------------------------------------------------------------------
bool criterion_7(CheckContext& ctx) {
    const LevyDriverSpec driver = LevyDriverSpec::nig_driver(NigParams::standardized(12.0));
    // Counters against the literal evaluators.
    for (int n = 0; n <= 11; ++n) {
        DriftInputs in;
        in.lambda_i = 0.18;
        in.lambdas.assign(std::size_t(n), 0.18);
        in.weights.assign(std::size_t(n), 0.02);
        in.driver = &driver;

        DriftCost cost;
        jump_drift_full(in, &cost);
        const auto expected = drift_cost_formula(DriftMode::Full, n);
        ctx.require(cost.cumulant_evals == expected.cumulant_evals,
                    strfmt("full counter mismatch at n=%d", n));
        ctx.require(cost.cumulant_evals >= (std::uint64_t(1) << n),
                    strfmt("full counter below 2^n at n=%d", n));

        DriftCost cost2;
        jump_drift_second_order(in, &cost2);
        const std::uint64_t un = std::uint64_t(n);
        ctx.require(cost2.cumulant_evals == 1 + 3 * un + 7 * un * (un - 1) / 2,
                    strfmt("second-order counter not the exact quadratic at n=%d", n));
    }
    const double ratio_full =
        double(drift_cost_formula(DriftMode::Full, 11).cumulant_evals) /
        double(drift_cost_formula(DriftMode::Full, 10).cumulant_evals);
    ctx.require(ratio_full >= 2.0,
                strfmt("full counter ratio n=10->11 is %.3f < 2", ratio_full));
    const double ratio_second =
        double(drift_cost_formula(DriftMode::SecondOrder, 20).cumulant_evals) /
        double(drift_cost_formula(DriftMode::SecondOrder, 10).cumulant_evals);
    ctx.require(ratio_second > 3.0 && ratio_second < 5.0,
                strfmt("second-order counter ratio n=10->20 is %.3f, expected ~4", ratio_second));

    // Wall clock vs paths over a 4x range, +-25 percent around linear.
    const auto model = desk_model(15);
    std::vector<PathPayoff> payoffs{
        make_payoff(model, Product::fra(15, atm_strike(model, Product::fra(15, 0))))};
    auto timed_run = [&](std::int64_t paths) {
        RunConfig cfg;
        cfg.scheme = Scheme::Euler;
        cfg.mode = DriftMode::SecondOrder;
        cfg.n_paths = paths;
        cfg.rng.master_seed = 5;
        cfg.threads = 1;
        double best = 1e300;
        for (int rep = 0; rep < 2; ++rep)
            best = std::min(best, run_simulation(model, cfg, payoffs).wall_ms);
        return best;
    };
    const double t1 = timed_run(25000);
    const double t4 = timed_run(100000);
    const double ratio = t4 / t1;
    ctx.require(ratio >= 3.0 && ratio <= 5.0,
                strfmt("wall-clock 4x-path ratio %.2f outside [3, 5]", ratio));
    ctx.note(strfmt("full ratio(10->11)=%.2f, second ratio(10->20)=%.2f, wall 4x ratio=%.2f",
                    ratio_full, ratio_second, ratio));
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 8. Scheme relationships at one step per tenor plus long-stepping identities.
// ----------------------------------------------------------------------------
bool criterion_8(CheckContext& ctx) {
    const auto model = desk_model(20);
    std::vector<PathPayoff> payoffs;
    for (int i = 1; i <= 20; ++i)
        payoffs.push_back(
            make_payoff(model, Product::fra(i, atm_strike(model, Product::fra(i, 0)))));

    auto run_scheme = [&](Scheme scheme, bool long_step) {
        RunConfig cfg;
        cfg.scheme = scheme;
        cfg.mode = DriftMode::Full;
        cfg.grid.steps_per_tenor = 1;
        cfg.grid.long_step = long_step;
        cfg.n_paths = 500000;
        cfg.rng = RngPolicy{424242, true};
        cfg.keep_unit_values = true;
        return run_simulation(model, cfg, payoffs);
    };

    const auto euler = run_scheme(Scheme::Euler, false);
    const auto picard = run_scheme(Scheme::Picard, false);
    const auto pc = run_scheme(Scheme::PC, false);
    const auto ipc = run_scheme(Scheme::IPC, false);

    // Paired comparison on common increments: at the maturity where the
    // crude scheme's error is largest, the corrected scheme must sit closer
    // to zero and the difference must be statistically unambiguous.
    auto paired_check = [&](const RunResult& base, const char* base_name,
                            const RunResult& better, const char* better_name) {
        int istar = 0;
        for (int i = 0; i < 20; ++i)
            if (std::abs(base.estimates[std::size_t(i)].price) >
                std::abs(base.estimates[std::size_t(istar)].price))
                istar = i;
        const auto& vb = base.unit_values[std::size_t(istar)];
        const auto& vo = better.unit_values[std::size_t(istar)];
        double sum = 0.0, sumsq = 0.0;
        const std::int64_t n = std::int64_t(vb.size());
        for (std::int64_t u = 0; u < n; ++u) {
            const double d = vo[std::size_t(u)] - vb[std::size_t(u)];
            sum += d;
            sumsq += d * d;
        }
        const double mean = sum / double(n);
        const double se = std::sqrt(std::max(sumsq - sum * mean, 0.0) / double(n - 1) / double(n));
        const double base_err = std::abs(base.estimates[std::size_t(istar)].price);
        const double better_err = std::abs(better.estimates[std::size_t(istar)].price);
        ctx.require(better_err < base_err,
                    strfmt("%s error %.3e not below %s error %.3e at maturity %d", better_name,
                           better_err, base_name, base_err, istar + 1));
        ctx.require(std::abs(mean) > 3.0 * se,
                    strfmt("%s vs %s: paired diff %.3e within noise (se %.3e)", better_name,
                           base_name, mean, se));
    };
    paired_check(euler, "euler", pc, "pc");
    paired_check(euler, "euler", ipc, "ipc");
    paired_check(picard, "picard", pc, "pc");
    paired_check(picard, "picard", ipc, "ipc");

    // Long-stepping: Euler and Picard collapse onto the frozen-drift scheme.
    auto run_long = [&](Scheme scheme) {
        RunConfig cfg;
        cfg.scheme = scheme;
        cfg.mode = DriftMode::Full;
        cfg.grid.long_step = true;
        cfg.n_paths = 20000;
        cfg.rng = RngPolicy{424243, true};
        return run_simulation(model, cfg, payoffs);
    };
    const auto long_euler = run_long(Scheme::Euler);
    const auto long_picard = run_long(Scheme::Picard);
    const auto frozen = run_long(Scheme::FrozenLongStep);
    bool exact = true;
    for (std::size_t j = 0; j < payoffs.size(); ++j) {
        exact = exact &&
                std::memcmp(&long_euler.estimates[j].price, &frozen.estimates[j].price,
                            sizeof(double)) == 0 &&
                std::memcmp(&long_picard.estimates[j].price, &frozen.estimates[j].price,
                            sizeof(double)) == 0;
    }
    ctx.require(exact, "long-stepped Euler/Picard differ from the frozen-drift scheme");

    // PC and IPC coincide bit for bit on the Picard scheme: the trapezoidal
    // corrector reads only the proxies, so the processing order is irrelevant.
    const auto plan = SimulationPlan::build(model, Scheme::PicardPC, DriftMode::Full,
                                            GridSpec{1, false}, 20);
    std::vector<int> increasing(20), decreasing(20);
    for (int i = 0; i < 20; ++i) {
        increasing[std::size_t(i)] = i + 1;
        decreasing[std::size_t(i)] = 20 - i;
    }
    bool bit_identical = true;
    for (int path = 0; path < 200 && bit_identical; ++path) {
        PathState a = plan.initial_state(), b = plan.initial_state();
        const PathStream stream(424244, std::uint64_t(path));
        for (int j = 0; j < int(plan.steps().size()); ++j) {
            const auto& st = plan.steps()[std::size_t(j)];
            const double dh =
                model.driver.sample_increment(st.h, stream.increment_draws(std::uint32_t(j)));
            const int lo = plan.interval(st.interval).live_lo;
            std::vector<int> inc_live, dec_live;
            for (int i : increasing)
                if (i >= lo) inc_live.push_back(i);
            for (int i : decreasing)
                if (i >= lo) dec_live.push_back(i);
            evolve_step_picard_pc_ordered(plan, j, a, dh, inc_live);
            evolve_step_picard_pc_ordered(plan, j, b, dh, dec_live);
        }
        bit_identical = std::memcmp(a.z.data(), b.z.data(), a.z.size() * sizeof(double)) == 0;
    }
    ctx.require(bit_identical, "PC and IPC orderings of Picard+PC are not bit-identical");
    ctx.note("paired 1-step FRA tests, long-step identity, Picard PC/IPC bit equality");
    return ctx.ok;
}

// ----------------------------------------------------------------------------
// 9. Determinism: byte-identical CSVs for thread counts 1, 2, 8.
// ----------------------------------------------------------------------------
bool criterion_9(CheckContext& ctx) {
    ExperimentConfig cfg;
    cfg.rates = 20;
    cfg.paths = 10000;
    cfg.seed = 20260810;
    cfg.scheme = Scheme::Picard;
    cfg.drift = DriftMode::SecondOrder;
    ProductLine caplets;
    caplets.kind = "caplet_strip";
    caplets.args["moneyness"] = "1.0";
    ProductLine fras;
    fras.kind = "fra_strip";
    cfg.product_lines = {caplets, fras};

    std::string price_ref, compare_ref;
    for (int threads : {1, 2, 8}) {
        cfg.threads = threads;
        const auto priced = cmd_price(cfg);
        auto cmp_cfg = cfg;
        cmp_cfg.paths = 5000;
        cmp_cfg.compare_schemes = {Scheme::Euler, Scheme::Picard};
        cmp_cfg.compare_modes = {DriftMode::SecondOrder};
        const auto compared = cmd_compare(cmp_cfg);
        if (threads == 1) {
            price_ref = priced.csv;
            compare_ref = compared.csv;
            ctx.require(!price_ref.empty(), "price CSV empty");
        } else {
            ctx.require(priced.csv == price_ref,
                        strfmt("price CSV differs at %d threads", threads));
            ctx.require(compared.csv == compare_ref,
                        strfmt("compare CSV differs at %d threads", threads));
        }
    }
    ctx.note("price and compare CSVs byte-identical across threads {1,2,8}");
    return ctx.ok;
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(CheckContext&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "cumulant exactness", criterion_1},
        {2, "symmetric-polynomial identity", criterion_2},
        {3, "drift oracle equivalence", criterion_3},
        {4, "martingale and ATM-FRA zero", criterion_4},
        {5, "Picard vs Euler caplet vols", criterion_5},
        {6, "drift-expansion accuracy", criterion_6},
        {7, "cost scaling", criterion_7},
        {8, "scheme relationships", criterion_8},
        {9, "determinism across threads", criterion_9},
    };

    std::vector<int> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckContext ctx;
        bool ok = false;
        try {
            ok = c.run(ctx);
        } catch (const std::exception& e) {
            ctx.ok = false;
            ctx.detail += std::string("exception: ") + e.what();
        }
        ok = ok && ctx.ok;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d (%s) [%.1fs]%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                    secs, ctx.detail.empty() ? "" : ": ", ctx.detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
