#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "levylmm/config.hpp"
#include "levylmm/report.hpp"
#include "levylmm/simulation.hpp"

namespace levylmm {

// ============================================================================
// Command layer shared by the CLI and the test suites. Each command returns
// its CSV / report text so callers can assert on bytes without touching the
// filesystem; the CLI writes them out with a manifest beside each file.
// ============================================================================

struct CommandOutput {
    std::string name;      // price | compare | bench | validate
    std::string csv;       // primary CSV (empty for validate)
    std::string report;    // human-readable extras (validate text, bench fits)
    std::string manifest;  // sectioned manifest text
    std::vector<McEstimate> estimates;
    bool ok = true;
};

namespace detail {

inline std::string strike_cell(double strike) { return format_sig(strike); }

inline std::string opt_cell(const std::optional<double>& v) {
    return v ? format_sig(*v) : std::string();
}

inline void finish_manifest(CommandOutput& out, const ExperimentConfig& cfg, double wall_ms,
                            const DriftCost& cost,
                            const std::vector<std::pair<std::string, std::string>>& files) {
    ManifestBuilder mb;
    mb.command = out.name;
    mb.config_echo = cfg.echo();
    mb.wall_ms = wall_ms;
    mb.cumulant_evals = cost.cumulant_evals;
    mb.multiply_adds = cost.multiply_adds;
    for (const auto& [fname, text] : files) mb.outputs.emplace_back(fname, fnv1a64(text));
    out.manifest = mb.text();
}

inline void require_valid_model(const ExperimentConfig& cfg) {
    const auto report = validate_model(cfg.build_model_inputs());
    if (!report.ok())
        throw ConfigError("model configuration fails validation:\n" + report.to_text());
}

}  // namespace detail

// ----------------------------------------------------------------------------
// price: one row per product for the configured (scheme, drift mode).
// ----------------------------------------------------------------------------

inline CommandOutput cmd_price(const ExperimentConfig& cfg) {
    CommandOutput out;
    out.name = "price";
    detail::require_valid_model(cfg);

    const MarketModel model = cfg.build_model();
    const auto products = cfg.resolve_products(model);
    std::vector<PathPayoff> payoffs;
    payoffs.reserve(products.size());
    for (const auto& p : products) payoffs.push_back(make_payoff(model, p));

    RunResult res;
    if (!payoffs.empty()) res = run_simulation(model, cfg.run_config(), payoffs);

    CsvWriter csv({"product", "expiry", "end", "strike", "scheme", "mode", "price", "std_error",
                   "implied_vol"});
    for (std::size_t j = 0; j < products.size(); ++j) {
        const auto& p = products[j];
        const auto& e = res.estimates[j];
        csv.row({p.kind_name(), cell(p.expiry),
                 p.kind == Product::Kind::Swaption ? cell(p.end) : std::string(),
                 detail::strike_cell(p.strike), e.scheme, e.mode, cell(e.price),
                 cell(e.std_error), detail::opt_cell(e.implied_vol)});
    }
    out.csv = csv.text();
    out.estimates = res.estimates;
    detail::finish_manifest(out, cfg, res.wall_ms, res.cost, {{"price.csv", out.csv}});
    return out;
}

// ----------------------------------------------------------------------------
// compare: paired differences on common random numbers. The first
// (scheme, mode) combination is the baseline; differences are quoted in
// basis points of price and of implied volatility.
// ----------------------------------------------------------------------------

struct CompareRow {
    Product product;
    std::string base_scheme, base_mode, scheme, mode;
    double price_diff_bp = 0.0;     // price_other - price_base, in 1e-4
    double price_diff_se_bp = 0.0;  // paired standard error of the difference
    double iv_diff_bp = 0.0;        // implied vol difference, in 1e-4
    bool iv_valid = false;
    double base_price = 0.0;
    double other_price = 0.0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::vector<std::pair<Scheme, DriftMode>> combos;
};

inline CompareResult run_compare(const ExperimentConfig& cfg) {
    detail::require_valid_model(cfg);
    const MarketModel model = cfg.build_model();

    std::vector<Scheme> schemes =
        cfg.compare_schemes.empty() ? std::vector<Scheme>{cfg.scheme} : cfg.compare_schemes;
    std::vector<DriftMode> modes =
        cfg.compare_modes.empty() ? std::vector<DriftMode>{cfg.drift} : cfg.compare_modes;

    std::vector<std::pair<Scheme, DriftMode>> combos;
    for (auto s : schemes)
        for (auto m : modes) combos.emplace_back(s, m);
    if (combos.size() < 2)
        throw ConfigError("compare needs at least two (scheme, mode) combinations");

    const auto products = cfg.resolve_products(model);
    std::vector<PathPayoff> payoffs;
    for (const auto& p : products) payoffs.push_back(make_payoff(model, p));

    auto run_combo = [&](std::size_t idx) {
        RunConfig rc = cfg.run_config();
        rc.scheme = combos[idx].first;
        rc.mode = combos[idx].second;
        rc.keep_unit_values = true;
        return run_simulation(model, rc, payoffs);
    };

    CompareResult result;
    result.combos = combos;
    if (payoffs.empty()) return result;

    const RunResult base = run_combo(0);
    for (std::size_t c = 1; c < combos.size(); ++c) {
        const RunResult other = run_combo(c);
        for (std::size_t j = 0; j < products.size(); ++j) {
            CompareRow row;
            row.product = products[j];
            row.base_scheme = to_string(combos[0].first);
            row.base_mode = to_string(combos[0].second);
            row.scheme = to_string(combos[c].first);
            row.mode = to_string(combos[c].second);
            row.base_price = base.estimates[j].price;
            row.other_price = other.estimates[j].price;

            // Paired statistics over the common-random-number units.
            const auto& vb = base.unit_values[j];
            const auto& vo = other.unit_values[j];
            const std::int64_t n = std::int64_t(vb.size());
            double sum = 0.0, sumsq = 0.0;
            for (std::int64_t u = 0; u < n; ++u) {
                const double d = vo[std::size_t(u)] - vb[std::size_t(u)];
                sum += d;
                sumsq += d * d;
            }
            const double mean = n > 0 ? sum / double(n) : 0.0;
            const double var = n > 1 ? (sumsq - sum * mean) / double(n - 1) : 0.0;
            row.price_diff_bp = mean / 1e-4;
            row.price_diff_se_bp = std::sqrt(std::max(var, 0.0) / double(n)) / 1e-4;
            if (base.estimates[j].implied_vol && other.estimates[j].implied_vol) {
                row.iv_diff_bp =
                    (*other.estimates[j].implied_vol - *base.estimates[j].implied_vol) / 1e-4;
                row.iv_valid = true;
            }
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

inline CommandOutput cmd_compare(const ExperimentConfig& cfg) {
    CommandOutput out;
    out.name = "compare";
    const auto t0 = std::chrono::steady_clock::now();
    const CompareResult result = run_compare(cfg);

    CsvWriter csv({"product", "expiry", "end", "strike", "base_scheme", "base_mode", "scheme",
                   "mode", "price_diff_bp", "price_diff_se_bp", "iv_diff_bp"});
    for (const auto& r : result.rows) {
        csv.row({r.product.kind_name(), cell(r.product.expiry),
                 r.product.kind == Product::Kind::Swaption ? cell(r.product.end) : std::string(),
                 detail::strike_cell(r.product.strike), r.base_scheme, r.base_mode, r.scheme,
                 r.mode, cell(r.price_diff_bp), cell(r.price_diff_se_bp),
                 r.iv_valid ? cell(r.iv_diff_bp) : std::string()});
    }
    out.csv = csv.text();
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    detail::finish_manifest(out, cfg, wall, DriftCost{}, {{"compare.csv", out.csv}});
    return out;
}

// ----------------------------------------------------------------------------
// bench: wall time and canonical drift-cost counters per (N, paths). Counters
// are the closed-form per-evaluation costs summed over the curve (validated
// against the literal evaluators in the unit tests); wall time is measured on
// the actual simulation, which uses the flat-structure fast path.
// ----------------------------------------------------------------------------

struct BenchRow {
    int n_rates = 0;
    std::int64_t paths = 0;
    Scheme scheme;
    DriftMode mode;
    std::uint64_t kappa_evals = 0;
    std::uint64_t multiply_adds = 0;
    double wall_ms = 0.0;
};

inline DriftCost curve_drift_cost(DriftMode mode, int n_rates) {
    DriftCost total;
    for (int i = 1; i <= n_rates; ++i) total += drift_cost_formula(mode, n_rates - i);
    return total;
}

inline std::vector<BenchRow> run_bench(const ExperimentConfig& cfg) {
    std::vector<int> n_list = cfg.bench_rates.empty() ? std::vector<int>{5, 10, 15, 20}
                                                      : cfg.bench_rates;
    std::vector<std::int64_t> paths_list =
        cfg.bench_paths.empty() ? std::vector<std::int64_t>{10000, 20000, 40000} : cfg.bench_paths;

    std::vector<BenchRow> rows;
    for (int n : n_list) {
        ExperimentConfig local = cfg;
        local.rates = n;
        detail::require_valid_model(local);
        const MarketModel model = local.build_model();
        const DriftCost cost = curve_drift_cost(cfg.drift, n);
        // Guard (and report) runaway full-mode expansions instead of running them.
        const bool guarded = (cfg.drift == DriftMode::Full || cfg.drift == DriftMode::Frozen) &&
                             n - 1 > kFullDriftSubsetCap;
        for (std::int64_t paths : paths_list) {
            BenchRow row;
            row.n_rates = n;
            row.paths = paths;
            row.scheme = cfg.scheme;
            row.mode = cfg.drift;
            row.kappa_evals = cost.cumulant_evals;
            row.multiply_adds = cost.multiply_adds;
            if (!guarded) {
                std::vector<PathPayoff> payoffs{
                    make_payoff(model, Product::fra(n, atm_strike(model, Product::fra(n, 0))))};
                RunConfig rc = local.run_config();
                rc.n_paths = paths;
                const RunResult res = run_simulation(model, rc, payoffs);
                row.wall_ms = res.wall_ms;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

inline CommandOutput cmd_bench(const ExperimentConfig& cfg) {
    CommandOutput out;
    out.name = "bench";
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_bench(cfg);

    CsvWriter csv({"n_rates", "paths", "scheme", "mode", "kappa_evals", "multiply_adds",
                   "wall_ms"});
    for (const auto& r : rows)
        csv.row({cell(r.n_rates), cell(r.paths), to_string(r.scheme), to_string(r.mode),
                 cell(r.kappa_evals), cell(r.multiply_adds), cell(r.wall_ms)});
    out.csv = csv.text();

    // Growth summaries: wall-clock scaling in paths at fixed N, counter
    // scaling in N.
    std::string rep;
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            if (rows[a].n_rates == rows[b].n_rates && rows[a].wall_ms > 0 &&
                rows[b].wall_ms > 0 && rows[b].paths > rows[a].paths) {
                const double slope = std::log(rows[b].wall_ms / rows[a].wall_ms) /
                                     std::log(double(rows[b].paths) / double(rows[a].paths));
                rep += strfmt("paths_scaling n=%d %lld->%lld wall exponent = %.3f\n",
                              rows[a].n_rates, (long long)rows[a].paths, (long long)rows[b].paths,
                              slope);
            }
            if (rows[a].paths == rows[b].paths && rows[b].n_rates > rows[a].n_rates) {
                const double ratio = double(rows[b].kappa_evals) / double(rows[a].kappa_evals);
                rep += strfmt("kappa_scaling n=%d->%d eval ratio = %.4g\n", rows[a].n_rates,
                              rows[b].n_rates, ratio);
            }
        }
    }
    out.report = rep;
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    detail::finish_manifest(out, cfg, wall, curve_drift_cost(cfg.drift, cfg.rates),
                            {{"bench.csv", out.csv}});
    return out;
}

// ----------------------------------------------------------------------------
// validate: report-style pass/fail with slack per model condition.
// ----------------------------------------------------------------------------

inline CommandOutput cmd_validate(const ExperimentConfig& cfg) {
    CommandOutput out;
    out.name = "validate";
    const auto report = validate_model(cfg.build_model_inputs());
    out.report = report.to_text();
    out.ok = report.ok();
    detail::finish_manifest(out, cfg, 0.0, DriftCost{}, {{"validate.txt", out.report}});
    return out;
}

// Writes the command outputs plus the manifest beside them.
inline void write_outputs(const CommandOutput& out, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path base(dir);
    if (!out.csv.empty()) write_file(base / (out.name + ".csv"), out.csv);
    if (!out.report.empty()) write_file(base / (out.name + ".txt"), out.report);
    write_file(base / (out.name + "_manifest.txt"), out.manifest);
}

}  // namespace levylmm
