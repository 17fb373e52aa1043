#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "levylmm/common.hpp"
#include "levylmm/drift.hpp"
#include "levylmm/market_model.hpp"
#include "levylmm/pricing.hpp"
#include "levylmm/simulation.hpp"

namespace levylmm {

// ============================================================================
// Experiment configuration: flat sectioned key-value text. Every model and
// simulation field defaults to the flat test bed (N = 20, delta = 0.5,
// B(0,T) = exp(-0.04 T), lambda = 0.18, NIG alpha = delta_bar = 12,
// beta = mu = 0, 5 steps per tenor, 50000 paths). Products default to an
// empty list; strips expand against the resolved model.
//
//   [model]
//   rates = 20
//   accrual = 0.5
//   curve_rate = 0.04
//   vol = 0.18
//   nig_alpha = 12
//   nig_delta = 12
//   nig_beta = 0
//   nig_mu = 0
//   diffusion = 0
//
//   [simulation]
//   scheme = euler             # euler|picard|pc|ipc|picard_pc|frozen_long_step
//   drift = full               # full|first_order|second_order|frozen
//   grid = per_tenor           # per_tenor|long_step
//   steps_per_tenor = 5
//   paths = 50000
//   seed = 12345
//   antithetic = false
//   threads = 0
//
//   [products]
//   product = caplet expiry=4 strike=atm
//   product = caplet_strip moneyness=0.8,1.0,1.2
//   product = fra expiry=8 strike=0.04
//   product = fra_strip
//   product = swaption start=4 end=8 strike=atm
//   product = swaption_strip tenor=4
//
//   [output]
//   dir = out
// ============================================================================

struct StrikeSpec {
    enum class Kind { Atm, AtmScaled, Absolute };
    Kind kind = Kind::Atm;
    double value = 1.0;

    static StrikeSpec parse(const std::string& text) {
        if (text == "atm") return {Kind::Atm, 1.0};
        if (text.rfind("atm*", 0) == 0) return {Kind::AtmScaled, std::stod(text.substr(4))};
        return {Kind::Absolute, std::stod(text)};
    }

    double resolve(double atm) const {
        switch (kind) {
            case Kind::Atm: return atm;
            case Kind::AtmScaled: return value * atm;
            case Kind::Absolute: return value;
        }
        return atm;
    }
};

struct ProductLine {
    std::string kind;  // caplet | caplet_strip | fra | fra_strip | swaption | swaption_strip
    std::map<std::string, std::string> args;
    int line_no = 0;
};

struct ExperimentConfig {
    // [model]
    int rates = 20;
    double accrual = 0.5;
    double curve_rate = 0.04;
    double vol = 0.18;
    double nig_alpha = 12.0;
    double nig_delta = 12.0;
    double nig_beta = 0.0;
    double nig_mu = 0.0;
    double diffusion = 0.0;

    // [simulation]
    Scheme scheme = Scheme::Euler;
    DriftMode drift = DriftMode::Full;
    bool long_step_grid = false;
    int steps_per_tenor = 5;
    std::int64_t paths = 50000;
    std::uint64_t seed = 12345;
    bool antithetic = false;
    int threads = 0;

    // [products]
    std::vector<ProductLine> product_lines;

    // [compare] / [bench]
    std::vector<Scheme> compare_schemes;
    std::vector<DriftMode> compare_modes;
    std::vector<int> bench_rates;
    std::vector<std::int64_t> bench_paths;

    // [output]
    std::string out_dir = ".";

    MarketModel build_model() const {
        return make_flat_model(rates, accrual, curve_rate, vol,
                               NigParams{nig_alpha, nig_beta, nig_mu, nig_delta}, diffusion);
    }

    ModelInputs build_model_inputs() const;
    RunConfig run_config() const {
        RunConfig rc;
        rc.scheme = scheme;
        rc.mode = drift;
        rc.grid = GridSpec{steps_per_tenor, long_step_grid};
        rc.rng = RngPolicy{seed, antithetic};
        rc.n_paths = paths;
        rc.threads = threads;
        return rc;
    }

    std::vector<Product> resolve_products(const MarketModel& model) const;
    std::string echo() const;
};

// ----------------------------------------------------------------------------
// Parsing helpers.
// ----------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            const auto piece = trim(s.substr(start, i - start));
            if (!piece.empty()) out.push_back(piece);
            start = i + 1;
        }
    }
    return out;
}

template <typename T>
T parse_number(const std::string& value, const std::string& key, int line) {
    try {
        if constexpr (std::is_same_v<T, double>) return std::stod(value);
        else if constexpr (std::is_same_v<T, int>) return std::stoi(value);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::stoll(value);
        else return T(std::stoull(value));
    } catch (const std::exception&) {
        throw ConfigError(strfmt("line %d: field '%s': cannot parse number '%s'", line,
                                 key.c_str(), value.c_str()));
    }
}

inline bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(strfmt("line %d: field '%s': expected boolean, got '%s'", line, key.c_str(),
                             v.c_str()));
}

inline Scheme parse_scheme(const std::string& v, int line) {
    if (v == "euler") return Scheme::Euler;
    if (v == "picard") return Scheme::Picard;
    if (v == "pc") return Scheme::PC;
    if (v == "ipc") return Scheme::IPC;
    if (v == "picard_pc") return Scheme::PicardPC;
    if (v == "frozen_long_step") return Scheme::FrozenLongStep;
    throw ConfigError(strfmt("line %d: unknown scheme '%s'", line, v.c_str()));
}

inline DriftMode parse_drift_mode(const std::string& v, int line) {
    if (v == "full") return DriftMode::Full;
    if (v == "first_order") return DriftMode::FirstOrder;
    if (v == "second_order") return DriftMode::SecondOrder;
    if (v == "frozen") return DriftMode::Frozen;
    throw ConfigError(strfmt("line %d: unknown drift mode '%s'", line, v.c_str()));
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(strfmt("line %d: malformed section header '%s'", line_no,
                                         line.c_str()));
            section = line.substr(1, line.size() - 2);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(strfmt("line %d: expected 'key = value', got '%s'", line_no,
                                     line.c_str()));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));

        using namespace detail;
        if (section == "model") {
            if (key == "rates") cfg.rates = parse_number<int>(value, key, line_no);
            else if (key == "accrual") cfg.accrual = parse_number<double>(value, key, line_no);
            else if (key == "curve_rate") cfg.curve_rate = parse_number<double>(value, key, line_no);
            else if (key == "vol") cfg.vol = parse_number<double>(value, key, line_no);
            else if (key == "nig_alpha") cfg.nig_alpha = parse_number<double>(value, key, line_no);
            else if (key == "nig_delta") cfg.nig_delta = parse_number<double>(value, key, line_no);
            else if (key == "nig_beta") cfg.nig_beta = parse_number<double>(value, key, line_no);
            else if (key == "nig_mu") cfg.nig_mu = parse_number<double>(value, key, line_no);
            else if (key == "diffusion") cfg.diffusion = parse_number<double>(value, key, line_no);
            else throw ConfigError(strfmt("line %d: unknown [model] field '%s'", line_no, key.c_str()));
        } else if (section == "simulation") {
            if (key == "scheme") cfg.scheme = parse_scheme(value, line_no);
            else if (key == "drift") cfg.drift = parse_drift_mode(value, line_no);
            else if (key == "grid") {
                if (value == "per_tenor") cfg.long_step_grid = false;
                else if (value == "long_step") cfg.long_step_grid = true;
                else throw ConfigError(strfmt("line %d: unknown grid '%s'", line_no, value.c_str()));
            }
            else if (key == "steps_per_tenor") cfg.steps_per_tenor = parse_number<int>(value, key, line_no);
            else if (key == "paths") cfg.paths = parse_number<std::int64_t>(value, key, line_no);
            else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(value, key, line_no);
            else if (key == "antithetic") cfg.antithetic = parse_bool(value, key, line_no);
            else if (key == "threads") cfg.threads = parse_number<int>(value, key, line_no);
            else throw ConfigError(strfmt("line %d: unknown [simulation] field '%s'", line_no, key.c_str()));
        } else if (section == "products") {
            if (key != "product")
                throw ConfigError(strfmt("line %d: [products] entries use 'product = ...'", line_no));
            const auto tokens = split(value, ' ');
            if (tokens.empty())
                throw ConfigError(strfmt("line %d: empty product entry", line_no));
            ProductLine pl;
            pl.kind = tokens[0];
            pl.line_no = line_no;
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                const auto e2 = tokens[t].find('=');
                if (e2 == std::string::npos)
                    throw ConfigError(strfmt("line %d: product argument '%s' must be key=value",
                                             line_no, tokens[t].c_str()));
                pl.args[tokens[t].substr(0, e2)] = tokens[t].substr(e2 + 1);
            }
            cfg.product_lines.push_back(std::move(pl));
        } else if (section == "compare") {
            if (key == "schemes") {
                cfg.compare_schemes.clear();
                for (const auto& s : split(value, ',')) cfg.compare_schemes.push_back(parse_scheme(s, line_no));
            } else if (key == "modes") {
                cfg.compare_modes.clear();
                for (const auto& s : split(value, ',')) cfg.compare_modes.push_back(parse_drift_mode(s, line_no));
            } else {
                throw ConfigError(strfmt("line %d: unknown [compare] field '%s'", line_no, key.c_str()));
            }
        } else if (section == "bench") {
            if (key == "rates") {
                cfg.bench_rates.clear();
                for (const auto& s : split(value, ',')) cfg.bench_rates.push_back(parse_number<int>(s, key, line_no));
            } else if (key == "paths") {
                cfg.bench_paths.clear();
                for (const auto& s : split(value, ','))
                    cfg.bench_paths.push_back(parse_number<std::int64_t>(s, key, line_no));
            } else {
                throw ConfigError(strfmt("line %d: unknown [bench] field '%s'", line_no, key.c_str()));
            }
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else throw ConfigError(strfmt("line %d: unknown [output] field '%s'", line_no, key.c_str()));
        } else if (section.empty()) {
            throw ConfigError(strfmt("line %d: field '%s' outside any [section]", line_no, key.c_str()));
        } else {
            throw ConfigError(strfmt("line %d: unknown section [%s]", line_no, section.c_str()));
        }
    }
    return cfg;
}

inline ModelInputs ExperimentConfig::build_model_inputs() const {
    ModelInputs in;
    in.tenor_dates.resize(std::size_t(std::max(rates, 0)) + 2);
    for (std::size_t i = 0; i < in.tenor_dates.size(); ++i) in.tenor_dates[i] = double(i) * accrual;
    in.discounts.resize(std::size_t(std::max(rates, 0)) + 1);
    for (std::size_t i = 0; i < in.discounts.size(); ++i)
        in.discounts[i] = std::exp(-curve_rate * in.tenor_dates[i + 1]);
    in.vol_table.assign(std::size_t(std::max(rates, 0)) + 1,
                        std::vector<double>(std::size_t(std::max(rates, 0)) + 1, vol));
    in.nig = NigParams{nig_alpha, nig_beta, nig_mu, nig_delta};
    in.diffusion_c = diffusion;
    return in;
}

inline std::vector<Product> ExperimentConfig::resolve_products(const MarketModel& model) const {
    std::vector<Product> out;
    const int n = model.n_rates();
    auto arg = [](const ProductLine& pl, const char* name,
                  const char* fallback = nullptr) -> std::string {
        const auto it = pl.args.find(name);
        if (it != pl.args.end()) return it->second;
        if (fallback) return fallback;
        throw ConfigError(strfmt("line %d: product '%s' missing argument '%s'", pl.line_no,
                                 pl.kind.c_str(), name));
    };

    for (const auto& pl : product_lines) {
        try {
            if (pl.kind == "caplet") {
                const int e = std::stoi(arg(pl, "expiry"));
                Product p = Product::caplet(e, 0.0);
                p.strike = StrikeSpec::parse(arg(pl, "strike", "atm")).resolve(atm_strike(model, p));
                out.push_back(p);
            } else if (pl.kind == "fra") {
                const int e = std::stoi(arg(pl, "expiry"));
                Product p = Product::fra(e, 0.0);
                p.strike = StrikeSpec::parse(arg(pl, "strike", "atm")).resolve(atm_strike(model, p));
                out.push_back(p);
            } else if (pl.kind == "swaption") {
                const int s = std::stoi(arg(pl, "start"));
                const int e = std::stoi(arg(pl, "end"));
                Product p = Product::swaption(s, e, 0.0);
                p.strike = StrikeSpec::parse(arg(pl, "strike", "atm")).resolve(atm_strike(model, p));
                out.push_back(p);
            } else if (pl.kind == "caplet_strip") {
                for (const auto& m : detail::split(arg(pl, "moneyness", "1.0"), ',')) {
                    const double f = std::stod(m);
                    for (int i = 1; i <= n; ++i) {
                        Product p = Product::caplet(i, 0.0);
                        p.strike = f * atm_strike(model, p);
                        out.push_back(p);
                    }
                }
            } else if (pl.kind == "fra_strip") {
                for (int i = 1; i <= n; ++i) {
                    Product p = Product::fra(i, 0.0);
                    p.strike = StrikeSpec::parse(arg(pl, "strike", "atm")).resolve(atm_strike(model, p));
                    out.push_back(p);
                }
            } else if (pl.kind == "swaption_strip") {
                const int tenor = std::stoi(arg(pl, "tenor"));
                const double f = std::stod(arg(pl, "moneyness", "1.0"));
                for (int i = 1; i + tenor <= n; ++i) {
                    Product p = Product::swaption(i, i + tenor, 0.0);
                    p.strike = f * atm_strike(model, p);
                    out.push_back(p);
                }
            } else {
                throw ConfigError(strfmt("line %d: unknown product kind '%s'", pl.line_no,
                                         pl.kind.c_str()));
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(strfmt("line %d: product '%s': %s", pl.line_no, pl.kind.c_str(),
                                     e.what()));
        }
    }
    for (const auto& p : out) p.validate(n);
    return out;
}

// Canonical echo of the resolved configuration; embedded in every manifest so
// a run can be reproduced from its outputs alone.
inline std::string ExperimentConfig::echo() const {
    std::string s;
    s += "[model]\n";
    s += strfmt("rates = %d\n", rates);
    s += "accrual = " + format_sig(accrual) + "\n";
    s += "curve_rate = " + format_sig(curve_rate) + "\n";
    s += "vol = " + format_sig(vol) + "\n";
    s += "nig_alpha = " + format_sig(nig_alpha) + "\n";
    s += "nig_delta = " + format_sig(nig_delta) + "\n";
    s += "nig_beta = " + format_sig(nig_beta) + "\n";
    s += "nig_mu = " + format_sig(nig_mu) + "\n";
    s += "diffusion = " + format_sig(diffusion) + "\n";
    s += "[simulation]\n";
    s += strfmt("scheme = %s\n", to_string(scheme));
    s += strfmt("drift = %s\n", to_string(drift));
    s += strfmt("grid = %s\n", long_step_grid ? "long_step" : "per_tenor");
    s += strfmt("steps_per_tenor = %d\n", steps_per_tenor);
    s += strfmt("paths = %lld\n", (long long)paths);
    s += strfmt("seed = %llu\n", (unsigned long long)seed);
    s += strfmt("antithetic = %s\n", antithetic ? "true" : "false");
    s += strfmt("threads = %d\n", threads);
    if (!product_lines.empty()) {
        s += "[products]\n";
        for (const auto& pl : product_lines) {
            s += "product = " + pl.kind;
            for (const auto& [k, v] : pl.args) s += " " + k + "=" + v;
            s += "\n";
        }
    }
    if (!compare_schemes.empty() || !compare_modes.empty()) {
        s += "[compare]\n";
        if (!compare_schemes.empty()) {
            s += "schemes = ";
            for (std::size_t i = 0; i < compare_schemes.size(); ++i)
                s += std::string(i ? "," : "") + to_string(compare_schemes[i]);
            s += "\n";
        }
        if (!compare_modes.empty()) {
            s += "modes = ";
            for (std::size_t i = 0; i < compare_modes.size(); ++i)
                s += std::string(i ? "," : "") + to_string(compare_modes[i]);
            s += "\n";
        }
    }
    if (!bench_rates.empty() || !bench_paths.empty()) {
        s += "[bench]\n";
        if (!bench_rates.empty()) {
            s += "rates = ";
            for (std::size_t i = 0; i < bench_rates.size(); ++i)
                s += std::string(i ? "," : "") + strfmt("%d", bench_rates[i]);
            s += "\n";
        }
        if (!bench_paths.empty()) {
            s += "paths = ";
            for (std::size_t i = 0; i < bench_paths.size(); ++i)
                s += std::string(i ? "," : "") + strfmt("%lld", (long long)bench_paths[i]);
            s += "\n";
        }
    }
    s += "[output]\n";
    s += "dir = " + out_dir + "\n";
    return s;
}

}  // namespace levylmm
