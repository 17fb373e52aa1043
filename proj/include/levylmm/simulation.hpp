#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <memory>
#include <span>
#include <thread>
#include <vector>

#include "levylmm/drift.hpp"
#include "levylmm/market_model.hpp"
#include "levylmm/pricing.hpp"
#include "levylmm/rng.hpp"

namespace levylmm {

// ============================================================================
// Path evolution under the terminal measure.
//
// Log rates follow dZ(t,T_i) = b(t,T_i; .) dt + lambda(t,T_i) dH_t with one
// shared driver increment per step. Scheme semantics:
//
//   Euler     left-point drift from the time-t state.
//   Picard    drift reads the auxiliary processes Z1 (Levy proxies with
//             deterministic drift), decoupling the rates from one another.
//   PC        trapezoidal drift average against an Euler predictor.
//   IPC       trapezoidal average, rates corrected in decreasing maturity
//             order, each corrector reading already-corrected later rates.
//   PicardPC  trapezoidal average of the Picard drift; order-free, and PC
//             and IPC coincide on it because the drift never reads the rates.
//   FrozenLongStep  one step from 0 to each product expiry with the drift at
//             its initial value (equivalent to long-stepped Euler/Picard).
// ============================================================================

enum class Scheme { Euler, Picard, PC, IPC, PicardPC, FrozenLongStep };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Euler: return "euler";
        case Scheme::Picard: return "picard";
        case Scheme::PC: return "pc";
        case Scheme::IPC: return "ipc";
        case Scheme::PicardPC: return "picard_pc";
        case Scheme::FrozenLongStep: return "frozen_long_step";
    }
    return "?";
}

inline bool scheme_uses_proxies(Scheme s) {
    return s == Scheme::Picard || s == Scheme::PicardPC;
}

struct GridSpec {
    int steps_per_tenor = 5;
    bool long_step = false;  // single step from 0 to each payoff expiry
};

// Per-path state: current log rates plus, for Picard schemes, the proxy
// log processes. Rate indices are 1-based; entry 0 is unused.
struct PathState {
    std::vector<double> z;
    std::vector<double> zp;
};

class SimulationPlan {
  public:
    struct IntervalData {
        int live_lo = 1;
        std::vector<double> lambda;  // 1-based; zero for expired rates
        std::shared_ptr<CurveDriftEvaluator> eval;
        std::vector<double> frozen_drift;  // total drift at initial weights
    };

    struct Step {
        double t0 = 0.0;
        double h = 0.0;
        int interval = 0;        // index into intervals()
        int expiry_at_end = 0;   // tenor index if the step ends on a tenor date
    };

    static SimulationPlan build(const MarketModel& model, Scheme scheme, DriftMode mode,
                                const GridSpec& grid, int horizon_index, int min_rate = 1) {
        SimulationPlan plan;
        plan.model_ = &model;
        plan.scheme_ = scheme;
        plan.mode_ = mode;
        const int n = model.n_rates();
        plan.z0_.assign(std::size_t(n) + 1, 0.0);
        for (int i = 1; i <= n; ++i) plan.z0_[std::size_t(i)] = std::log(model.curve.forward(i));

        const DriftMode eval_mode = mode == DriftMode::Frozen ? DriftMode::Full : mode;
        auto make_interval = [&](int k, int lo) {
            IntervalData data;
            data.live_lo = lo;
            data.lambda.assign(std::size_t(n) + 1, 0.0);
            for (int i = lo; i <= n; ++i)
                data.lambda[std::size_t(i)] = model.vols.on_interval(k, i);
            data.eval = std::make_shared<CurveDriftEvaluator>(model.driver, data.lambda, lo,
                                                              eval_mode);
            std::vector<double> w0(std::size_t(n) + 1, 0.0);
            for (int i = lo; i <= n; ++i) w0[std::size_t(i)] = model.initial_weight(i);
            data.frozen_drift.assign(std::size_t(n) + 1, 0.0);
            data.eval->evaluate(w0, data.frozen_drift, &plan.build_cost_);
            return data;
        };

        if (grid.long_step) {
            // One step [0, T_e]; all loadings are read on the first interval.
            plan.intervals_.push_back(make_interval(0, std::max(1, min_rate)));
            plan.steps_.push_back(Step{0.0, model.tenor.date(horizon_index), 0, horizon_index});
        } else {
            const int spt = grid.steps_per_tenor;
            if (spt < 1) throw std::invalid_argument("GridSpec: steps_per_tenor must be >= 1");
            plan.intervals_.reserve(std::size_t(horizon_index));
            for (int k = 0; k < horizon_index; ++k) {
                plan.intervals_.push_back(make_interval(k, std::max(k + 1, min_rate)));
                const double h = model.tenor.accrual(k) / spt;
                for (int s = 0; s < spt; ++s) {
                    plan.steps_.push_back(Step{model.tenor.date(k) + s * h, h, k,
                                               s == spt - 1 ? k + 1 : 0});
                }
            }
        }
        return plan;
    }

    const MarketModel& model() const { return *model_; }
    Scheme scheme() const { return scheme_; }
    DriftMode mode() const { return mode_; }
    int n_rates() const { return model_->n_rates(); }
    const std::vector<Step>& steps() const { return steps_; }
    const IntervalData& interval(int k) const { return intervals_[std::size_t(k)]; }
    const std::vector<double>& initial_logs() const { return z0_; }
    const DriftCost& build_cost() const { return build_cost_; }

    PathState initial_state() const {
        PathState s;
        s.z = z0_;
        if (scheme_uses_proxies(scheme_)) s.zp = z0_;
        return s;
    }

  private:
    const MarketModel* model_ = nullptr;
    Scheme scheme_ = Scheme::Euler;
    DriftMode mode_ = DriftMode::Full;
    std::vector<double> z0_;
    std::vector<IntervalData> intervals_;
    std::vector<Step> steps_;
    DriftCost build_cost_;
};

// Scratch buffers reused across steps and units.
struct StepWorkspace {
    std::vector<double> w;
    std::vector<double> b0;
    std::vector<double> b1;
    std::vector<double> zpred;
    TerminalCurve curve_a;
    TerminalCurve curve_b;

    void resize(int n_rates) {
        const std::size_t m = std::size_t(n_rates) + 1;
        w.assign(m, 0.0);
        b0.assign(m, 0.0);
        b1.assign(m, 0.0);
        zpred.assign(m, 0.0);
    }
};

namespace detail {

inline double weight_from_log(double logz, double accrual) {
    const double x = accrual * std::exp(logz);
    return x / (1.0 + x);
}

inline void fill_weights(const MarketModel& m, int lo, std::span<const double> logz,
                         std::span<double> w) {
    for (int l = lo; l <= m.n_rates(); ++l)
        w[std::size_t(l)] = weight_from_log(logz[std::size_t(l)], m.tenor.accrual(l));
}

// State-dependent drifts for every live rate, or the frozen table when the
// drift mode freezes the weights at their initial values.
inline void batch_drifts(const SimulationPlan& plan, const SimulationPlan::IntervalData& data,
                         std::span<const double> logz, std::span<double> out, StepWorkspace& ws,
                         DriftCost* cost) {
    if (plan.mode() == DriftMode::Frozen) {
        std::copy(data.frozen_drift.begin(), data.frozen_drift.end(), out.begin());
        return;
    }
    fill_weights(plan.model(), data.live_lo, logz, ws.w);
    data.eval->evaluate(ws.w, out, cost);
}

}  // namespace detail

// ----------------------------------------------------------------------------
// One-step evolution operators. All of them consume the same increment dH for
// a given step, which is what makes common-random-number comparisons exact.
// ----------------------------------------------------------------------------

inline void evolve_step_euler(const SimulationPlan& plan, int step_idx, PathState& s, double dH,
                              StepWorkspace& ws, DriftCost* cost = nullptr) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    detail::batch_drifts(plan, data, s.z, ws.b0, ws, cost);
    for (int i = data.live_lo; i <= plan.n_rates(); ++i)
        s.z[std::size_t(i)] += ws.b0[std::size_t(i)] * st.h + data.lambda[std::size_t(i)] * dH;
}

inline void evolve_step_picard(const SimulationPlan& plan, int step_idx, PathState& s, double dH,
                               StepWorkspace& ws, DriftCost* cost = nullptr) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    detail::batch_drifts(plan, data, s.zp, ws.b0, ws, cost);
    for (int i = data.live_lo; i <= plan.n_rates(); ++i) {
        const double diffusion = data.lambda[std::size_t(i)] * dH;
        s.z[std::size_t(i)] += ws.b0[std::size_t(i)] * st.h + diffusion;
        // Proxy drift is deterministic (frozen formula), precomputed per step.
        s.zp[std::size_t(i)] += data.frozen_drift[std::size_t(i)] * st.h + diffusion;
    }
}

inline void evolve_step_pc(const SimulationPlan& plan, int step_idx, PathState& s, double dH,
                           StepWorkspace& ws, DriftCost* cost = nullptr) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    const int n = plan.n_rates();
    detail::batch_drifts(plan, data, s.z, ws.b0, ws, cost);
    for (int i = data.live_lo; i <= n; ++i)
        ws.zpred[std::size_t(i)] =
            s.z[std::size_t(i)] + ws.b0[std::size_t(i)] * st.h + data.lambda[std::size_t(i)] * dH;
    detail::batch_drifts(plan, data, ws.zpred, ws.b1, ws, cost);
    for (int i = data.live_lo; i <= n; ++i)
        s.z[std::size_t(i)] += 0.5 * (ws.b0[std::size_t(i)] + ws.b1[std::size_t(i)]) * st.h +
                               data.lambda[std::size_t(i)] * dH;
}

inline void evolve_step_ipc(const SimulationPlan& plan, int step_idx, PathState& s, double dH,
                            StepWorkspace& ws, DriftCost* cost = nullptr) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    detail::batch_drifts(plan, data, s.z, ws.b0, ws, cost);
    if (plan.mode() == DriftMode::Frozen) {
        for (int i = data.live_lo; i <= plan.n_rates(); ++i)
            s.z[std::size_t(i)] +=
                data.frozen_drift[std::size_t(i)] * st.h + data.lambda[std::size_t(i)] * dH;
        return;
    }
    // Strictly decreasing maturity: each corrector reads the already-corrected
    // time-(t+h) values of all later rates.
    CurveDriftEvaluator::Sweep sweep(*data.eval, cost);
    for (int i = plan.n_rates(); i >= data.live_lo; --i) {
        const double b1 = sweep.drift(i);
        s.z[std::size_t(i)] += 0.5 * (ws.b0[std::size_t(i)] + b1) * st.h +
                               data.lambda[std::size_t(i)] * dH;
        sweep.push(i, detail::weight_from_log(s.z[std::size_t(i)],
                                              plan.model().tenor.accrual(i)));
    }
}

inline void evolve_step_picard_pc(const SimulationPlan& plan, int step_idx, PathState& s,
                                  double dH, StepWorkspace& ws, DriftCost* cost = nullptr) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    const int n = plan.n_rates();
    detail::batch_drifts(plan, data, s.zp, ws.b0, ws, cost);
    for (int i = data.live_lo; i <= n; ++i)
        ws.zpred[std::size_t(i)] = s.zp[std::size_t(i)] +
                                   data.frozen_drift[std::size_t(i)] * st.h +
                                   data.lambda[std::size_t(i)] * dH;
    detail::batch_drifts(plan, data, ws.zpred, ws.b1, ws, cost);
    for (int i = data.live_lo; i <= n; ++i) {
        s.z[std::size_t(i)] += 0.5 * (ws.b0[std::size_t(i)] + ws.b1[std::size_t(i)]) * st.h +
                               data.lambda[std::size_t(i)] * dH;
        s.zp[std::size_t(i)] = ws.zpred[std::size_t(i)];
    }
}

inline void apply_step(const SimulationPlan& plan, int step_idx, PathState& s, double dH,
                       StepWorkspace& ws, DriftCost* cost = nullptr) {
    switch (plan.scheme()) {
        case Scheme::Euler: evolve_step_euler(plan, step_idx, s, dH, ws, cost); break;
        case Scheme::Picard: evolve_step_picard(plan, step_idx, s, dH, ws, cost); break;
        case Scheme::PC: evolve_step_pc(plan, step_idx, s, dH, ws, cost); break;
        case Scheme::IPC: evolve_step_ipc(plan, step_idx, s, dH, ws, cost); break;
        case Scheme::PicardPC: evolve_step_picard_pc(plan, step_idx, s, dH, ws, cost); break;
        case Scheme::FrozenLongStep: evolve_step_euler(plan, step_idx, s, dH, ws, cost); break;
    }
}

// ----------------------------------------------------------------------------
// Order-explicit variants used by the decoupling and contract tests. Each rate
// is processed end to end with a standalone literal drift evaluation, so the
// result is bit-identical under any processing order exactly when the drift
// reads no other rate's current value.
// ----------------------------------------------------------------------------

inline double rate_drift_from_logs(const SimulationPlan& plan, const SimulationPlan::Step& st,
                                   int i, std::span<const double> logz) {
    const auto& data = plan.interval(st.interval);
    if (plan.mode() == DriftMode::Frozen) return data.frozen_drift[std::size_t(i)];
    DriftInputs in;
    in.lambda_i = data.lambda[std::size_t(i)];
    const int n = plan.n_rates();
    in.lambdas.reserve(std::size_t(n - i));
    in.weights.reserve(std::size_t(n - i));
    for (int l = i + 1; l <= n; ++l) {
        in.lambdas.push_back(data.lambda[std::size_t(l)]);
        in.weights.push_back(
            detail::weight_from_log(logz[std::size_t(l)], plan.model().tenor.accrual(l)));
    }
    in.c = plan.model().driver.c;
    in.driver = &plan.model().driver;
    const DriftMode m = plan.mode() == DriftMode::Frozen ? DriftMode::Full : plan.mode();
    return total_drift(in, m);
}

inline void evolve_step_picard_ordered(const SimulationPlan& plan, int step_idx, PathState& s,
                                       double dH, std::span<const int> order) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    for (int i : order) {
        const double b = rate_drift_from_logs(plan, st, i, s.zp);
        s.z[std::size_t(i)] += b * st.h + data.lambda[std::size_t(i)] * dH;
    }
    for (int i : order)
        s.zp[std::size_t(i)] +=
            data.frozen_drift[std::size_t(i)] * st.h + data.lambda[std::size_t(i)] * dH;
}

inline void evolve_step_picard_pc_ordered(const SimulationPlan& plan, int step_idx, PathState& s,
                                          double dH, std::span<const int> order) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    std::vector<double> zp_new = s.zp;
    for (int i : order)
        zp_new[std::size_t(i)] = s.zp[std::size_t(i)] +
                                 data.frozen_drift[std::size_t(i)] * st.h +
                                 data.lambda[std::size_t(i)] * dH;
    for (int i : order) {
        const double b0 = rate_drift_from_logs(plan, st, i, s.zp);
        const double b1 = rate_drift_from_logs(plan, st, i, zp_new);
        s.z[std::size_t(i)] += 0.5 * (b0 + b1) * st.h + data.lambda[std::size_t(i)] * dH;
    }
    s.zp = zp_new;
}

// Debug-harness IPC: refuses any order that is not strictly decreasing over
// the live rates, then applies the usual corrector sweep in that order.
inline void evolve_step_ipc_ordered(const SimulationPlan& plan, int step_idx, PathState& s,
                                    double dH, std::span<const int> order) {
    const auto& st = plan.steps()[std::size_t(step_idx)];
    const auto& data = plan.interval(st.interval);
    const int n = plan.n_rates();
    if (int(order.size()) != n - data.live_lo + 1)
        throw std::logic_error("ipc order must cover exactly the live rates");
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] != n - int(k))
            throw std::logic_error(
                "ipc requires strictly decreasing maturity order: rate i's corrector needs "
                "the corrected values of all rates > i");
    }
    std::vector<double> snapshot = s.z;
    for (int i : order) {
        const double b0 = rate_drift_from_logs(plan, st, i, snapshot);
        const double b1 = rate_drift_from_logs(plan, st, i, s.z);
        s.z[std::size_t(i)] =
            snapshot[std::size_t(i)] + 0.5 * (b0 + b1) * st.h + data.lambda[std::size_t(i)] * dH;
    }
}

// ----------------------------------------------------------------------------
// Monte Carlo runner: path-parallel, deterministic for any thread count.
// ----------------------------------------------------------------------------

struct RunConfig {
    Scheme scheme = Scheme::Euler;
    DriftMode mode = DriftMode::Full;
    GridSpec grid;
    RngPolicy rng;
    std::int64_t n_paths = 50000;
    int threads = 0;  // <= 0 picks hardware concurrency; never changes results
    bool keep_unit_values = false;
};

struct RunResult {
    std::vector<McEstimate> estimates;
    std::vector<std::vector<double>> unit_values;  // [payoff][unit], optional
    DriftCost cost;
    double wall_ms = 0.0;
    std::int64_t n_units = 0;
    std::int64_t n_paths = 0;
    std::int64_t failed_units = 0;
};

namespace detail {

struct BlockAccum {
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::int64_t units = 0;
    std::int64_t fails = 0;
    DriftCost cost;

    void merge(const BlockAccum& o) {
        for (std::size_t j = 0; j < sum.size(); ++j) {
            sum[j] += o.sum[j];
            sumsq[j] += o.sumsq[j];
        }
        units += o.units;
        fails += o.fails;
        cost += o.cost;
    }
};

// Fixed pairwise reduction tree over block index: the merge order never
// depends on which thread produced which block.
inline BlockAccum reduce_blocks(std::vector<BlockAccum>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockAccum left = reduce_blocks(blocks, lo, mid);
    BlockAccum right = reduce_blocks(blocks, mid, hi);
    left.merge(right);
    return left;
}

inline void run_core(const MarketModel& model, const SimulationPlan& plan, const RunConfig& cfg,
                     std::span<const PathPayoff* const> payoffs, std::int64_t n_units,
                     bool antithetic, std::vector<double>* unit_values_flat, RunResult& out) {
    const int n_pay = int(payoffs.size());
    const std::int64_t block_size = 1024;
    const std::int64_t n_blocks = std::max<std::int64_t>(1, (n_units + block_size - 1) / block_size);

    // Payoffs grouped by observation date.
    std::vector<std::vector<int>> payoffs_at(std::size_t(model.n_rates()) + 2);
    for (int j = 0; j < n_pay; ++j)
        payoffs_at[std::size_t(payoffs[std::size_t(j)]->expiry)].push_back(j);

    std::vector<BlockAccum> blocks;
    blocks.resize(std::size_t(n_blocks));
    std::atomic<std::int64_t> next_block{0};

    auto worker = [&]() {
        StepWorkspace ws;
        ws.resize(model.n_rates());
        PathState state_plus, state_minus;
        std::vector<double> values(std::size_t(n_pay), 0.0);

        for (;;) {
            const std::int64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            BlockAccum acc;
            acc.sum.assign(std::size_t(n_pay), 0.0);
            acc.sumsq.assign(std::size_t(n_pay), 0.0);

            const std::int64_t u_lo = b * block_size;
            const std::int64_t u_hi = std::min(n_units, u_lo + block_size);
            const bool proxies = scheme_uses_proxies(plan.scheme());
            for (std::int64_t u = u_lo; u < u_hi; ++u) {
                try {
                    const PathStream stream = cfg.rng.stream(std::uint64_t(u));
                    state_plus.z = plan.initial_logs();
                    if (proxies) state_plus.zp = plan.initial_logs();
                    if (antithetic) {
                        state_minus.z = plan.initial_logs();
                        if (proxies) state_minus.zp = plan.initial_logs();
                    }
                    std::fill(values.begin(), values.end(), 0.0);

                    for (int j = 0; j < int(plan.steps().size()); ++j) {
                        const auto& st = plan.steps()[std::size_t(j)];
                        const auto draws = stream.increment_draws(std::uint32_t(j));
                        const double dh_plus = model.driver.sample_increment(st.h, draws, false);
                        apply_step(plan, j, state_plus, dh_plus, ws, &acc.cost);
                        if (antithetic) {
                            const double dh_minus =
                                model.driver.sample_increment(st.h, draws, true);
                            apply_step(plan, j, state_minus, dh_minus, ws, &acc.cost);
                        }
                        const int e = st.expiry_at_end;
                        if (e > 0 && !payoffs_at[std::size_t(e)].empty()) {
                            fill_terminal_curve(model, e, state_plus.z, ws.curve_a);
                            if (antithetic) fill_terminal_curve(model, e, state_minus.z, ws.curve_b);
                            for (int pj : payoffs_at[std::size_t(e)]) {
                                double v = payoffs[std::size_t(pj)]->eval(model, ws.curve_a);
                                if (antithetic)
                                    v = 0.5 * (v + payoffs[std::size_t(pj)]->eval(model, ws.curve_b));
                                values[std::size_t(pj)] = v;
                            }
                        }
                    }

                    for (int pj = 0; pj < n_pay; ++pj) {
                        acc.sum[std::size_t(pj)] += values[std::size_t(pj)];
                        acc.sumsq[std::size_t(pj)] +=
                            values[std::size_t(pj)] * values[std::size_t(pj)];
                        if (unit_values_flat)
                            unit_values_flat[pj][std::size_t(u)] = values[std::size_t(pj)];
                    }
                    ++acc.units;
                } catch (const std::exception&) {
                    ++acc.fails;
                }
            }
            blocks[std::size_t(b)] = std::move(acc);
        }
    };

    int n_threads = cfg.threads > 0 ? cfg.threads : int(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    BlockAccum total = reduce_blocks(blocks, 0, std::size_t(n_blocks));
    out.failed_units += total.fails;
    out.cost += total.cost;

    const std::int64_t ok = total.units;
    for (int pj = 0; pj < n_pay; ++pj) {
        McEstimate est;
        est.label = payoffs[std::size_t(pj)]->label;
        est.n_units = ok;
        est.n_paths = antithetic ? 2 * ok : ok;
        est.price = ok > 0 ? total.sum[std::size_t(pj)] / double(ok) : 0.0;
        if (ok > 1) {
            const double var =
                (total.sumsq[std::size_t(pj)] - total.sum[std::size_t(pj)] * est.price) /
                double(ok - 1);
            est.std_error = std::sqrt(std::max(var, 0.0) / double(ok));
        }
        est.scheme = to_string(plan.scheme());
        est.mode = to_string(plan.mode());
        out.estimates.push_back(std::move(est));
    }
}

}  // namespace detail

inline RunResult run_simulation(const MarketModel& model, const RunConfig& cfg,
                                const std::vector<PathPayoff>& payoffs) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResult out;

    const bool antithetic = cfg.rng.antithetic;
    const std::int64_t n_units = antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    out.n_units = n_units;
    out.n_paths = antithetic ? 2 * n_units : n_units;
    if (payoffs.empty() || n_units <= 0) return out;

    const bool long_step = cfg.grid.long_step || cfg.scheme == Scheme::FrozenLongStep;

    std::vector<std::vector<double>> unit_store;
    if (cfg.keep_unit_values)
        unit_store.assign(payoffs.size(), std::vector<double>(std::size_t(n_units), 0.0));

    out.estimates.reserve(payoffs.size());
    std::vector<McEstimate> ordered(payoffs.size());

    if (long_step) {
        // Each expiry runs as its own single-step simulation over [0, T_e].
        std::vector<std::vector<int>> by_expiry(std::size_t(model.n_rates()) + 1);
        for (int j = 0; j < int(payoffs.size()); ++j)
            by_expiry[std::size_t(payoffs[std::size_t(j)].expiry)].push_back(j);
        GridSpec long_grid = cfg.grid;
        long_grid.long_step = true;
        for (int e = 1; e <= model.n_rates(); ++e) {
            if (by_expiry[std::size_t(e)].empty()) continue;
            SimulationPlan plan =
                SimulationPlan::build(model, cfg.scheme, cfg.mode, long_grid, e, e);
            out.cost += plan.build_cost();
            std::vector<const PathPayoff*> subset;
            for (int j : by_expiry[std::size_t(e)]) subset.push_back(&payoffs[std::size_t(j)]);
            std::vector<std::vector<double>> local_store;
            if (cfg.keep_unit_values)
                local_store.assign(subset.size(), std::vector<double>(std::size_t(n_units), 0.0));
            RunResult sub;
            detail::run_core(model, plan, cfg, subset, n_units, antithetic,
                             cfg.keep_unit_values ? local_store.data() : nullptr, sub);
            out.failed_units += sub.failed_units;
            out.cost += sub.cost;
            for (std::size_t k = 0; k < subset.size(); ++k) {
                const int j = by_expiry[std::size_t(e)][k];
                ordered[std::size_t(j)] = std::move(sub.estimates[k]);
                if (cfg.keep_unit_values)
                    unit_store[std::size_t(j)] = std::move(local_store[k]);
            }
        }
        out.estimates = std::move(ordered);
    } else {
        int horizon = 1;
        for (const auto& p : payoffs) horizon = std::max(horizon, p.expiry);
        SimulationPlan plan =
            SimulationPlan::build(model, cfg.scheme, cfg.mode, cfg.grid, horizon, 1);
        out.cost += plan.build_cost();
        std::vector<const PathPayoff*> ptrs;
        ptrs.reserve(payoffs.size());
        for (const auto& p : payoffs) ptrs.push_back(&p);
        detail::run_core(model, plan, cfg, ptrs, n_units, antithetic,
                         cfg.keep_unit_values ? unit_store.data() : nullptr, out);
    }

    if (out.failed_units > 0 &&
        double(out.failed_units) / double(n_units) > 1e-4)
        throw std::runtime_error(strfmt("run_simulation: %lld of %lld units failed (> 0.01%%)",
                                        (long long)out.failed_units, (long long)n_units));

    // Reporting extras: implied vols where the product has a vol convention.
    for (std::size_t j = 0; j < payoffs.size(); ++j) {
        if (payoffs[j].product)
            out.estimates[j].implied_vol =
                implied_vol_for(model, *payoffs[j].product, out.estimates[j].price);
    }
    if (cfg.keep_unit_values) out.unit_values = std::move(unit_store);

    const auto t_end = std::chrono::steady_clock::now();
    out.wall_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
    for (auto& est : out.estimates) {
        est.wall_ms = out.wall_ms;
        est.cost = out.cost;
    }
    return out;
}

}  // namespace levylmm
