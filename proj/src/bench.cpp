// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pinch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <omp.h>

namespace pinch {

using nlohmann::json;

namespace {

const std::vector<std::pair<Scheme, std::string>> kSchemeNames{
    {Scheme::sd_rsma, "SD-RSMA"}, {Scheme::fap_rsma, "FAP-RSMA"}, {Scheme::d_rsma, "D-RSMA"},
    {Scheme::pa_noma, "PA-NOMA"}, {Scheme::ca_rsma, "CA-RSMA"}};

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive: mixing a then b differs from b then a.
std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(splitmix64(h) ^ v); }

// Tolerance on the QoS check of the final vectors, same as the acceptance slack.
constexpr double kQosSlack = 1e-6;

template <typename T>
void take(const json &j, const char *key, T &dst)
{
    if (j.contains(key))
        dst = j.at(key).get<T>();
}

} // namespace

std::string to_string(Scheme s)
{
    for (const auto &[k, name] : kSchemeNames)
        if (k == s)
            return name;
    throw std::invalid_argument("unknown scheme");
}

Scheme parse_scheme(const std::string &name)
{
    for (const auto &[k, n] : kSchemeNames)
        if (n == name)
            return k;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

const std::vector<Scheme> &all_schemes()
{
    static const std::vector<Scheme> schemes{Scheme::sd_rsma, Scheme::fap_rsma, Scheme::d_rsma, Scheme::pa_noma,
                                             Scheme::ca_rsma};
    return schemes;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

void RunConfig::set_powers(double p_dbm, double n_dbm)
{
    p_max_dbm = p_dbm;
    noise_dbm = n_dbm;
    p_max_mw = dbm_to_mw(p_dbm);
    noise_mw = dbm_to_mw(n_dbm);
}

void RunConfig::validate() const
{
    layout.validate_geometry();
    if (layout.users <= layout.waveguides)
        throw std::invalid_argument("config: K must exceed M");
    if (n_values.empty())
        throw std::invalid_argument("config: n_values is empty");
    for (int n : n_values) {
        SystemLayout l = layout;
        l.pas_per_waveguide = n;
        l.validate_geometry();
    }
    if (drops < 1)
        throw std::invalid_argument("config: drops must be at least 1");
    if (schemes.empty())
        throw std::invalid_argument("config: schemes is empty");
    if (!(r_min >= 0.0) || !(eta_eff > 0.0))
        throw std::invalid_argument("config: r_min must be >= 0 and eta_eff > 0");
    if (!(gap_tol > 0.0) || !(sca_eps > 0.0) || max_iterations < 1 || !(rank_tol >= 0.0))
        throw std::invalid_argument("config: bad tolerances");
}

RunConfig parse_config(const std::string &text)
{
    static const std::vector<std::string> known{
        "waveguides", "length",  "pa_height", "feed_points", "carrier_freq", "user_region",
        "users",      "p_max_dbm", "noise_dbm", "r_min",     "eta_eff",      "n_values",
        "drops",      "base_seed", "schemes",   "gap_tol",   "sca_eps",      "max_iterations",
        "rank_tol"};

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("config: top level must be an object");
    for (const auto &[key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "'");

    RunConfig cfg;
    try {
        SystemLayout &l = cfg.layout;
        take(j, "waveguides", l.waveguides);
        take(j, "length", l.length);
        take(j, "pa_height", l.pa_height);
        take(j, "carrier_freq", l.carrier_freq);
        take(j, "users", l.users);
        if (j.contains("feed_points")) {
            l.feed_points.clear();
            for (const auto &p : j.at("feed_points")) {
                const auto v = p.get<std::vector<double>>();
                if (v.size() != 3)
                    throw std::invalid_argument("config: feed points are [x, y, z]");
                l.feed_points.push_back({v[0], v[1], v[2]});
            }
        }
        if (j.contains("user_region")) {
            const auto &r = j.at("user_region");
            take(r, "x_min", l.user_region.x_min);
            take(r, "y_min", l.user_region.y_min);
            take(r, "x_max", l.user_region.x_max);
            take(r, "y_max", l.user_region.y_max);
        }
        double p_dbm = cfg.p_max_dbm, n_dbm = cfg.noise_dbm;
        take(j, "p_max_dbm", p_dbm);
        take(j, "noise_dbm", n_dbm);
        cfg.set_powers(p_dbm, n_dbm);
        take(j, "r_min", cfg.r_min);
        take(j, "eta_eff", cfg.eta_eff);
        take(j, "n_values", cfg.n_values);
        take(j, "drops", cfg.drops);
        take(j, "base_seed", cfg.base_seed);
        if (j.contains("schemes")) {
            cfg.schemes.clear();
            for (const auto &s : j.at("schemes"))
                cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
        }
        take(j, "gap_tol", cfg.gap_tol);
        take(j, "sca_eps", cfg.sca_eps);
        take(j, "max_iterations", cfg.max_iterations);
        take(j, "rank_tol", cfg.rank_tol);
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const RunConfig &cfg)
{
    const SystemLayout &l = cfg.layout;
    json j;
    j["waveguides"] = l.waveguides;
    j["length"] = l.length;
    j["pa_height"] = l.pa_height;
    j["carrier_freq"] = l.carrier_freq;
    j["users"] = l.users;
    j["feed_points"] = json::array();
    for (const auto &p : l.feed_points)
        j["feed_points"].push_back({p.x, p.y, p.z});
    j["user_region"] = {{"x_min", l.user_region.x_min},
                        {"y_min", l.user_region.y_min},
                        {"x_max", l.user_region.x_max},
                        {"y_max", l.user_region.y_max}};
    j["p_max_dbm"] = cfg.p_max_dbm;
    j["noise_dbm"] = cfg.noise_dbm;
    j["r_min"] = cfg.r_min;
    j["eta_eff"] = cfg.eta_eff;
    j["n_values"] = cfg.n_values;
    j["drops"] = cfg.drops;
    j["base_seed"] = cfg.base_seed;
    j["schemes"] = json::array();
    for (Scheme s : cfg.schemes)
        j["schemes"].push_back(to_string(s));
    j["gap_tol"] = cfg.gap_tol;
    j["sca_eps"] = cfg.sca_eps;
    j["max_iterations"] = cfg.max_iterations;
    j["rank_tol"] = cfg.rank_tol;
    return j.dump(2);
}

std::string to_string(DropStatus s)
{
    switch (s) {
    case DropStatus::optimal:
        return "optimal";
    case DropStatus::infeasible:
        return "infeasible";
    case DropStatus::fallback:
        return "fallback";
    }
    throw std::invalid_argument("unknown drop status");
}

DropStatus parse_status(const std::string &name)
{
    for (DropStatus s : {DropStatus::optimal, DropStatus::infeasible, DropStatus::fallback})
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown drop status '" + name + "'");
}

std::uint64_t users_seed(std::uint64_t base_seed, int drop_id) { return mix(splitmix64(base_seed), std::uint64_t(drop_id)); }

std::uint64_t cell_seed(std::uint64_t base_seed, int drop_id, Scheme scheme, int n)
{
    std::uint64_t h = splitmix64(std::uint64_t(drop_id));
    h = mix(h, std::uint64_t(scheme) + 1);
    h = mix(h, std::uint64_t(n));
    return base_seed ^ h;
}

DropScenario make_scenario(const RunConfig &cfg, int n, int drop_id)
{
    DropScenario s;
    s.layout = cfg.layout;
    s.layout.pas_per_waveguide = n;
    s.layout.validate();
    s.grid = pa_grid(s.layout);
    s.users = sample_users(s.layout, users_seed(cfg.base_seed, drop_id));
    s.gains = compute_gains(s.layout, s.grid, s.users, cfg.eta_eff);
    return s;
}

ScaConfig sca_config(const RunConfig &cfg, std::uint64_t seed)
{
    ScaConfig sc;
    sc.p_max = cfg.p_max_mw;
    sc.noise = 1.0; // channels are lifted with the noise power folded in
    sc.r_min = cfg.r_min;
    sc.eps = cfg.sca_eps;
    sc.max_iterations = cfg.max_iterations;
    sc.rank_tol = cfg.rank_tol;
    sc.solver.gap_tol = cfg.gap_tol;
    sc.seed = seed;
    return sc;
}

namespace {

void print_log(std::ostream &os, const std::vector<IterationRecord> &log)
{
    for (const auto &r : log)
        os << "iter " << r.iteration << "  objective " << r.objective << "  max_violation " << r.max_violation
           << "  max_rank_residual " << r.max_rank_residual << "  step " << r.step << '\n';
}

bool meets_qos(const std::vector<double> &rates, double r_min)
{
    return std::all_of(rates.begin(), rates.end(), [&](double r) { return r >= r_min - kQosSlack; });
}

void run_rsma(const RunConfig &cfg, const EffectiveChannel &ch, const PowerAllocation &pw, ResultRecord &rec,
              std::ostream *log)
{
    ScaConfig sc = sca_config(cfg, rec.seed);
    const LiftedChannel H = lift_channels(ch, pw, cfg.noise_mw);
    const BeamformingSolution sol = sca_beamforming(H, sc);
    rec.sca_iters = sol.iterations;
    if (sol.w_priv.empty()) {
        rec.status = DropStatus::infeasible;
        return;
    }
    const RsmaRates r = evaluate_solution(ch, pw, sol, cfg.noise_mw);
    rec.sum_rate = r.sum_rate;
    rec.common_rate = r.common;
    rec.user_rates = r.total;
    rec.rank_residual = sol.max_rank_residual();
    if (!meets_qos(r.total, cfg.r_min))
        rec.status = DropStatus::infeasible;
    else if (sol.status == ScaStatus::converged && !sol.randomized)
        rec.status = DropStatus::optimal;
    else
        rec.status = DropStatus::fallback;
    if (log) {
        print_log(*log, sol.log);
        if (sol.refined) {
            *log << "refinement objectives:";
            for (double v : sol.refinement_trace)
                *log << ' ' << v;
            *log << '\n';
        }
        *log << "sca status " << to_string(sol.status) << (sol.randomized ? ", randomized" : "")
             << (sol.refined ? ", refined" : "") << '\n';
    }
}

void run_noma(const RunConfig &cfg, const EffectiveChannel &ch, const PowerAllocation &pw, ResultRecord &rec,
              std::ostream *log)
{
    ScaConfig sc = sca_config(cfg, rec.seed);
    const LiftedChannel H = lift_channels(ch, pw, cfg.noise_mw);
    const NomaSolution sol = noma_beamforming(H, sc);
    rec.sca_iters = sol.iterations;
    if (sol.w.empty()) {
        rec.status = DropStatus::infeasible;
        return;
    }
    std::vector<Eigen::MatrixXcd> W;
    for (const auto &w : sol.w)
        W.push_back(w * w.adjoint());
    rec.user_rates = noma_rates(H, W, sol.order, 1.0);
    rec.sum_rate = std::accumulate(rec.user_rates.begin(), rec.user_rates.end(), 0.0);
    rec.common_rate = 0.0;
    rec.rank_residual = sol.rank_residuals.empty()
                            ? 0.0
                            : *std::max_element(sol.rank_residuals.begin(), sol.rank_residuals.end());
    if (!meets_qos(rec.user_rates, cfg.r_min))
        rec.status = DropStatus::infeasible;
    else if (sol.status == ScaStatus::converged && !sol.randomized)
        rec.status = DropStatus::optimal;
    else
        rec.status = DropStatus::fallback;
    if (log) {
        print_log(*log, sol.log);
        *log << "sca status " << to_string(sol.status) << (sol.randomized ? ", randomized" : "") << '\n';
    }
}

} // namespace

double mask_sum_rate(const RunConfig &cfg, const DropScenario &scenario, const ActivationMask &mask,
                     std::uint64_t seed)
{
    ResultRecord rec;
    rec.seed = seed;
    run_rsma(cfg, effective_channel(mask, scenario.gains), power_coefficients(mask), rec, nullptr);
    if (rec.status == DropStatus::infeasible)
        return -std::numeric_limits<double>::infinity();
    return rec.sum_rate;
}

ResultRecord run_drop(const RunConfig &cfg, Scheme scheme, int n, int drop_id, std::ostream *log)
{
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.drop_id = drop_id;
    rec.seed = cell_seed(cfg.base_seed, drop_id, scheme, n);
    rec.scheme = scheme;
    rec.n = n;
    rec.m = cfg.layout.waveguides;
    rec.k = cfg.layout.users;
    rec.user_rates.assign(rec.k, 0.0);

    const DropScenario s = make_scenario(cfg, n, drop_id);
    try {
        if (scheme == Scheme::ca_rsma) {
            const ConventionalChannels cc = conventional_channels(s.layout, s.users, 1.0);
            rec.n_active_pas = 0;
            run_rsma(cfg, cc.channels, cc.power, rec, log);
        } else {
            ActivationMask mask;
            switch (scheme) {
            case Scheme::fap_rsma:
                mask = baseline_masks(s.layout, s.grid, s.users).full;
                break;
            case Scheme::d_rsma:
                mask = baseline_masks(s.layout, s.grid, s.users).nearest;
                break;
            default:
                mask = greedy_activation(s.gains, s.grid, s.users).mask;
                break;
            }
            rec.n_active_pas = mask.count();
            const EffectiveChannel ch = effective_channel(mask, s.gains);
            const PowerAllocation pw = power_coefficients(mask);
            if (scheme == Scheme::pa_noma)
                run_noma(cfg, ch, pw, rec, log);
            else
                run_rsma(cfg, ch, pw, rec, log);
        }
    } catch (const DegenerateChannelError &e) {
        // A user with no usable channel cannot meet its QoS; the drop is recorded, not fatal.
        rec.status = DropStatus::infeasible;
        if (log)
            *log << "degenerate channel: " << e.what() << '\n';
    }
    for (double &r : rec.user_rates)
        r = std::max(0.0, r);
    rec.sum_rate = std::max(0.0, rec.sum_rate);
    rec.common_rate = std::max(0.0, rec.common_rate);
    rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace {

struct Cell {
    int n;
    Scheme scheme;
    int drop;
};

std::vector<Cell> cells(const RunConfig &cfg)
{
    std::vector<int> ns = cfg.n_values;
    std::sort(ns.begin(), ns.end());
    std::vector<Cell> out;
    for (int n : ns)
        for (Scheme s : cfg.schemes)
            for (int d = 0; d < cfg.drops; ++d)
                out.push_back({n, s, d});
    return out;
}

void sort_records(std::vector<ResultRecord> &rows)
{
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRecord &a, const ResultRecord &b) {
        if (a.n != b.n)
            return a.n < b.n;
        if (a.scheme != b.scheme)
            return a.scheme < b.scheme;
        return a.drop_id < b.drop_id;
    });
}

} // namespace

std::vector<ResultRecord> sweep(const RunConfig &cfg, int jobs)
{
    cfg.validate();
    if (jobs < 1)
        throw std::invalid_argument("sweep: jobs must be at least 1");
    const std::vector<Cell> work = cells(cfg);
    std::vector<ResultRecord> rows(work.size());
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::size_t i = 0; i < work.size(); ++i) {
        try {
            rows[i] = run_drop(cfg, work[i].scheme, work[i].n, work[i].drop);
        } catch (...) {
#pragma omp critical(pinch_sweep_error)
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
    sort_records(rows);
    return rows;
}

std::vector<ResultRecord> sweep_serial(const RunConfig &cfg)
{
    cfg.validate();
    std::vector<ResultRecord> rows;
    for (const Cell &c : cells(cfg))
        rows.push_back(run_drop(cfg, c.scheme, c.n, c.drop));
    sort_records(rows);
    return rows;
}

} // namespace pinch
