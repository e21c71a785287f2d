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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pinch/activation.hpp"
#include "pinch/beamform.hpp"
#include "pinch/channel.hpp"
#include "pinch/geometry.hpp"

namespace pinch {

enum class Scheme { sd_rsma, fap_rsma, d_rsma, pa_noma, ca_rsma };

std::string to_string(Scheme s);        // "SD-RSMA", ...
Scheme parse_scheme(const std::string &name);
const std::vector<Scheme> &all_schemes();

double dbm_to_mw(double dbm);

struct RunConfig {
    SystemLayout layout;           // layout.users is K; pas_per_waveguide is overridden per sweep point
    double p_max_dbm = 10.0;
    double noise_dbm = -80.0;
    double p_max_mw = 10.0;        // derived from p_max_dbm
    double noise_mw = 1e-8;        // derived from noise_dbm
    double r_min = 0.1;            // bits/s/Hz
    double eta_eff = kDefaultEtaEff;
    std::vector<int> n_values{20, 40, 60, 80, 100};
    int drops = 100;
    std::uint64_t base_seed = 1;
    std::vector<Scheme> schemes = all_schemes();
    double gap_tol = 1e-7;
    double sca_eps = 1e-3;
    int max_iterations = 50;
    double rank_tol = 1e-5;

    // Recomputes the linear powers from the dBm fields.
    void set_powers(double p_max_dbm, double noise_dbm);
    void validate() const;
};

// Every key is optional; "{}" gives the defaults. Unknown keys are rejected.
RunConfig parse_config(const std::string &json_text);
RunConfig load_config(const std::string &path);
std::string to_json(const RunConfig &cfg);

enum class DropStatus { optimal, infeasible, fallback };

std::string to_string(DropStatus s);
DropStatus parse_status(const std::string &name);

struct ResultRecord {
    int drop_id = 0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::sd_rsma;
    int n = 0, m = 0, k = 0;
    double sum_rate = 0.0;
    double common_rate = 0.0;
    std::vector<double> user_rates;
    int n_active_pas = 0;
    int sca_iters = 0;
    DropStatus status = DropStatus::infeasible;
    double rank_residual = 0.0;
    double time_ms = 0.0;
};

// All schemes see the same users for a given drop; the per-cell seed (recorded in the
// CSV) only drives the randomized parts of the solver.
std::uint64_t users_seed(std::uint64_t base_seed, int drop_id);
std::uint64_t cell_seed(std::uint64_t base_seed, int drop_id, Scheme scheme, int n);

// Everything up to the beamforming stage of one drop.
struct DropScenario {
    SystemLayout layout;
    Grid<Point3> grid;
    UserDrop users;
    GainTensor gains;
};

DropScenario make_scenario(const RunConfig &cfg, int n, int drop_id);
ScaConfig sca_config(const RunConfig &cfg, std::uint64_t seed);

// RSMA sum rate on a fixed mask; -infinity when no QoS-feasible solution is found.
double mask_sum_rate(const RunConfig &cfg, const DropScenario &scenario, const ActivationMask &mask,
                     std::uint64_t seed);

// Deterministic in (cfg, scheme, n, drop_id) apart from time_ms. `log` receives the SCA trace.
ResultRecord run_drop(const RunConfig &cfg, Scheme scheme, int n, int drop_id, std::ostream *log = nullptr);

// Cartesian product n_values x schemes x drops, sorted by (N, scheme, drop_id).
std::vector<ResultRecord> sweep(const RunConfig &cfg, int jobs);
std::vector<ResultRecord> sweep_serial(const RunConfig &cfg);

// CSV with the fixed column order; doubles written with 17 significant digits.
extern const std::vector<std::string> kCsvColumns;
void write_csv(std::ostream &os, const std::vector<ResultRecord> &rows);
void write_csv(const std::string &path, const std::vector<ResultRecord> &rows);
std::vector<ResultRecord> read_csv(std::istream &is);
std::vector<ResultRecord> read_csv(const std::string &path);

} // namespace pinch
