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

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pinch/bench.hpp"
#include "pinch/validate.hpp"

using namespace pinch;

namespace {

RunConfig config_from(const std::string &path) { return path.empty() ? parse_config("{}") : load_config(path); }

void print_record(std::ostream &os, const ResultRecord &r)
{
    os << "drop_id       " << r.drop_id << "\n"
       << "seed          " << r.seed << "\n"
       << "scheme        " << to_string(r.scheme) << "\n"
       << "N, M, K       " << r.n << ", " << r.m << ", " << r.k << "\n"
       << "sum_rate      " << r.sum_rate << " bits/s/Hz\n"
       << "common_rate   " << r.common_rate << " bits/s/Hz\n"
       << "user_rates   ";
    for (double v : r.user_rates)
        os << ' ' << v;
    os << "\n"
       << "active PAs    " << r.n_active_pas << "\n"
       << "sca_iters     " << r.sca_iters << "\n"
       << "status        " << to_string(r.status) << "\n"
       << "rank_residual " << r.rank_residual << "\n"
       << "time_ms       " << r.time_ms << "\n";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"pinching-antenna RSMA simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scheme_name = "SD-RSMA";
    int n = 20, drop_id = 0;
    auto *drop = app.add_subcommand("drop", "run one scenario and print the record and the SCA log");
    drop->add_option("--config", config_path, "JSON run configuration");
    drop->add_option("--scheme", scheme_name, "SD-RSMA, FAP-RSMA, D-RSMA, PA-NOMA or CA-RSMA");
    drop->add_option("--n", n, "candidate PAs per waveguide");
    drop->add_option("--drop", drop_id, "drop index");

    std::string out_path;
    int jobs = 1;
    auto *sweep_cmd = app.add_subcommand("sweep", "run the Monte Carlo sweep and write the CSV");
    sweep_cmd->add_option("--config", config_path, "JSON run configuration");
    sweep_cmd->add_option("--out", out_path, "output CSV path")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    ValidationOptions vopt;
    auto *validate = app.add_subcommand("validate", "run the oracle and property checks");
    validate->add_option("--seed", vopt.seed, "seed for the random instances");
    validate->add_option("--exhaustive", vopt.exhaustive_instances, "tiny instances for the exhaustive search");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*drop) {
            const RunConfig cfg = config_from(config_path);
            const ResultRecord r = run_drop(cfg, parse_scheme(scheme_name), n, drop_id, &std::cout);
            std::cout << '\n';
            print_record(std::cout, r);
            return 0;
        }
        if (*sweep_cmd) {
            const RunConfig cfg = config_from(config_path);
            const auto rows = sweep(cfg, jobs);
            write_csv(out_path, rows);
            std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
            return 0;
        }
        const auto checks = run_validation(vopt, &std::cout);
        bool ok = true;
        for (const auto &c : checks)
            ok = ok && c.passed;
        std::cout << (ok ? "all validations passed" : "validation FAILED") << '\n';
        return ok ? 0 : 1;
    } catch (const std::exception &e) {
        std::cerr << "pinchsim: " << e.what() << '\n';
        return 2;
    }
}
