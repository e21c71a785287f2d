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

// Times the OpenMP kernels against their serial references and checks they agree.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "pinch/activation.hpp"
#include "pinch/bench.hpp"
#include "pinch/channel.hpp"

using namespace pinch;

namespace {

double time_ms(const std::function<void()> &fn, int reps)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char *what, double serial, double parallel, bool same)
{
    std::printf("%-16s serial %10.3f ms   parallel %10.3f ms   speedup %5.2fx   %s\n", what, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char **argv)
{
    const int drops = argc > 1 ? std::atoi(argv[1]) : 4;
    const int threads = omp_get_max_threads();
    std::printf("threads: %d\n", threads);

    RunConfig cfg;
    SystemLayout layout = cfg.layout;
    layout.pas_per_waveguide = 100;
    layout.users = 16;
    const auto grid = pa_grid(layout);
    const auto users = sample_users(layout, 7);

    GainTensor gs, gp;
    const double g_serial = time_ms([&] { gs = compute_gains_serial(layout, grid, users); }, 200);
    const double g_parallel = time_ms([&] { gp = compute_gains(layout, grid, users); }, 200);
    report("gains", g_serial, g_parallel, gs == gp);

    Grid<double> ds, dp;
    const double d_serial = time_ms([&] { ds = distance_table_serial(grid, users); }, 2000);
    const double d_parallel = time_ms([&] { dp = distance_table(grid, users); }, 2000);
    report("distance_table", d_serial, d_parallel, ds.data() == dp.data());

    cfg.n_values = {20, 60};
    cfg.drops = drops;
    std::vector<ResultRecord> rs, rp;
    const double s_serial = time_ms([&] { rs = sweep_serial(cfg); }, 1);
    const double s_parallel = time_ms([&] { rp = sweep(cfg, threads); }, 1);
    bool same = rs.size() == rp.size();
    for (std::size_t i = 0; same && i < rs.size(); ++i)
        same = rs[i].sum_rate == rp[i].sum_rate && rs[i].user_rates == rp[i].user_rates &&
               rs[i].status == rp[i].status;
    report("sweep", s_serial, s_parallel, same);
    return same && gs == gp && ds.data() == dp.data() ? 0 : 1;
}
