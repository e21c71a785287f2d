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

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pinch/bench.hpp"

namespace pinch {

const std::vector<std::string> kCsvColumns{"drop_id",        "seed",         "scheme",         "N",
                                           "M",              "K",            "sum_rate_bpshz", "common_rate_bpshz",
                                           "user_rates_json", "n_active_pas", "sca_iters",      "status",
                                           "rank_residual",  "time_ms"};

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string &s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_line(const std::string &line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    if (quoted)
        throw std::runtime_error("csv: unterminated quote");
    return fields;
}

double to_double(const std::string &s)
{
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::runtime_error("csv: bad number '" + s + "'");
    return v;
}

int to_int(const std::string &s)
{
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size())
        throw std::runtime_error("csv: bad integer '" + s + "'");
    return v;
}

} // namespace

void write_csv(std::ostream &os, const std::vector<ResultRecord> &rows)
{
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
        os << (i ? "," : "") << kCsvColumns[i];
    os << '\n';
    for (const auto &r : rows) {
        std::string rates = "[";
        for (std::size_t k = 0; k < r.user_rates.size(); ++k)
            rates += (k ? "," : "") + fmt(r.user_rates[k]);
        rates += "]";
        os << r.drop_id << ',' << r.seed << ',' << to_string(r.scheme) << ',' << r.n << ',' << r.m << ',' << r.k
           << ',' << fmt(r.sum_rate) << ',' << fmt(r.common_rate) << ',' << quote(rates) << ',' << r.n_active_pas
           << ',' << r.sca_iters << ',' << to_string(r.status) << ',' << fmt(r.rank_residual) << ','
           << fmt(r.time_ms) << '\n';
    }
}

void write_csv(const std::string &path, const std::vector<ResultRecord> &rows)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(out, rows);
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

std::vector<ResultRecord> read_csv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("csv: missing header");
    if (split_line(line) != kCsvColumns)
        throw std::runtime_error("csv: unexpected header");

    std::vector<ResultRecord> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto f = split_line(line);
        if (f.size() != kCsvColumns.size())
            throw std::runtime_error("csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                                     " fields");
        try {
            ResultRecord r;
            r.drop_id = to_int(f[0]);
            r.seed = std::stoull(f[1]);
            r.scheme = parse_scheme(f[2]);
            r.n = to_int(f[3]);
            r.m = to_int(f[4]);
            r.k = to_int(f[5]);
            r.sum_rate = to_double(f[6]);
            r.common_rate = to_double(f[7]);
            r.user_rates = nlohmann::json::parse(f[8]).get<std::vector<double>>();
            r.n_active_pas = to_int(f[9]);
            r.sca_iters = to_int(f[10]);
            r.status = parse_status(f[11]);
            r.rank_residual = to_double(f[12]);
            r.time_ms = to_double(f[13]);
            rows.push_back(std::move(r));
        } catch (const std::exception &e) {
            throw std::runtime_error("csv: line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

std::vector<ResultRecord> read_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return read_csv(in);
}

} // namespace pinch
