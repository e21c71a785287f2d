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

namespace pinch {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    int sdp_instances = 50;
    int lp_instances = 20;
    int surrogate_points = 100;
    int exhaustive_instances = 5; // each one runs the SCA on 49 masks
};

// Oracle and property checks over the solver, the rate surrogates and the activation rule.
std::vector<ValidationCheck> run_validation(const ValidationOptions &options = {}, std::ostream *progress = nullptr);

} // namespace pinch
