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
#include <stdexcept>
#include <vector>

namespace pinch {

struct PaIndex {
    int n = 0; // position along the waveguide
    int m = 0; // waveguide

    bool operator==(const PaIndex &) const = default;
    auto operator<=>(const PaIndex &) const = default;
};

// Binary activation pattern delta(n, m) together with the ordered list of
// active PAs. The two views are kept in sync by activate()/deactivate().
class ActivationMask {
  public:
    ActivationMask() = default;
    ActivationMask(int pas, int waveguides) : pas_(pas), waveguides_(waveguides), delta_(std::size_t(pas) * waveguides, 0) {}

    static ActivationMask all_on(int pas, int waveguides)
    {
        ActivationMask mask(pas, waveguides);
        for (int m = 0; m < waveguides; ++m)
            for (int n = 0; n < pas; ++n)
                mask.activate({n, m});
        return mask;
    }

    int pas() const { return pas_; }
    int waveguides() const { return waveguides_; }

    bool active(int n, int m) const { return delta_[index(n, m)] != 0; }
    bool active(PaIndex i) const { return active(i.n, i.m); }

    void activate(PaIndex i)
    {
        auto &d = delta_[index(i.n, i.m)];
        if (!d) {
            d = 1;
            active_set_.push_back(i);
        }
    }

    void deactivate(PaIndex i)
    {
        auto &d = delta_[index(i.n, i.m)];
        if (d) {
            d = 0;
            std::erase(active_set_, i);
        }
    }

    const std::vector<PaIndex> &active_set() const { return active_set_; }
    int count() const { return int(active_set_.size()); }

    int count_on(int m) const
    {
        int c = 0;
        for (int n = 0; n < pas_; ++n)
            c += delta_[index(n, m)];
        return c;
    }

    bool operator==(const ActivationMask &o) const
    {
        return pas_ == o.pas_ && waveguides_ == o.waveguides_ && delta_ == o.delta_;
    }

  private:
    std::size_t index(int n, int m) const
    {
        if (n < 0 || n >= pas_ || m < 0 || m >= waveguides_)
            throw std::out_of_range("ActivationMask: PA index out of range");
        return std::size_t(n) * waveguides_ + m;
    }

    int pas_ = 0;
    int waveguides_ = 0;
    std::vector<std::uint8_t> delta_;
    std::vector<PaIndex> active_set_;
};

} // namespace pinch
