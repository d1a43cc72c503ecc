// Copyright 2026 The eevconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <compare>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eevconv {

enum class Pauli : std::uint8_t { X = 1, Y = 2, Z = 3 };

inline char to_char(Pauli p) {
    switch (p) {
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

inline std::optional<Pauli> pauli_from_char(char c) {
    switch (c) {
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: return std::nullopt;
    }
}

/// A tensor product of single-site Pauli operators on a 1-based site lattice.
/// Only non-identity letters are stored, sorted by site; the empty string is
/// the identity operator. Site indices are absolute positions on the chain,
/// so the same type serves both window-local operators and their translates.
class PauliString {
  public:
    using Letters = std::vector<std::pair<int, Pauli>>;

    PauliString() = default;

    PauliString(std::initializer_list<std::pair<int, Pauli>> init)
        : letters_(init) {
        std::sort(letters_.begin(), letters_.end());
        validate();
    }

    explicit PauliString(Letters letters) : letters_(std::move(letters)) {
        std::sort(letters_.begin(), letters_.end());
        validate();
    }

    static PauliString identity() { return PauliString{}; }

    static PauliString single(int site, Pauli p) {
        return PauliString{{site, p}};
    }

    bool is_identity() const { return letters_.empty(); }

    /// Number of non-identity letters (the weight of the string).
    int weight() const { return static_cast<int>(letters_.size()); }

    int min_site() const {
        require_nonempty();
        return letters_.front().first;
    }

    int max_site() const {
        require_nonempty();
        return letters_.back().first;
    }

    /// Size of the smallest consecutive region containing the support;
    /// a string of locality kappa is exactly kappa-local. Zero for identity.
    int locality() const {
        return letters_.empty() ? 0 : max_site() - min_site() + 1;
    }

    std::span<const std::pair<int, Pauli>> letters() const { return letters_; }

    std::optional<Pauli> at(int site) const {
        auto it = std::lower_bound(letters_.begin(), letters_.end(),
                                   std::make_pair(site, Pauli::X));
        if (it != letters_.end() && it->first == site) return it->second;
        return std::nullopt;
    }

    std::string str() const {
        if (letters_.empty()) return "I";
        std::string out;
        for (const auto& [site, p] : letters_) {
            out += to_char(p);
            out += std::to_string(site);
        }
        return out;
    }

    // Lexicographic by (site, letter) with X < Y < Z.
    friend auto operator<=>(const PauliString&, const PauliString&) = default;

  private:
    void validate() const {
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (letters_[i].first < 1)
                throw std::invalid_argument("PauliString: sites are 1-based");
            if (i > 0 && letters_[i].first == letters_[i - 1].first)
                throw std::invalid_argument("PauliString: duplicate site " +
                                            std::to_string(letters_[i].first));
        }
    }

    void require_nonempty() const {
        if (letters_.empty())
            throw std::logic_error("PauliString: identity has no support");
    }

    Letters letters_;
};

/// Product of two strings, with the scalar prefactor tracked as a power of i
/// so that composition stays exact: P * Q == i^phase_power * string.
struct StringProduct {
    int phase_power = 0;  // modulo 4
    PauliString string;

    std::complex<double> phase() const {
        static constexpr std::complex<double> table[4] = {
            {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
        return table[((phase_power % 4) + 4) % 4];
    }
};

namespace detail {

// sigma_a * sigma_b for a != b: the result letter is the third axis and the
// phase is +i for a cyclic pair (XY, YZ, ZX), -i otherwise.
inline std::pair<int, Pauli> single_site_product(Pauli a, Pauli b) {
    int ia = static_cast<int>(a), ib = static_cast<int>(b);
    Pauli c = static_cast<Pauli>(6 - ia - ib);
    int power = ((ib - ia + 3) % 3 == 1) ? 1 : 3;
    return {power, c};
}

}  // namespace detail

inline StringProduct multiply_strings(const PauliString& p, const PauliString& q) {
    PauliString::Letters out;
    out.reserve(p.weight() + q.weight());
    int power = 0;

    auto pi = p.letters().begin(), pe = p.letters().end();
    auto qi = q.letters().begin(), qe = q.letters().end();
    while (pi != pe || qi != qe) {
        if (qi == qe || (pi != pe && pi->first < qi->first)) {
            out.push_back(*pi++);
        } else if (pi == pe || qi->first < pi->first) {
            out.push_back(*qi++);
        } else {
            if (pi->second != qi->second) {
                auto [dp, letter] = detail::single_site_product(pi->second, qi->second);
                power += dp;
                out.emplace_back(pi->first, letter);
            }
            // equal letters square to the identity
            ++pi;
            ++qi;
        }
    }
    return StringProduct{power & 3, PauliString(std::move(out))};
}

/// Number of sites of a periodic chain. Operators are placed on sites 1..N
/// with wraparound.
struct ChainContext {
    int sites;
};

/// T^l P T^{-l}: every site s moves to ((s - 1 + l) mod N) + 1.
inline PauliString translate(const PauliString& p, int shift, const ChainContext& ctx) {
    const int n = ctx.sites;
    if (n < 1) throw std::invalid_argument("translate: chain needs at least one site");
    if (!p.is_identity() && p.max_site() > n)
        throw std::invalid_argument("translate: string does not fit on the chain");
    PauliString::Letters out;
    out.reserve(p.weight());
    for (const auto& [site, letter] : p.letters()) {
        int s = ((site - 1 + shift) % n + n) % n + 1;
        out.emplace_back(s, letter);
    }
    return PauliString(std::move(out));
}

}  // namespace eevconv
