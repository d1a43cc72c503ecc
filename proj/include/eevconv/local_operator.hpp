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

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eevconv/pauli.hpp"

namespace eevconv {

struct Term {
    std::complex<double> coeff;
    PauliString string;
};

/// A complex-weighted sum of Pauli strings supported on a window of sites
/// [1, window]. Terms are merged (one entry per distinct string) and kept
/// sorted, so equality of term lists is equality of operators.
class LocalOperator {
  public:
    LocalOperator() : window_(1) {}

    LocalOperator(int window, std::vector<Term> terms) : window_(window) {
        if (window < 1)
            throw std::invalid_argument("LocalOperator: window must be >= 1");
        std::map<PauliString, std::complex<double>> merged;
        for (auto& t : terms) {
            if (!t.string.is_identity() && t.string.max_site() > window)
                throw std::invalid_argument(
                    "LocalOperator: term " + t.string.str() +
                    " exceeds window " + std::to_string(window));
            merged[t.string] += t.coeff;
        }
        for (auto& [s, c] : merged) {
            if (c != std::complex<double>(0.0, 0.0))
                terms_.push_back(Term{c, s});
        }
    }

    int window() const { return window_; }
    std::span<const Term> terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// tr A = 0 exactly when no identity string carries weight.
    bool is_traceless() const {
        for (const auto& t : terms_)
            if (t.string.is_identity()) return false;
        return true;
    }

    /// Pauli strings are Hermitian, so after merging the operator is
    /// Hermitian exactly when every coefficient is real.
    bool is_hermitian(double tol = 1e-12) const {
        for (const auto& t : terms_)
            if (std::abs(t.coeff.imag()) > tol) return false;
        return true;
    }

    /// Every string starts at site 1 (the unique TI-equivalent representative).
    bool is_canonical() const {
        for (const auto& t : terms_)
            if (t.string.is_identity() || t.string.min_site() != 1) return false;
        return true;
    }

    /// The operator is exactly window()-local: some string spans the full window.
    bool is_exactly_window_local() const {
        for (const auto& t : terms_)
            if (!t.string.is_identity() && t.string.locality() == window_) return true;
        return false;
    }

    LocalOperator scaled(std::complex<double> factor) const {
        std::vector<Term> out(terms_.begin(), terms_.end());
        for (auto& t : out) t.coeff *= factor;
        return LocalOperator(window_, std::move(out));
    }

    double coefficient_l2_norm() const {
        double s = 0.0;
        for (const auto& t : terms_) s += std::norm(t.coeff);
        return std::sqrt(s);
    }

    friend bool operator==(const LocalOperator& a, const LocalOperator& b) {
        if (a.window_ != b.window_ || a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].string != b.terms_[i].string ||
                a.terms_[i].coeff != b.terms_[i].coeff)
                return false;
        return true;
    }

  private:
    std::vector<Term> terms_;
    int window_;
};

/// Translates every string so its support starts at site 1 and merges
/// coinciding strings. For any TI state the expectation value is unchanged,
/// which makes the result the canonical representative of the input.
inline LocalOperator canonicalize(const LocalOperator& a) {
    if (!a.is_traceless())
        throw std::invalid_argument("canonicalize: operator must be traceless");
    std::vector<Term> out;
    out.reserve(a.terms().size());
    int window = 1;
    for (const auto& t : a.terms()) {
        PauliString::Letters shifted;
        const int offset = t.string.min_site() - 1;
        for (const auto& [site, letter] : t.string.letters())
            shifted.emplace_back(site - offset, letter);
        PauliString s(std::move(shifted));
        window = std::max(window, s.locality());
        out.push_back(Term{t.coeff, std::move(s)});
    }
    return LocalOperator(window, std::move(out));
}

/// Dimension of the space of canonical traceless k'-local operators:
/// (d_loc^2 - 1) * d_loc^(2k' - 2).
inline std::int64_t parameter_space_dim(int d_loc, int k_prime) {
    if (d_loc < 2) throw std::invalid_argument("parameter_space_dim: d_loc >= 2");
    if (k_prime < 1) throw std::invalid_argument("parameter_space_dim: k' >= 1");
    std::int64_t d = d_loc;
    std::int64_t power = 1;
    for (int i = 0; i < 2 * k_prime - 2; ++i) power *= d;
    return (d * d - 1) * power;
}

}  // namespace eevconv
