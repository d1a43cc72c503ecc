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

#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "eevconv/local_operator.hpp"
#include "eevconv/pauli.hpp"

// Normalized traces of products of the translation-invariant Hamiltonian
// H = sum_l T^l h T^{-l} with local observables, computed symbolically from
// the Pauli string algebra. tr(P Q)/2^N is 1 when Q == P and 0 otherwise,
// so every trace reduces to bookkeeping of string matches and exact +/-1,
// +/-i phases; no 2^N-dimensional object is ever formed. The results are
// exact for any chain that fits the operators and are N-independent once N
// is at or above the stated validity windows.

namespace eevconv {

/// Smallest N for which tr(HA)/d stops depending on N.
inline int ham_trace_min_sites(int k, int k_prime) { return k + k_prime - 1; }

/// Smallest N for which tr(H^2 A)/d stops depending on N.
inline int ham2_trace_min_sites(int k, int k_prime) { return 2 * k + k_prime - 2; }

namespace detail {

using TermMap = std::map<PauliString, std::complex<double>>;

inline TermMap term_map(const LocalOperator& op) {
    TermMap m;
    for (const auto& t : op.terms()) m[t.string] = t.coeff;
    return m;
}

// tr(H_{l1} H_{l2} A)/d for one pair of offsets, A given as a string->coeff map.
inline std::complex<double> offset_pair_trace(const LocalOperator& h, int l1, int l2,
                                              const TermMap& a, const ChainContext& ctx) {
    std::complex<double> total = 0.0;
    for (const auto& ti : h.terms()) {
        const PauliString pi = translate(ti.string, l1, ctx);
        for (const auto& tj : h.terms()) {
            const PauliString pj = translate(tj.string, l2, ctx);
            StringProduct prod = multiply_strings(pi, pj);
            auto it = a.find(prod.string);
            if (it != a.end())
                total += ti.coeff * tj.coeff * it->second * prod.phase();
        }
    }
    return total;
}

inline void require_traceless(const LocalOperator& a, const char* who) {
    if (!a.is_traceless())
        throw std::invalid_argument(std::string(who) + ": operator must be traceless");
}

inline void require_min_sites(const ChainContext& ctx, int needed, const char* who) {
    if (ctx.sites < needed)
        throw std::domain_error(std::string(who) + ": chain of " +
                                std::to_string(ctx.sites) + " sites is below the validity window " +
                                std::to_string(needed));
}

}  // namespace detail

/// tr(HA)/d. Only offsets whose translate of an h-string coincides with an
/// A-string contribute, which is what makes the value N-independent for
/// N >= k + k' - 1.
inline std::complex<double> ham_op_trace(const LocalOperator& h, const LocalOperator& a,
                                         const ChainContext& ctx) {
    detail::require_traceless(a, "ham_op_trace");
    detail::require_min_sites(ctx, ham_trace_min_sites(h.window(), a.window()), "ham_op_trace");
    const auto amap = detail::term_map(a);
    std::complex<double> total = 0.0;
    for (int l = 0; l < ctx.sites; ++l) {
        for (const auto& t : h.terms()) {
            auto it = amap.find(translate(t.string, l, ctx));
            if (it != amap.end()) total += t.coeff * it->second;
        }
    }
    return total;
}

/// tr(H^2 A)/d via the full double offset sum; N-independent for N >= 2k + k' - 2.
inline std::complex<double> ham2_op_trace(const LocalOperator& h, const LocalOperator& a,
                                          const ChainContext& ctx) {
    detail::require_traceless(a, "ham2_op_trace");
    detail::require_min_sites(ctx, ham2_trace_min_sites(h.window(), a.window()), "ham2_op_trace");
    const auto amap = detail::term_map(a);
    std::complex<double> total = 0.0;
    for (int l1 = 0; l1 < ctx.sites; ++l1)
        for (int l2 = 0; l2 < ctx.sites; ++l2)
            total += detail::offset_pair_trace(h, l1, l2, amap, ctx);
    return total;
}

namespace detail {

inline void moment_recurse(const LocalOperator& h, const ChainContext& ctx, int remaining,
                           const TermMap& acc, std::complex<double>& out) {
    if (remaining == 0) {
        auto it = acc.find(PauliString::identity());
        if (it != acc.end()) out += it->second;
        return;
    }
    for (int l = 0; l < ctx.sites; ++l) {
        TermMap next;
        for (const auto& [r, c] : acc) {
            for (const auto& t : h.terms()) {
                StringProduct prod = multiply_strings(r, translate(t.string, l, ctx));
                next[prod.string] += c * t.coeff * prod.phase();
            }
        }
        moment_recurse(h, ctx, remaining - 1, next, out);
    }
}

}  // namespace detail

/// tr(H^m)/d for m <= 4. Uses TI once to trade one offset sum for a factor
/// of N: tr(H^m) = N tr(h H^{d_2} ... H^{d_m}) summed over relative offsets.
inline double ham_moment(const LocalOperator& h, const ChainContext& ctx, int m) {
    if (m < 0 || m > 4)
        throw std::invalid_argument("ham_moment: m must be in [0, 4]");
    detail::require_traceless(h, "ham_moment");
    if (!h.is_hermitian())
        throw std::invalid_argument("ham_moment: h must be Hermitian");
    detail::require_min_sites(ctx, h.window(), "ham_moment");
    if (m == 0) return 1.0;

    std::complex<double> total = 0.0;
    detail::TermMap seed;
    for (const auto& t : h.terms()) seed[t.string] = t.coeff;
    detail::moment_recurse(h, ctx, m - 1, seed, total);
    total *= static_cast<double>(ctx.sites);
    return total.real();
}

/// tr(Hh)tr(H^2 A)/d^2 - tr(H^2 h)tr(HA)/d^2. Zero is necessary for the EEV
/// of A to admit a target function with faster-than-1/N convergence; a
/// nonzero value certifies the Omega(1/N) obstruction.
inline std::complex<double> obstruction_residual(const LocalOperator& h, const LocalOperator& a,
                                                 const ChainContext& ctx) {
    return ham_op_trace(h, h, ctx) * ham2_op_trace(h, a, ctx) -
           ham2_op_trace(h, h, ctx) * ham_op_trace(h, a, ctx);
}

struct WitnessResult {
    LocalOperator op;                  // a single unit-coefficient Pauli string
    std::complex<double> g1_overlap;   // tr(G1 A)/d, nonzero by construction
};

/// Builds the exactly (3k-1)-local witness string for a canonical exactly
/// k-local h. Expanding G1 = 2 sum_l H_l H_{l+2k-1}, products of two h-strings
/// that each span sites 1..k give strings whose support contains positions
/// 1, k, 2k, 3k-1. Any such string A has tr(HA) = 0 (all H-strings are
/// k-local) while tr(H^2 A) = tr(G1 A) != 0, so the obstruction residual is
/// nonzero. Ties are broken by picking the lexicographically smallest string.
inline WitnessResult witness_operator(const LocalOperator& h) {
    const int k = h.window();
    if (!h.is_traceless())
        throw std::invalid_argument("witness_operator: h must be traceless");
    if (!h.is_hermitian())
        throw std::invalid_argument("witness_operator: h must be Hermitian");
    if (!h.is_canonical())
        throw std::invalid_argument("witness_operator: h must be canonical");
    if (!h.is_exactly_window_local())
        throw std::invalid_argument("witness_operator: h must be exactly k-local");

    auto spans_window = [k](const PauliString& s) {
        return !s.is_identity() && s.min_site() == 1 && s.max_site() == k;
    };

    std::set<PauliString> candidates;
    for (const auto& ti : h.terms()) {
        if (!spans_window(ti.string)) continue;
        for (const auto& tj : h.terms()) {
            if (!spans_window(tj.string)) continue;
            PauliString::Letters letters(ti.string.letters().begin(),
                                         ti.string.letters().end());
            for (const auto& [site, letter] : tj.string.letters())
                letters.emplace_back(site + 2 * k - 1, letter);
            candidates.insert(PauliString(std::move(letters)));
        }
    }

    const ChainContext ctx{5 * k + 1};  // inside every validity window
    for (const auto& cand : candidates) {
        detail::TermMap amap{{cand, 1.0}};
        std::complex<double> overlap = 0.0;
        for (int l = 0; l < ctx.sites; ++l)
            overlap += detail::offset_pair_trace(h, l, (l + 2 * k - 1) % ctx.sites, amap, ctx);
        overlap *= 2.0;
        if (std::abs(overlap) > 1e-12) {
            LocalOperator a(3 * k - 1, {Term{1.0, cand}});
            return WitnessResult{std::move(a), overlap};
        }
    }
    throw std::runtime_error("witness_operator: no qualifying string in the G1 expansion");
}

}  // namespace eevconv
