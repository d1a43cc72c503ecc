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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "eevconv/local_operator.hpp"
#include "eevconv/pauli.hpp"

namespace eevconv {

namespace detail {

// Computational basis: bit (s-1) of the index holds site s, bit value 1 is
// the Z = -1 state. A Pauli string maps each basis state to a single basis
// state times i^q: Z reads the bit, X flips it, Y flips it with a phase.
inline std::pair<int, std::uint64_t> apply_string(const PauliString& p, std::uint64_t bits) {
    int q = 0;
    std::uint64_t out = bits;
    for (const auto& [site, letter] : p.letters()) {
        const std::uint64_t mask = std::uint64_t(1) << (site - 1);
        const bool one = (bits & mask) != 0;
        switch (letter) {
            case Pauli::Z:
                if (one) q += 2;
                break;
            case Pauli::X:
                out ^= mask;
                break;
            case Pauli::Y:
                q += one ? 3 : 1;  // Y|0> = i|1>, Y|1> = -i|0>
                out ^= mask;
                break;
        }
    }
    return {q & 3, out};
}

inline std::complex<double> quarter_phase(int q) {
    static constexpr std::complex<double> table[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return table[q & 3];
}

}  // namespace detail

/// Dense 2^sites matrix of a single placed Pauli string.
inline Eigen::MatrixXcd dense_string(const PauliString& p, int sites) {
    if (sites < 1 || sites > 26)
        throw std::invalid_argument("dense_string: sites out of range");
    if (!p.is_identity() && p.max_site() > sites)
        throw std::invalid_argument("dense_string: string does not fit");
    const std::uint64_t dim = std::uint64_t(1) << sites;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::uint64_t x = 0; x < dim; ++x) {
        auto [q, y] = detail::apply_string(p, x);
        m(y, x) += detail::quarter_phase(q);
    }
    return m;
}

/// Dense matrix of a window-local operator embedded in 2^sites.
inline Eigen::MatrixXcd dense_local_operator(const LocalOperator& op, int sites) {
    const std::uint64_t dim = std::uint64_t(1) << sites;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : op.terms()) {
        for (std::uint64_t x = 0; x < dim; ++x) {
            auto [q, y] = detail::apply_string(t.string, x);
            m(y, x) += t.coeff * detail::quarter_phase(q);
        }
    }
    return m;
}

/// One-site lattice shift on basis indices (site s -> s + 1 with wraparound).
inline std::uint64_t translate_state(std::uint64_t x, int sites) {
    const std::uint64_t mask = (std::uint64_t(1) << sites) - 1;
    return ((x << 1) | (x >> (sites - 1))) & mask;
}

/// Dense matrix of the lattice translation operator.
inline Eigen::MatrixXcd translation_matrix(int sites) {
    const std::uint64_t dim = std::uint64_t(1) << sites;
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::uint64_t x = 0; x < dim; ++x) t(translate_state(x, sites), x) = 1.0;
    return t;
}

/// H = sum_l T^l h T^{-l} as a dense matrix. Guarded by a size cap since the
/// matrix holds 4^sites complex entries.
inline Eigen::MatrixXcd build_dense(const LocalOperator& h, const ChainContext& ctx,
                                    int size_cap = 14) {
    if (ctx.sites > size_cap)
        throw std::invalid_argument("build_dense: sites " + std::to_string(ctx.sites) +
                                    " exceeds cap " + std::to_string(size_cap));
    if (ctx.sites < h.window())
        throw std::invalid_argument("build_dense: chain shorter than the window of h");
    const std::uint64_t dim = std::uint64_t(1) << ctx.sites;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int l = 0; l < ctx.sites; ++l) {
        for (const auto& t : h.terms()) {
            const PauliString placed = translate(t.string, l, ctx);
            for (std::uint64_t x = 0; x < dim; ++x) {
                auto [q, y] = detail::apply_string(placed, x);
                m(y, x) += t.coeff * detail::quarter_phase(q);
            }
        }
    }
    return m;
}

/// Operator norm of a Hermitian window-local operator, from a dense
/// eigendecomposition on the window alone.
inline double window_operator_norm(const LocalOperator& op) {
    if (!op.is_hermitian())
        throw std::invalid_argument("window_operator_norm: operator must be Hermitian");
    if (op.empty()) return 0.0;
    Eigen::MatrixXcd m = dense_local_operator(op, op.window());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace eevconv
