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
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <lapacke.h>

#include "eevconv/dense.hpp"
#include "eevconv/local_operator.hpp"
#include "eevconv/pauli.hpp"

// Exact diagonalization of H = sum_l T^l h T^{-l} in lattice momentum
// sectors. Basis states are grouped into translation orbits; from an orbit
// representative |a> with period R the normalized momentum state is
//
//   |a, p> = R^{-1/2} sum_{r=0}^{R-1} omega^{-pr} T^r |a>,  omega = e^{2 pi i/N},
//
// valid when p R = 0 (mod N). These are simultaneous eigenstates of T, so
// every eigenvector of the projected Hamiltonian is a TI eigenstate even
// inside degenerate subspaces -- a plain dense solver does not guarantee
// that, and the A = h golden identity <j|h|j> = E_j/N depends on it.
//
// Matrix elements: if O |a> = sum_alpha c_alpha |m_alpha> with
// m_alpha = T^{g} b for a representative b in the sector, then
//
//   <b, p| O |a, p> = sum_alpha c_alpha omega^{p g} sqrt(R_a / R_b).
//
// Expectation values of a non-TI observable A are taken through its
// symmetrization (1/N) sum_l T^l A T^{-l}, which has the same diagonal
// matrix elements in any TI eigenbasis.

namespace eevconv {

struct HamiltonianSpec {
    LocalOperator h;
    int sites = 0;
};

struct DiagonalizeOptions {
    int size_cap = 14;  // memory guard: sector matrices hold O(4^N / N^2) entries
};

struct SpectrumRecord {
    double energy = 0.0;
    int momentum = 0;
    std::vector<std::complex<double>> eev;  // parallel to SpectrumTable::observable_ids
};

struct SpectrumTable {
    int sites = 0;
    std::vector<std::string> observable_ids;
    std::vector<SpectrumRecord> records;  // ascending by (energy, momentum)

    std::size_t size() const { return records.size(); }

    std::size_t obs_index(std::string_view id) const {
        for (std::size_t i = 0; i < observable_ids.size(); ++i)
            if (observable_ids[i] == id) return i;
        throw std::invalid_argument("SpectrumTable: unknown observable id \"" +
                                    std::string(id) + "\"");
    }
};

/// Count of sector eigensolves performed by this process; the CLI uses it to
/// verify that cached runs do no diagonalization work.
inline std::atomic<std::uint64_t>& diagonalization_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

namespace detail {

struct OrbitTable {
    int sites = 0;
    std::vector<std::uint32_t> rep_index;  // state -> index into reps
    std::vector<std::uint8_t> shift;       // state = T^shift reps[rep_index]
    std::vector<std::uint32_t> reps;       // orbit representatives (minimal states)
    std::vector<std::uint8_t> period;      // orbit periods, per representative
};

inline OrbitTable build_orbits(int sites) {
    OrbitTable t;
    t.sites = sites;
    const std::uint64_t dim = std::uint64_t(1) << sites;
    t.rep_index.assign(dim, UINT32_MAX);
    t.shift.assign(dim, 0);
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (t.rep_index[x] != UINT32_MAX) continue;  // orbit already walked
        const auto id = static_cast<std::uint32_t>(t.reps.size());
        std::uint64_t y = x;
        int r = 0;
        do {
            t.rep_index[y] = id;
            t.shift[y] = static_cast<std::uint8_t>(r);
            y = translate_state(y, sites);
            ++r;
        } while (y != x);
        t.reps.push_back(static_cast<std::uint32_t>(x));
        t.period.push_back(static_cast<std::uint8_t>(r));
    }
    return t;
}

struct PlacedTerm {
    std::complex<double> coeff;
    PauliString string;
};

inline std::vector<PlacedTerm> all_translates(const LocalOperator& op, const ChainContext& ctx,
                                              std::complex<double> scale) {
    std::vector<PlacedTerm> out;
    out.reserve(op.terms().size() * ctx.sites);
    for (int l = 0; l < ctx.sites; ++l)
        for (const auto& t : op.terms())
            out.push_back(PlacedTerm{t.coeff * scale, translate(t.string, l, ctx)});
    return out;
}

struct Sector {
    int momentum = 0;
    std::vector<std::uint32_t> members;  // representative ids
    std::vector<std::int32_t> position;  // representative id -> column, -1 outside
};

inline Sector build_sector(const OrbitTable& orbits, int momentum) {
    Sector s;
    s.momentum = momentum;
    s.position.assign(orbits.reps.size(), -1);
    for (std::uint32_t id = 0; id < orbits.reps.size(); ++id) {
        if ((momentum * orbits.period[id]) % orbits.sites == 0) {
            s.position[id] = static_cast<std::int32_t>(s.members.size());
            s.members.push_back(id);
        }
    }
    return s;
}

// Accumulates <b,p|O|a,p> into dense (add_entry on a matrix) or sparse storage.
template <typename Sink>
inline void assemble_sector(const OrbitTable& orbits, const Sector& sec,
                            const std::vector<PlacedTerm>& terms, Sink&& add_entry) {
    const int n = orbits.sites;
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::complex<double>> omega_pow(n);
    for (int g = 0; g < n; ++g)
        omega_pow[g] = std::polar(1.0, two_pi * sec.momentum * g / n);
    std::vector<double> sqrt_period(orbits.reps.size());
    for (std::size_t i = 0; i < orbits.reps.size(); ++i)
        sqrt_period[i] = std::sqrt(static_cast<double>(orbits.period[i]));

    for (std::size_t col = 0; col < sec.members.size(); ++col) {
        const std::uint32_t a = sec.members[col];
        const std::uint64_t state = orbits.reps[a];
        for (const auto& term : terms) {
            auto [q, y] = apply_string(term.string, state);
            const std::uint32_t b = orbits.rep_index[y];
            const std::int32_t row = sec.position[b];
            if (row < 0) continue;  // image lives in another sector
            const std::complex<double> val = term.coeff * quarter_phase(q) *
                                             omega_pow[orbits.shift[y]] *
                                             (sqrt_period[a] / sqrt_period[b]);
            add_entry(static_cast<int>(row), static_cast<int>(col), val);
        }
    }
}

/// Eigendecomposition of a Hermitian matrix (ascending eigenvalues,
/// eigenvectors overwrite the input columns). LAPACK's divide and conquer
/// routine is several times faster than the default QR path at sector sizes.
inline void hermitian_eigensolve(Eigen::MatrixXcd& m, Eigen::VectorXd& evals) {
    const auto n = static_cast<lapack_int>(m.rows());
    evals.resize(n);
    if (n == 0) return;
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                       reinterpret_cast<lapack_complex_double*>(m.data()), n, evals.data());
    if (info != 0)
        throw std::runtime_error("zheevd failed with info = " + std::to_string(info));
}

using SparseCols = std::vector<std::vector<std::pair<int, std::complex<double>>>>;

inline SparseCols sparse_sector_matrix(const OrbitTable& orbits, const Sector& sec,
                                       const std::vector<PlacedTerm>& terms) {
    SparseCols cols(sec.members.size());
    assemble_sector(orbits, sec, terms, [&](int row, int col, std::complex<double> v) {
        cols[col].emplace_back(row, v);
    });
    return cols;
}

inline std::complex<double> quadratic_form(const SparseCols& cols, const Eigen::MatrixXcd& vecs,
                                           int j, std::vector<std::complex<double>>& work) {
    work.assign(vecs.rows(), 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const std::complex<double> vc = vecs(static_cast<Eigen::Index>(c), j);
        if (vc == std::complex<double>(0.0, 0.0)) continue;
        for (const auto& [row, val] : cols[c]) work[row] += val * vc;
    }
    std::complex<double> out = 0.0;
    for (Eigen::Index r = 0; r < vecs.rows(); ++r)
        out += std::conj(vecs(r, j)) * work[r];
    return out;
}

}  // namespace detail

/// Full TI eigensystem with the diagonal matrix elements of each observable.
/// Sectors p and N - p are complex conjugates of each other, so only half of
/// them are solved and the rest are mirrored.
inline SpectrumTable eev_table(
    const HamiltonianSpec& spec,
    const std::vector<std::pair<std::string, LocalOperator>>& observables,
    const DiagonalizeOptions& opts = {}) {
    const int n = spec.sites;
    if (n < 1) throw std::invalid_argument("eev_table: sites must be >= 1");
    if (n > opts.size_cap)
        throw std::invalid_argument("eev_table: sites " + std::to_string(n) +
                                    " exceeds cap " + std::to_string(opts.size_cap));
    if (!spec.h.is_traceless() || !spec.h.is_hermitian())
        throw std::invalid_argument("eev_table: h must be traceless Hermitian");
    if (spec.h.window() > n)
        throw std::invalid_argument("eev_table: chain shorter than the window of h");
    for (const auto& [id, a] : observables) {
        if (!a.is_traceless() || !a.is_hermitian())
            throw std::invalid_argument("eev_table: observable \"" + id +
                                        "\" must be traceless Hermitian");
        if (a.window() > n - spec.h.window())
            throw std::invalid_argument("eev_table: observable \"" + id + "\" window " +
                                        std::to_string(a.window()) + " exceeds N - k = " +
                                        std::to_string(n - spec.h.window()));
    }

    diagonalization_counter().fetch_add(1, std::memory_order_relaxed);

    const ChainContext ctx{n};
    const auto orbits = detail::build_orbits(n);
    const auto h_terms = detail::all_translates(spec.h, ctx, 1.0);
    std::vector<std::vector<detail::PlacedTerm>> obs_terms;
    obs_terms.reserve(observables.size());
    for (const auto& [id, a] : observables)
        obs_terms.push_back(detail::all_translates(a, ctx, 1.0 / static_cast<double>(n)));

    SpectrumTable table;
    table.sites = n;
    for (const auto& [id, a] : observables) table.observable_ids.push_back(id);
    table.records.reserve(std::size_t(1) << n);

    std::size_t state_count = 0;
    for (int p = 0; p <= n / 2; ++p) {
        const auto sec = detail::build_sector(orbits, p);
        const auto dim = static_cast<Eigen::Index>(sec.members.size());
        const bool self_conjugate = (p == 0) || (2 * p == n);
        state_count += sec.members.size() * (self_conjugate ? 1 : 2);
        if (dim == 0) continue;

        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        detail::assemble_sector(orbits, sec, h_terms,
                                [&](int row, int col, std::complex<double> v) { m(row, col) += v; });
        Eigen::VectorXd evals;
        detail::hermitian_eigensolve(m, evals);  // m now holds the eigenvectors

        std::vector<detail::SparseCols> obs_mats;
        obs_mats.reserve(obs_terms.size());
        for (const auto& terms : obs_terms)
            obs_mats.push_back(detail::sparse_sector_matrix(orbits, sec, terms));

        std::vector<std::complex<double>> work;
        for (Eigen::Index j = 0; j < dim; ++j) {
            SpectrumRecord rec;
            rec.energy = evals(j);
            rec.momentum = p;
            rec.eev.reserve(obs_mats.size());
            for (const auto& mat : obs_mats)
                rec.eev.push_back(detail::quadratic_form(mat, m, static_cast<int>(j), work));
            if (!self_conjugate) {
                SpectrumRecord mirror = rec;  // conjugate sector: same spectrum
                mirror.momentum = n - p;
                for (auto& v : mirror.eev) v = std::conj(v);
                table.records.push_back(std::move(mirror));
            }
            table.records.push_back(std::move(rec));
        }
    }

    if (state_count != (std::size_t(1) << n) || table.records.size() != state_count)
        throw std::logic_error("eev_table: sector dimensions do not sum to 2^N");

    std::stable_sort(table.records.begin(), table.records.end(),
                     [](const SpectrumRecord& a, const SpectrumRecord& b) {
                         if (a.energy != b.energy) return a.energy < b.energy;
                         return a.momentum < b.momentum;
                     });
    return table;
}

inline SpectrumTable diagonalize(const HamiltonianSpec& spec, const DiagonalizeOptions& opts = {}) {
    return eev_table(spec, {}, opts);
}

/// Fraction of eigenstates with |E_j| >= N * eps.
inline double concentration_fraction(const SpectrumTable& table, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("concentration_fraction: eps must be > 0");
    const double threshold = table.sites * eps;
    std::size_t count = 0;
    for (const auto& rec : table.records)
        if (std::abs(rec.energy) >= threshold) ++count;
    return static_cast<double>(count) / static_cast<double>(table.records.size());
}

/// Diagnostic truncation scale C * sqrt(N log N) separating the spectral bulk
/// from the tails.
inline double energy_tail_cutoff(double sites, double c) {
    if (c <= 0.0) throw std::invalid_argument("energy_tail_cutoff: C must be > 0");
    return c * std::sqrt(sites * std::log(sites));
}

/// (1/2^N) sum_j E_j^m.
inline double spectral_moment(const SpectrumTable& table, int m) {
    double sum = 0.0;
    for (const auto& rec : table.records) {
        double t = 1.0;
        for (int i = 0; i < m; ++i) t *= rec.energy;
        sum += t;
    }
    return sum / static_cast<double>(table.records.size());
}

/// Standardized fourth moment minus 3; tends to zero as the level density
/// approaches a Gaussian.
inline double excess_kurtosis(const SpectrumTable& table) {
    const double n = static_cast<double>(table.records.size());
    double mean = 0.0;
    for (const auto& rec : table.records) mean += rec.energy;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (const auto& rec : table.records) {
        const double d = rec.energy - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace eevconv
