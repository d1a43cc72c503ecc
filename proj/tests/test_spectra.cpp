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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "eevconv/spectra.hpp"
#include "eevconv/traces.hpp"
#include "support/oracle.hpp"

using namespace eevconv;
using Catch::Matchers::WithinAbs;

namespace {

LocalOperator mixed_field_ising() {
    return LocalOperator(2, {Term{1.0, PauliString({{1, Pauli::Z}, {2, Pauli::Z}})},
                             Term{1.05, PauliString::single(1, Pauli::X)},
                             Term{0.5, PauliString::single(1, Pauli::Z)}});
}

LocalOperator x_field() {
    return LocalOperator(1, {Term{1.0, PauliString::single(1, Pauli::X)}});
}

LocalOperator x1_obs() { return x_field(); }

LocalOperator zz_chain() {
    return LocalOperator(2, {Term{1.0, PauliString({{1, Pauli::Z}, {2, Pauli::Z}})}});
}

const SpectrumTable& mfi_table(int n) {
    static std::map<int, SpectrumTable> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        HamiltonianSpec spec{mixed_field_ising(), n};
        it = cache.emplace(n, eev_table(spec, {{"h", mixed_field_ising()}, {"x1", x1_obs()}}))
                 .first;
    }
    return it->second;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace

TEST_CASE("dense builder on tiny chains") {
    // two-site X field: X (x) I + I (x) X
    Eigen::MatrixXcd hx = build_dense(x_field(), ChainContext{2});
    Eigen::MatrixXcd expect(4, 4);
    expect << 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0;
    CHECK((hx - expect).cwiseAbs().maxCoeff() < 1e-14);

    // ZZ ring of three sites is diagonal: 3 on the aligned states, -1 elsewhere
    Eigen::MatrixXcd hzz = build_dense(zz_chain(), ChainContext{3});
    for (int x = 0; x < 8; ++x) {
        const double expected = (x == 0 || x == 7) ? 3.0 : -1.0;
        REQUIRE_THAT(hzz(x, x).real(), WithinAbs(expected, 1e-14));
    }
    CHECK(hzz.cwiseAbs().sum() == 8.0 + 16.0);  // purely diagonal

    CHECK_THROWS_AS(build_dense(zz_chain(), ChainContext{15}), std::invalid_argument);
}

TEST_CASE("dense builder agrees with the kron oracle and commutes with T") {
    oracle::Rng rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        auto h = rng.local_operator(1 + trial % 3, 3);
        const int n = 6;
        Eigen::MatrixXcd lib = build_dense(h, ChainContext{n});
        oracle::Matrix ora = oracle::hamiltonian(h, n);
        REQUIRE((lib - ora).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((lib - lib.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

        Eigen::MatrixXcd t = translation_matrix(n);
        REQUIRE((lib * t - t * lib).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("translating a string conjugates its dense form") {
    oracle::Rng rng(5);
    const int n = 5;
    Eigen::MatrixXcd t = translation_matrix(n);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = rng.string_in_window(n);
        Eigen::MatrixXcd moved = dense_string(translate(s, 1, ChainContext{n}), n);
        Eigen::MatrixXcd conj = t * dense_string(s, n) * t.adjoint();
        REQUIRE((moved - conj).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("momentum basis reconstruction pins every convention") {
    const int n = 6;
    auto h = mixed_field_ising();
    const auto orbits = detail::build_orbits(n);
    const ChainContext ctx{n};
    const auto h_terms = detail::all_translates(h, ctx, 1.0);
    auto a = x1_obs();
    const auto a_terms = detail::all_translates(a, ctx, 1.0 / n);

    oracle::Matrix h_dense = oracle::hamiltonian(h, n);
    oracle::Matrix a_sym = oracle::hamiltonian(a, n) / static_cast<double>(n);
    Eigen::MatrixXcd t = translation_matrix(n);
    const double two_pi = 2.0 * std::numbers::pi;

    std::size_t total_dim = 0;
    for (int p = 0; p < n; ++p) {
        const auto sec = detail::build_sector(orbits, p);
        const auto dim = static_cast<Eigen::Index>(sec.members.size());
        total_dim += sec.members.size();
        if (dim == 0) continue;

        // explicit momentum-state columns
        Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(Eigen::Index(1) << n, dim);
        for (Eigen::Index c = 0; c < dim; ++c) {
            const auto rep_id = sec.members[c];
            std::uint64_t state = orbits.reps[rep_id];
            const int period = orbits.period[rep_id];
            for (int r = 0; r < period; ++r) {
                basis(static_cast<Eigen::Index>(state), c) +=
                    std::polar(1.0 / std::sqrt(double(period)), -two_pi * p * r / n);
                state = translate_state(state, n);
            }
        }

        // orthonormal, and genuinely momentum-p
        REQUIRE((basis.adjoint() * basis - Eigen::MatrixXcd::Identity(dim, dim))
                    .cwiseAbs()
                    .maxCoeff() < 1e-10);
        REQUIRE((t * basis - std::polar(1.0, two_pi * p / n) * basis).cwiseAbs().maxCoeff() <
                1e-10);

        // projected H equals the assembled sector matrix
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        detail::assemble_sector(orbits, sec, h_terms,
                                [&](int row, int col, std::complex<double> v) { m(row, col) += v; });
        REQUIRE((basis.adjoint() * h_dense * basis - m).cwiseAbs().maxCoeff() < 1e-10);

        // projected symmetrized observable equals the sparse assembly
        auto cols = detail::sparse_sector_matrix(orbits, sec, a_terms);
        Eigen::MatrixXcd ma = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t c = 0; c < cols.size(); ++c)
            for (const auto& [row, val] : cols[c]) ma(row, static_cast<Eigen::Index>(c)) += val;
        REQUIRE((basis.adjoint() * a_sym * basis - ma).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(total_dim == std::size_t(1) << n);
}

TEST_CASE("spectrum of the transverse field alone is binomial") {
    HamiltonianSpec spec{x_field(), 4};
    auto table = diagonalize(spec);
    REQUIRE(table.size() == 16);
    std::map<int, int> mult;
    for (const auto& rec : table.records) mult[static_cast<int>(std::lround(rec.energy))]++;
    CHECK(mult[-4] == 1);
    CHECK(mult[-2] == 4);
    CHECK(mult[0] == 6);
    CHECK(mult[2] == 4);
    CHECK(mult[4] == 1);
}

TEST_CASE("sector energies match whole-space dense diagonalization") {
    const int n = 8;
    auto table = mfi_table(n);
    oracle::Matrix hd = oracle::hamiltonian(mixed_field_ising(), n);
    Eigen::SelfAdjointEigenSolver<oracle::Matrix> es(hd, Eigen::EigenvaluesOnly);
    REQUIRE(table.size() == std::size_t(1) << n);
    for (std::size_t j = 0; j < table.size(); ++j)
        REQUIRE_THAT(table.records[j].energy, WithinAbs(es.eigenvalues()(j), 1e-9));
}

TEST_CASE("Ising ring ground state sits in the zero-momentum sector") {
    HamiltonianSpec spec{zz_chain(), 4};
    auto table = diagonalize(spec);
    CHECK_THAT(table.records.front().energy, WithinAbs(-4.0, 1e-12));
    CHECK(table.records.front().momentum == 0);
}

TEST_CASE("trace identities hold over the table") {
    const int n = 8;
    auto h = mixed_field_ising();
    auto table = mfi_table(n);
    const ChainContext ctx{n};
    const auto d = static_cast<double>(table.size());
    const std::size_t ih = table.obs_index("h");
    const std::size_t ix = table.obs_index("x1");

    double sum_e = 0.0;
    std::complex<double> s0h = 0.0, s1h = 0.0, s2h = 0.0, s1x = 0.0, s2x = 0.0;
    for (const auto& rec : table.records) {
        sum_e += rec.energy;
        s0h += rec.eev[ih];
        s1h += rec.energy * rec.eev[ih];
        s2h += rec.energy * rec.energy * rec.eev[ih];
        s1x += rec.energy * rec.eev[ix];
        s2x += rec.energy * rec.energy * rec.eev[ix];
    }
    CHECK_THAT(sum_e / d, WithinAbs(0.0, 1e-8));
    CHECK_THAT(std::abs(s0h) / d, WithinAbs(0.0, 1e-8));
    CHECK_THAT(std::abs(s1h / d - ham_op_trace(h, h, ctx)), WithinAbs(0.0, 1e-8));
    CHECK_THAT(std::abs(s2h / d - ham2_op_trace(h, h, ctx)), WithinAbs(0.0, 1e-8));
    CHECK_THAT(std::abs(s1x / d - ham_op_trace(h, x1_obs(), ctx)), WithinAbs(0.0, 1e-8));
    CHECK_THAT(std::abs(s2x / d - ham2_op_trace(h, x1_obs(), ctx)), WithinAbs(0.0, 1e-8));

    // spectral moments against the symbolic ones
    CHECK_THAT(spectral_moment(table, 2), WithinAbs(ham_moment(h, ctx, 2), 1e-8));
    CHECK_THAT(spectral_moment(table, 4),
               WithinAbs(ham_moment(h, ctx, 4), 1e-8 * std::pow(n, 2)));
}

TEST_CASE("EEV of the generating term is the energy density") {
    for (int n : {6, 8}) {
        auto table = mfi_table(n);
        const std::size_t ih = table.obs_index("h");
        for (const auto& rec : table.records) {
            REQUIRE_THAT(rec.eev[ih].imag(), WithinAbs(0.0, 1e-10));
            REQUIRE_THAT(rec.eev[ih].real(), WithinAbs(rec.energy / n, 1e-10));
        }
    }
}

TEST_CASE("EEV are real and bounded for unit-norm Hermitian observables") {
    const int n = 6;
    HamiltonianSpec spec{mixed_field_ising(), n};
    auto y1 = LocalOperator(1, {Term{1.0, PauliString::single(1, Pauli::Y)}});
    auto table = eev_table(spec, {{"y1", y1}, {"x1", x1_obs()}});
    for (const auto& rec : table.records) {
        REQUIRE_THAT(rec.eev[0].imag(), WithinAbs(0.0, 1e-10));
        REQUIRE_THAT(rec.eev[1].imag(), WithinAbs(0.0, 1e-10));
        REQUIRE(std::abs(rec.eev[0]) <= 1.0 + 1e-10);
        REQUIRE(std::abs(rec.eev[1]) <= 1.0 + 1e-10);
    }
}

TEST_CASE("transverse-field eigenstates carry EEV (N - 2w)/N") {
    const int n = 6;
    HamiltonianSpec spec{x_field(), n};
    auto table = eev_table(spec, {{"x1", x1_obs()}});
    std::map<int, int> counts;
    for (const auto& rec : table.records) {
        const double scaled = rec.eev[0].real() * n;
        const int rounded = static_cast<int>(std::lround(scaled));
        REQUIRE_THAT(scaled, WithinAbs(rounded, 1e-9));
        REQUIRE_THAT(rec.eev[0].real(), WithinAbs(rec.energy / n, 1e-10));
        counts[rounded]++;
    }
    for (int w = 0; w <= n; ++w)
        CHECK(counts[n - 2 * w] == static_cast<int>(std::lround(binom(n, w))));
}

TEST_CASE("eigenstate concentration") {
    HamiltonianSpec spec{x_field(), 10};
    auto table = diagonalize(spec);

    // binomial tail: P(|N - 2W| >= 5) at N = 10
    const double expected = 2.0 * (1.0 + 10.0 + 45.0) / 1024.0;
    CHECK_THAT(concentration_fraction(table, 0.5), WithinAbs(expected, 1e-12));

    // beyond the spectral radius nothing survives
    CHECK(concentration_fraction(table, 1.5) == 0.0);

    // monotone in eps
    double prev = 1.0;
    for (double eps : {0.1, 0.3, 0.5, 0.8}) {
        double frac = concentration_fraction(table, eps);
        REQUIRE(frac <= prev);
        prev = frac;
    }
    CHECK_THROWS_AS(concentration_fraction(table, 0.0), std::invalid_argument);
}

TEST_CASE("tail cutoff") {
    CHECK_THAT(energy_tail_cutoff(std::numbers::e, 1.0), WithinAbs(std::sqrt(std::numbers::e), 1e-12));
    CHECK_THAT(energy_tail_cutoff(100.0, 2.0), WithinAbs(2.0 * std::sqrt(100.0 * std::log(100.0)), 1e-12));

    // nearly the whole spectrum sits below C sqrt(N log N) at desk sizes
    auto table = mfi_table(10);
    const double lambda = energy_tail_cutoff(10, 3.0);
    std::size_t above = 0;
    for (const auto& rec : table.records)
        if (std::abs(rec.energy) >= lambda) ++above;
    CHECK(static_cast<double>(above) / static_cast<double>(table.size()) < 1e-2);
}

TEST_CASE("level statistics drift toward a Gaussian") {
    const double k8 = excess_kurtosis(mfi_table(8));
    const double k12 = excess_kurtosis(mfi_table(12));
    CHECK(std::abs(k12) < std::abs(k8));
}

TEST_CASE("validation and bookkeeping") {
    HamiltonianSpec spec{mixed_field_ising(), 6};
    DiagonalizeOptions small_cap;
    small_cap.size_cap = 5;
    CHECK_THROWS_AS(diagonalize(spec, small_cap), std::invalid_argument);

    // observable window larger than N - k is rejected
    auto wide = LocalOperator(5, {Term{1.0, PauliString({{1, Pauli::Z}, {5, Pauli::Z}})}});
    CHECK_THROWS_AS(eev_table(spec, {{"wide", wide}}), std::invalid_argument);

    // non-Hermitian observable rejected
    auto skew = LocalOperator(1, {Term{{0.0, 1.0}, PauliString::single(1, Pauli::X)}});
    CHECK_THROWS_AS(eev_table(spec, {{"skew", skew}}), std::invalid_argument);

    const auto before = diagonalization_counter().load();
    diagonalize(HamiltonianSpec{x_field(), 4});
    CHECK(diagonalization_counter().load() == before + 1);
}
