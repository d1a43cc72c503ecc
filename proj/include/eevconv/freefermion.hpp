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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "eevconv/convergence.hpp"

// Transverse-field Ising chain, H = -sum_l (Z_l Z_{l+1} + g X_l), divided by
// ||h|| = sqrt(1 + g^2) so the generating term has unit operator norm. The
// Jordan-Wigner map turns it into free fermions whose boundary condition
// depends on fermion parity: the even-parity half of the spectrum comes from
// antiperiodic modes k = 2 pi (m + 1/2) / N, the odd-parity half from
// periodic modes k = 2 pi m / N. Each sector's levels are
//
//   E(occ) = -(1/2) sum_k eps_k + sum_{k in occ} eps_k,
//   eps_k = 2 sqrt(1 + g^2 - 2 g cos k) / ||h||,
//
// with the number of occupied quasiparticle modes constrained to a fixed
// parity. The constraint flips in the periodic sector below g = 1 because
// the unpaired k = 0 mode has negative bare energy there and enters through
// its hole. The whole bookkeeping is validated against dense spin-chain
// diagonalization at small N rather than trusted from the formulas.

namespace eevconv {

enum class ParitySector { Even, Odd };

struct FermionMode {
    double momentum = 0.0;  // k in [0, 2 pi)
    double energy = 0.0;    // eps_k >= 0, normalized
    double x_coeff = 0.0;   // contribution of this mode to sum_l <X_l>
};

struct FermionModel {
    int sites = 0;
    double field = 0.0;
    ParitySector sector = ParitySector::Even;
    std::vector<FermionMode> modes;    // one per momentum, eps_k = eps_{-k}
    double ground_energy = 0.0;        // -(1/2) sum_k eps_k, normalized
    double spin_norm = 1.0;            // sqrt(1 + g^2)
    bool occ_count_even = true;        // allowed parity of |occupied set|
};

struct OccupationState {
    std::vector<bool> occupied;  // one flag per mode index
};

inline FermionModel tfim_modes(int sites, double g, ParitySector sector) {
    if (sites < 2) throw std::invalid_argument("tfim_modes: need at least two sites");
    if (g < 0.0) throw std::invalid_argument("tfim_modes: field must be >= 0");
    FermionModel m;
    m.sites = sites;
    m.field = g;
    m.sector = sector;
    m.spin_norm = std::sqrt(1.0 + g * g);
    const double delta = (sector == ParitySector::Even) ? 0.5 : 0.0;
    double eps_sum = 0.0;
    m.modes.reserve(sites);
    for (int i = 0; i < sites; ++i) {
        const double k = 2.0 * std::numbers::pi * (i + delta) / sites;
        const double a = 2.0 * (g - std::cos(k));
        const double eps_raw = 2.0 * std::sqrt(1.0 + g * g - 2.0 * g * std::cos(k));
        FermionMode mode;
        mode.momentum = k;
        mode.energy = eps_raw / m.spin_norm;
        mode.x_coeff = (eps_raw > 1e-12) ? a / eps_raw : 1.0;
        eps_sum += mode.energy;
        m.modes.push_back(mode);
    }
    m.ground_energy = -0.5 * eps_sum;
    m.occ_count_even = (sector == ParitySector::Even) ? true : (g < 1.0);
    return m;
}

struct TfimEnsemble {
    FermionModel even;
    FermionModel odd;
};

inline TfimEnsemble tfim_ensemble(int sites, double g) {
    return TfimEnsemble{tfim_modes(sites, g, ParitySector::Even),
                        tfim_modes(sites, g, ParitySector::Odd)};
}

namespace detail {

inline int occupied_count(const FermionModel& m, const OccupationState& occ) {
    if (static_cast<int>(occ.occupied.size()) != m.sites)
        throw std::invalid_argument("occupation state: one flag per mode required");
    int c = 0;
    for (bool b : occ.occupied) c += b ? 1 : 0;
    return c;
}

}  // namespace detail

inline bool parity_ok(const FermionModel& m, const OccupationState& occ) {
    return (detail::occupied_count(m, occ) % 2 == 0) == m.occ_count_even;
}

inline double state_energy(const FermionModel& m, const OccupationState& occ) {
    if (!parity_ok(m, occ))
        throw std::invalid_argument("state_energy: occupation parity does not match the sector");
    double e = m.ground_energy;
    for (int i = 0; i < m.sites; ++i)
        if (occ.occupied[i]) e += m.modes[i].energy;
    return e;
}

/// Total lattice momentum as a sector index in 0..N-1 (a quasiparticle at k
/// multiplies the translation eigenvalue by e^{-ik}).
inline int momentum_index(const FermionModel& m, const OccupationState& occ) {
    long long twice = 0;  // sum of 2 (m_i + delta), always even for valid states
    const bool even = m.sector == ParitySector::Even;
    for (int i = 0; i < m.sites; ++i)
        if (occ.occupied[i]) twice += 2 * i + (even ? 1 : 0);
    if (twice % 2 != 0)
        throw std::invalid_argument("momentum_index: occupation parity does not match the sector");
    const long long total = -(twice / 2);
    return static_cast<int>(((total % m.sites) + m.sites) % m.sites);
}

enum class BilinearKind { EnergyDensity, TransverseMagnetization };

/// EEV of a fermion-bilinear observable in an occupation eigenstate. The
/// energy density reproduces E/N; the transverse magnetization X_1 averages
/// to (1/N) sum_k x_k (1 - 2 n_k) via the Bogoliubov angles.
inline double eev_bilinear(const FermionModel& m, const OccupationState& occ, BilinearKind kind) {
    if (!parity_ok(m, occ))
        throw std::invalid_argument("eev_bilinear: occupation parity does not match the sector");
    switch (kind) {
        case BilinearKind::EnergyDensity:
            return state_energy(m, occ) / m.sites;
        case BilinearKind::TransverseMagnetization: {
            double x = 0.0;
            for (int i = 0; i < m.sites; ++i)
                x += m.modes[i].x_coeff * (occ.occupied[i] ? -1.0 : 1.0);
            return x / m.sites;
        }
    }
    throw std::invalid_argument("eev_bilinear: observable outside the bilinear class");
}

struct ManyBodyLevel {
    double energy = 0.0;
    int momentum = 0;
    double eev_x = 0.0;
};

/// All 2^(N-1) levels of one parity sector. Exhaustive, so guarded.
inline std::vector<ManyBodyLevel> enumerate_levels(const FermionModel& m, int size_cap = 20) {
    if (m.sites > size_cap)
        throw std::invalid_argument("enumerate_levels: sites exceed the enumeration cap");
    std::vector<ManyBodyLevel> out;
    out.reserve(std::size_t(1) << (m.sites - 1));
    OccupationState occ;
    occ.occupied.assign(m.sites, false);
    const std::uint64_t total = std::uint64_t(1) << m.sites;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        const bool even = (std::popcount(mask) % 2) == 0;
        if (even != m.occ_count_even) continue;
        for (int i = 0; i < m.sites; ++i) occ.occupied[i] = (mask >> i) & 1;
        ManyBodyLevel lvl;
        lvl.energy = state_energy(m, occ);
        lvl.momentum = momentum_index(m, occ);
        lvl.eev_x = eev_bilinear(m, occ, BilinearKind::TransverseMagnetization);
        out.push_back(lvl);
    }
    return out;
}

/// Exact r_f by enumerating the full 2^N eigenbasis of both sectors.
inline double exact_r_f(const TfimEnsemble& ens, BilinearKind kind, const TargetFunction& f,
                        int size_cap = 20) {
    const int n = ens.even.sites;
    double sum = 0.0;
    for (const FermionModel* m : {&ens.even, &ens.odd}) {
        for (const auto& lvl : enumerate_levels(*m, size_cap)) {
            const double eev = (kind == BilinearKind::EnergyDensity) ? lvl.energy / n : lvl.eev_x;
            const double dev = eev - f(lvl.energy / n);
            sum += dev * dev;
        }
    }
    return std::sqrt(sum / static_cast<double>(std::uint64_t(1) << n));
}

struct SampleStats {
    double estimate = 0.0;     // sqrt(mean |EEV - f(E/N)|^2)
    double std_error = 0.0;    // delta-method error of the estimate
    double l1_estimate = 0.0;  // mean |EEV - f(E/N)|
    double weak_eth = 0.0;     // mean |EEV|^2
    std::size_t samples = 0;
};

/// Monte-Carlo estimate of r_f over eigenstates drawn uniformly from the
/// full 2^N basis: a fair coin picks the sector (both halves have dimension
/// 2^(N-1)), then mode occupations are uniform bits with the last mode fixing
/// the sector parity. Only raw engine bits are consumed, so a (seed, samples)
/// pair reproduces bit-identical results.
inline SampleStats sample_r_f(const TfimEnsemble& ens, BilinearKind kind, const TargetFunction& f,
                              std::size_t samples, std::uint64_t seed) {
    if (samples < 100)
        throw std::invalid_argument("sample_r_f: need at least 100 samples");
    const int n = ens.even.sites;
    std::mt19937_64 eng(seed);

    double mean_y = 0.0, m2_y = 0.0;  // Welford accumulators over y = dev^2
    double sum_l1 = 0.0, sum_weak = 0.0;

    for (std::size_t s = 0; s < samples; ++s) {
        const FermionModel& m = (eng() & 1) ? ens.even : ens.odd;
        double energy = m.ground_energy;
        double xsum = 0.0;
        int count = 0;
        std::uint64_t word = 0;
        int bits_left = 0;
        for (int i = 0; i < n; ++i) {
            bool occ;
            if (i + 1 == n) {
                occ = ((count % 2 == 0) != m.occ_count_even);  // parity fixer
            } else {
                if (bits_left == 0) {
                    word = eng();
                    bits_left = 64;
                }
                occ = word & 1;
                word >>= 1;
                --bits_left;
            }
            if (occ) {
                energy += m.modes[i].energy;
                ++count;
            }
            xsum += m.modes[i].x_coeff * (occ ? -1.0 : 1.0);
        }
        const double eev =
            (kind == BilinearKind::EnergyDensity) ? energy / n : xsum / n;
        const double dev = eev - f(energy / n);
        const double y = dev * dev;
        const double delta = y - mean_y;
        mean_y += delta / static_cast<double>(s + 1);
        m2_y += delta * (y - mean_y);
        sum_l1 += std::abs(dev);
        sum_weak += eev * eev;
    }

    SampleStats out;
    out.samples = samples;
    out.estimate = std::sqrt(mean_y);
    out.l1_estimate = sum_l1 / static_cast<double>(samples);
    out.weak_eth = sum_weak / static_cast<double>(samples);
    if (mean_y > 0.0 && samples > 1) {
        const double var_y = m2_y / static_cast<double>(samples - 1);
        out.std_error = std::sqrt(var_y / static_cast<double>(samples)) / (2.0 * out.estimate);
    }
    return out;
}

}  // namespace eevconv
