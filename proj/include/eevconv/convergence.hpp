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
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eevconv/spectra.hpp"
#include "eevconv/traces.hpp"

// How fast do eigenstate expectation values settle onto a smooth function of
// energy density? For a target function f the deviation statistic is
//
//   r_f(N) = sqrt( (1/2^N) sum_j |<j|A|j> - f(E_j/N)|^2 ),
//
// measured here across system sizes together with its l1 variant, the
// f == 0 special case (the weak-ETH average), pooled least-squares target
// fits, and log-log scaling exponents.

namespace eevconv {

/// Real polynomial on the energy-density axis, degree at most 5. The
/// convergence statistics only ever probe f near zero, so low-degree
/// polynomials are a complete family for this purpose and keep target
/// fitting a linear least-squares problem.
class TargetFunction {
  public:
    static constexpr int kMaxDegree = 5;

    TargetFunction() : coeffs_{0.0} {}

    explicit TargetFunction(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(0.0);
        if (static_cast<int>(coeffs_.size()) - 1 > kMaxDegree)
            throw std::invalid_argument("TargetFunction: degree must be <= 5");
    }

    static TargetFunction zero() { return TargetFunction(); }
    static TargetFunction linear(double slope) { return TargetFunction({0.0, slope}); }

    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    const std::vector<double>& coefficients() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    double at_zero() const { return coeffs_[0]; }
    double slope_at_zero() const { return coeffs_.size() > 1 ? coeffs_[1] : 0.0; }

    /// Largest |f| on a grid over [lo, hi]; the definition maps energy
    /// density into the unit disk, so values above 1 deserve a warning but
    /// not an error (a least-squares fit may poke out near the edges).
    double max_abs_on(double lo, double hi, int grid = 201) const {
        double m = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double x = lo + (hi - lo) * i / (grid - 1);
            m = std::max(m, std::abs((*this)(x)));
        }
        return m;
    }

  private:
    std::vector<double> coeffs_;
};

/// r_f(N) for one observable of a spectrum table.
inline double r_f(const SpectrumTable& table, std::string_view obs_id, const TargetFunction& f) {
    const std::size_t idx = table.obs_index(obs_id);
    const double n = static_cast<double>(table.sites);
    double sum = 0.0;
    for (const auto& rec : table.records)
        sum += std::norm(rec.eev[idx] - std::complex<double>(f(rec.energy / n), 0.0));
    return std::sqrt(sum / static_cast<double>(table.records.size()));
}

/// Mean absolute deviation variant of r_f.
inline double r_f_l1(const SpectrumTable& table, std::string_view obs_id, const TargetFunction& f) {
    const std::size_t idx = table.obs_index(obs_id);
    const double n = static_cast<double>(table.sites);
    double sum = 0.0;
    for (const auto& rec : table.records)
        sum += std::abs(rec.eev[idx] - std::complex<double>(f(rec.energy / n), 0.0));
    return sum / static_cast<double>(table.records.size());
}

/// (1/2^N) sum_j |<j|A|j>|^2, i.e. r_{f=0}^2. O(1/N) for traceless local A.
inline double weak_eth_statistic(const SpectrumTable& table, std::string_view obs_id) {
    const std::size_t idx = table.obs_index(obs_id);
    double sum = 0.0;
    for (const auto& rec : table.records) sum += std::norm(rec.eev[idx]);
    return sum / static_cast<double>(table.records.size());
}

/// Running supremum of r_f over the computed sizes at or above each entry.
/// A desk-scale proxy: the true sup over all n >= N is not computable, so
/// every report labels this column as a proxy.
inline std::vector<double> r_sup_proxy(std::span<const double> r_values) {
    std::vector<double> out(r_values.begin(), r_values.end());
    for (int i = static_cast<int>(out.size()) - 2; i >= 0; --i)
        out[i] = std::max(out[i], out[i + 1]);
    return out;
}

namespace detail {

struct FitPoint {
    double x;
    double y;
    double weight;
};

inline TargetFunction fit_polynomial(const std::vector<FitPoint>& points, int degree) {
    if (degree < 0 || degree > TargetFunction::kMaxDegree)
        throw std::invalid_argument("fit: degree must be in [0, 5]");
    const int cols = degree + 1;
    Eigen::MatrixXd design(points.size(), cols);
    Eigen::VectorXd rhs(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = std::sqrt(points[i].weight);
        double pw = 1.0;
        for (int c = 0; c < cols; ++c) {
            design(i, c) = w * pw;
            pw *= points[i].x;
        }
        rhs(i) = w * points[i].y;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols)
        throw std::runtime_error("fit: rank-deficient design (energy densities too degenerate)");
    Eigen::VectorXd sol = qr.solve(rhs);
    return TargetFunction(std::vector<double>(sol.data(), sol.data() + cols));
}

inline std::vector<FitPoint> table_points(const SpectrumTable& table, std::string_view obs_id,
                                          double size_weight) {
    const std::size_t idx = table.obs_index(obs_id);
    const double n = static_cast<double>(table.sites);
    const double w = size_weight / static_cast<double>(table.records.size());
    std::vector<FitPoint> pts;
    pts.reserve(table.records.size());
    for (const auto& rec : table.records)
        pts.push_back(FitPoint{rec.energy / n, rec.eev[idx].real(), w});
    return pts;
}

}  // namespace detail

/// The N-independent polynomial minimizing sum_N w_N r_f(N)^2 over the pooled
/// (E_j/N, EEV_j) points of all tables. Weights default to 1 per size.
inline TargetFunction fit_target(std::span<const SpectrumTable* const> tables,
                                 std::string_view obs_id, int degree,
                                 std::span<const double> size_weights = {}) {
    if (tables.size() < 2)
        throw std::invalid_argument("fit_target: need at least two sizes for an N-independent fit");
    if (!size_weights.empty() && size_weights.size() != tables.size())
        throw std::invalid_argument("fit_target: one weight per table");
    std::vector<detail::FitPoint> pts;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const double w = size_weights.empty() ? 1.0 : size_weights[i];
        auto p = detail::table_points(*tables[i], obs_id, w);
        pts.insert(pts.end(), p.begin(), p.end());
    }
    return detail::fit_polynomial(pts, degree);
}

/// Least-squares polynomial for a single size. This is the finite-N estimate
/// of the size-dependent smooth function g_N that the ETH ansatz posits; its
/// value and slope at zero should drift toward 0 and tr(HA)/tr(Hh).
inline TargetFunction fit_table(const SpectrumTable& table, std::string_view obs_id, int degree) {
    return detail::fit_polynomial(detail::table_points(table, obs_id, 1.0), degree);
}

struct LinearPredictor {
    TargetFunction f;
    double slope = 0.0;  // tr(HA) / tr(Hh)
};

/// f(x) = (tr(HA)/tr(Hh)) x, the line every ETH-satisfying model must track.
/// tr(Hh) > 0 for any nonzero traceless h, so the ratio is well defined.
inline LinearPredictor eth_linear_predictor(const LocalOperator& h, const LocalOperator& a) {
    const int k = h.window(), kp = a.window();
    const ChainContext ctx{std::max(ham2_trace_min_sites(k, kp), ham2_trace_min_sites(k, k))};
    const double num = ham_op_trace(h, a, ctx).real();
    const double den = ham_op_trace(h, h, ctx).real();
    if (den <= 0.0)
        throw std::logic_error("eth_linear_predictor: tr(Hh) must be positive");
    return LinearPredictor{TargetFunction::linear(num / den), num / den};
}

struct PowerLawFit {
    double exponent = 0.0;
    double std_error = 0.0;
};

/// Ordinary least squares of log(value) against log(N).
inline PowerLawFit scaling_exponent(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3)
        throw std::invalid_argument("scaling_exponent: need at least three points");
    for (const auto& [n, v] : points)
        if (v <= 0.0 || n <= 0.0)
            throw std::invalid_argument("scaling_exponent: values and sizes must be positive");
    const double m = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, v] : points) {
        sx += std::log(n);
        sy += std::log(v);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [n, v] : points) {
        const double dx = std::log(n) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(v) - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("scaling_exponent: all sizes identical");
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (const auto& [n, v] : points) {
        const double resid = (std::log(v) - my) - slope * (std::log(n) - mx);
        sse += resid * resid;
    }
    const double var = sse / (m - 2.0) / sxx;
    return PowerLawFit{slope, std::sqrt(std::max(var, 0.0))};
}

/// Standard deviation of the EEV about the local mean in energy bins of the
/// given width. Empty bins are omitted.
inline std::vector<std::pair<double, double>> eev_fluctuation_profile(const SpectrumTable& table,
                                                                      std::string_view obs_id,
                                                                      double window) {
    if (window <= 0.0) throw std::invalid_argument("eev_fluctuation_profile: window must be > 0");
    const std::size_t idx = table.obs_index(obs_id);
    if (table.records.empty()) return {};
    const double lo = table.records.front().energy;  // records sorted by energy
    const int bins = static_cast<int>((table.records.back().energy - lo) / window) + 1;

    std::vector<std::vector<std::complex<double>>> grouped(bins);
    for (const auto& rec : table.records) {
        int b = static_cast<int>((rec.energy - lo) / window);
        b = std::min(b, bins - 1);
        grouped[b].push_back(rec.eev[idx]);
    }
    std::vector<std::pair<double, double>> out;
    for (int b = 0; b < bins; ++b) {
        if (grouped[b].empty()) continue;
        std::complex<double> mean = 0.0;
        for (const auto& v : grouped[b]) mean += v;
        mean /= static_cast<double>(grouped[b].size());
        double var = 0.0;
        for (const auto& v : grouped[b]) var += std::norm(v - mean);
        var /= static_cast<double>(grouped[b].size());
        out.emplace_back(lo + (b + 0.5) * window, std::sqrt(var));
    }
    return out;
}

struct SizePoint {
    int sites = 0;
    double r = 0.0;
    double r_l1 = 0.0;
    double weak_eth = 0.0;
    double r_sup = 0.0;  // running-max proxy
};

struct ConvergenceReport {
    std::string observable;
    std::string variant;  // "zero" | "eth" | "fit"
    TargetFunction f;
    std::vector<SizePoint> points;
    std::optional<PowerLawFit> exponent;  // absent when r sits at the noise floor
};

/// Fills per-size statistics for one target function over a sweep of tables
/// (ascending sizes) and fits the scaling exponent when meaningful.
inline ConvergenceReport make_report(std::span<const SpectrumTable* const> tables,
                                     std::string_view obs_id, std::string_view variant,
                                     const TargetFunction& f, double noise_floor = 1e-12) {
    ConvergenceReport rep;
    rep.observable = std::string(obs_id);
    rep.variant = std::string(variant);
    rep.f = f;
    std::vector<double> rs;
    for (const auto* t : tables) {
        SizePoint pt;
        pt.sites = t->sites;
        pt.r = r_f(*t, obs_id, f);
        pt.r_l1 = r_f_l1(*t, obs_id, f);
        pt.weak_eth = weak_eth_statistic(*t, obs_id);
        rep.points.push_back(pt);
        rs.push_back(pt.r);
    }
    const auto sup = r_sup_proxy(rs);
    for (std::size_t i = 0; i < sup.size(); ++i) rep.points[i].r_sup = sup[i];

    bool fittable = tables.size() >= 3;
    for (double r : rs) fittable = fittable && r > noise_floor;
    if (fittable) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& pt : rep.points)
            pts.emplace_back(static_cast<double>(pt.sites), pt.r);
        rep.exponent = scaling_exponent(pts);
    }
    return rep;
}

}  // namespace eevconv
