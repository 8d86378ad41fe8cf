// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/composer.hpp"
#include "layerlab/euler.hpp"
#include "layerlab/fields.hpp"
#include "layerlab/norms.hpp"
#include "layerlab/prandtl.hpp"
#include "layerlab/scenario.hpp"
#include "layerlab/viscous.hpp"

namespace layerlab {

// ---------------------------------------------------------------------------
// Tracked sweep quantities

enum Quantity : int {
    Q_err_approx_l2 = 0,
    Q_err_approx_h1,
    Q_err_approx_linf,
    Q_err_euler_l2,
    Q_interior_h1,
    Q_interior_linf,
    Q_corrector_l2,
    Q_rem_A,
    Q_rem_B,
    Q_rem_C,
    Q_rem_D,
    Q_rem_E,
    Q_COUNT
};

inline const char* quantity_name(int q) {
    static const char* names[Q_COUNT] = {
        "err_approx_l2", "err_approx_h1", "err_approx_linf", "err_euler_l2",
        "interior_h1",   "interior_linf", "corrector_l2",    "rem_A",
        "rem_B",         "rem_C",         "rem_D",           "rem_E"};
    return names[q];
}

/// Quantities that depend on the viscous solve (and hence carry a resolution
/// audit ratio); the corrector/remainder quantities are viscous-free.
inline bool quantity_audited(int q) { return q <= Q_interior_linf; }

struct ErrorReport {
    double epsilon = 0.0;
    std::array<double, Q_COUNT> value{};
    AnisoResult aniso;                        // on u2_err = u2^eps - u2^a
    std::array<double, Q_COUNT> audit{};      // per-quantity Richardson ratios
    bool audited = false;
    double resolution_audit = 0.0;            // max over the err_* quantities
    ViscousDiagnostics diag;
};

// ---------------------------------------------------------------------------
// Per-stamp norm accumulation (streaming; no full series kept)

class StampAccumulator {
public:
    StampAccumulator(const Scenario& s, const Composer& cmp, double delta)
        : s_(&s), cmp_(&cmp), delta_(delta) {
        aniso_.trace_tol = 1e-8;
    }

    void on_stamp(int k, const Field2D& u2eps, const Field1D& u1eps) {
        const double L = s_->L;
        const auto& e = *euler();
        Field1D lay1 = cmp_->layer_u1(k);
        Field2D lay2 = cmp_->layer_u2(k);
        Field2D u20 = euler_u2_at(*s_, e, k);
        const auto& u10 = e.u1.at(k);

        Field1D d1a = u1eps, d1e = u1eps;
        for (int j = 0; j < d1a.nz(); ++j) {
            d1e.v[j] -= u10.v[j];
            d1a.v[j] = d1e.v[j] - lay1.v[j];
        }
        Field2D d2a = u2eps, d2e = u2eps;
        for (std::size_t p = 0; p < d2a.v.size(); ++p) {
            d2e.v[p] -= u20.v[p];
            d2a.v[p] = d2e.v[p] - lay2.v[p];
        }

        auto comb2 = [L](double n1, double n2) { return std::sqrt(L * n1 * n1 + n2 * n2); };

        hit(Q_err_approx_l2, comb2(l2_norm(d1a), l2_norm(d2a)));
        hit(Q_err_approx_h1, comb2(h1_norm(d1a), h1_norm(d2a)));
        hit(Q_err_approx_linf, std::max(linf_norm(d1a), linf_norm(d2a)));
        hit(Q_err_euler_l2, comb2(l2_norm(d1e), l2_norm(d2e)));

        Field1D i1 = interior_restrict(d1e, delta_);
        Field2D i2 = interior_restrict(d2e, delta_);
        hit(Q_interior_h1, comb2(h1_norm(i1), h1_norm(i2)));
        hit(Q_interior_linf, std::max(linf_norm(i1), linf_norm(i2)));

        hit(Q_corrector_l2, comb2(l2_norm(lay1), l2_norm(lay2)));

        RemainderFrame R = cmp_->remainders(k);
        hit(Q_rem_A, l2_norm(R.A));
        hit(Q_rem_B, l2_norm(R.B));
        hit(Q_rem_C, l2_norm(R.C));
        hit(Q_rem_D, l2_norm(R.D));
        hit(Q_rem_E, l2_norm(R.E));

        aniso_.add(d2a);
    }

    ErrorReport finalize() const {
        ErrorReport r;
        r.epsilon = cmp_->eps();
        r.value = max_;
        r.aniso = aniso_.finalize();
        return r;
    }

private:
    const EulerSolution* euler() const { return cmp_->euler(); }
    void hit(int q, double v) { max_[q] = std::max(max_[q], v); }

    const Scenario* s_;
    const Composer* cmp_;
    double delta_;
    std::array<double, Q_COUNT> max_{};
    AnisoAccumulator aniso_;
};

/// Materialized-series variant of the error computation (test-scale runs).
/// u1eps/u2eps must live on the composer's stamps and grid.
inline ErrorReport compute_errors(const Scenario& s, const TimeSeries<Field1D>& u1eps,
                                  const TimeSeries<Field2D>& u2eps, const Composer& cmp,
                                  double delta) {
    require(u2eps.size() == static_cast<int>(cmp.stamps().size()),
            "compute_errors: stamp mismatch");
    require(u1eps.size() == u2eps.size(), "compute_errors: u1/u2 stamp mismatch");
    StampAccumulator acc(s, cmp, delta);
    for (int k = 0; k < u2eps.size(); ++k) acc.on_stamp(k, u2eps.at(k), u1eps.at(k));
    return acc.finalize();
}

// ---------------------------------------------------------------------------
// Log-log rate fitting

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // in ln units
    double r2 = 0.0;
    int n_points = 0;
    std::vector<double> used_eps;
    std::vector<std::string> warnings;
};

/// Least-squares line through (ln eps, ln norm). Nonpositive norms are
/// excluded with a warning; fewer than 3 surviving pairs is an error.
inline RateFit fit_rate(const std::vector<double>& eps_list,
                        const std::vector<double>& norm_list) {
    require(eps_list.size() == norm_list.size(), "fit_rate: length mismatch");
    RateFit f;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(norm_list[i] > 0.0)) {
            f.warnings.push_back("excluded nonpositive norm at eps = " +
                                 std::to_string(eps_list[i]));
            continue;
        }
        require(eps_list[i] > 0.0, "fit_rate: eps must be positive");
        xs.push_back(std::log(eps_list[i]));
        ys.push_back(std::log(norm_list[i]));
        f.used_eps.push_back(eps_list[i]);
    }
    if (xs.size() < 3) throw DomainError("fit_rate: fewer than 3 positive pairs");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ssr = 0, sst = 0, ybar = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double fit = f.intercept + f.slope * xs[i];
        ssr += (ys[i] - fit) * (ys[i] - fit);
        sst += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
    f.n_points = static_cast<int>(xs.size());
    return f;
}

// ---------------------------------------------------------------------------
// Grid/time-step policy

struct GridPolicy {
    int nx = 128;
    int nz = 513;
    bool graded = true;
    double wall_refine = 32.0;  // target wall spacing sqrt(eps)/wall_refine
    int min_layer_nodes = 24;
    double dt_hmin_factor = 1.0;
    double cfl = 0.5;
    int stamps = 201;
    int corrector_substeps = 1;
};

/// Builds the eps-resolving channel grid: tanh grading tuned until at least
/// min_layer_nodes nodes lie inside each sqrt(eps) wall layer.
inline GridPtr build_grid(const GridPolicy& pol, double eps, double L) {
    if (!pol.graded)
        return std::make_shared<Grid2D>(
            Grid2D::channel(pol.nx, uniform_nodes(pol.nz, 0.0, 1.0), L));
    double w = std::sqrt(eps);
    double target = w / pol.wall_refine;
    int nz = pol.nz;
    for (int attempt = 0; attempt < 16; ++attempt) {
        double gamma = pick_tanh_gamma(nz, target);
        auto nodes = tanh_graded_nodes(nz, gamma);
        int in_layer = count_nodes_below(nodes, w);
        if (in_layer >= pol.min_layer_nodes)
            return std::make_shared<Grid2D>(Grid2D::channel(pol.nx, std::move(nodes), L));
        if (attempt % 2 == 0) target /= 1.5;
        else nz = nz + nz / 2;
    }
    throw DomainError("build_grid: could not satisfy the layer-resolution policy");
}

/// Doubled-resolution twin of a graded grid; base nodes are a subset.
inline GridPtr refine_grid(const Grid2D& g) {
    // recover the node set by inserting geometric midpoints in s-space: the
    // tanh family is closed under doubling the s resolution, so rebuild from
    // the stretch implied by the wall spacing
    // (callers pass grids built by build_grid / uniform_nodes)
    const int n = g.nz();
    // detect uniform
    bool uniform = true;
    double h0 = g.z[1] - g.z[0];
    for (int j = 1; j + 1 < n && uniform; ++j)
        if (std::fabs((g.z[j + 1] - g.z[j]) - h0) > 1e-12) uniform = false;
    if (uniform)
        return std::make_shared<Grid2D>(
            Grid2D::channel(2 * g.nx, uniform_nodes(2 * (n - 1) + 1, 0.0, 1.0), g.L));
    // graded: solve for gamma from the wall spacing
    double lo = 1e-6, hi = 64.0;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        auto v = tanh_graded_nodes(n, mid);
        ((v[1] - v[0]) > g.z[1] - g.z[0] ? lo : hi) = mid;
    }
    double gamma = 0.5 * (lo + hi);
    return std::make_shared<Grid2D>(
        Grid2D::channel(2 * g.nx, tanh_graded_nodes(2 * (n - 1) + 1, gamma), g.L));
}

/// Time-step count: dt <= dt_hmin_factor * h_min, rounded to a stamp multiple.
inline int pick_nt(const GridPolicy& pol, const Grid2D& g, double T) {
    double hmin = std::numeric_limits<double>::infinity();
    for (int j = 1; j < g.nz(); ++j) hmin = std::min(hmin, g.z[j] - g.z[j - 1]);
    double dt_target = pol.dt_hmin_factor * hmin;
    int per = pol.stamps - 1;
    int k = std::max(1, static_cast<int>(std::ceil(T / (dt_target * per))));
    return k * per;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepConfig {
    std::vector<double> eps_list;  // strictly decreasing
    GridPolicy policy;
    double delta = 0.25;
    double z_max = 20.0;
    int nZ = 401;
    int jobs = 0;  // 0 = hardware concurrency
    enum class Audit { off, smallest, full } audit = Audit::full;
    double audit_threshold = 0.1;
};

struct QuantityFit {
    std::string name;
    bool valid = false;
    RateFit fit;
};

struct SweepReport {
    std::vector<double> eps_list;
    std::vector<ErrorReport> reports;
    std::vector<QuantityFit> fits;  // one per tracked quantity
    WeightedReport weighted_lower, weighted_upper;
    bool corrector_reuse = true;
    double aniso_spread = 0.0;  // max/min recorded ratio over audited eps
    std::vector<std::string> notes;
};

namespace detail {

inline Field1D restrict_stride2(const Field1D& fine, GridPtr base) {
    Field1D out(base, fine.t);
    for (int j = 0; j < base->nz(); ++j) out.v[j] = fine.v[2 * j];
    return out;
}

inline Field2D restrict_stride2(const Field2D& fine, GridPtr base) {
    Field2D out(base, fine.t);
    const int nx = base->nx;
    for (int j = 0; j < base->nz(); ++j)
        for (int ix = 0; ix < nx; ++ix)
            out.at(ix, j) = fine.at(2 * ix, 2 * j);
    return out;
}

}  // namespace detail

/// One eps leg of the sweep: resolve the viscous pair on the policy grid and
/// stream the per-stamp norms. When `audit`, re-solve at doubled resolution
/// and report per-quantity Richardson ratios via restriction to base nodes.
inline ErrorReport run_single_eps(const Scenario& s, double eps, const GridPolicy& pol,
                                  const CorrectorSet& lower, const CorrectorSet& upper,
                                  double delta, bool audit) {
    const int stamps = pol.stamps;
    GridPtr grid = build_grid(pol, eps, s.L);
    int nt = pick_nt(pol, *grid, s.T);
    int stride = nt / (stamps - 1);

    ViscousOptions vopt;
    vopt.cfl = pol.cfl;
    vopt.min_layer_nodes = pol.min_layer_nodes;

    EulerSolution euler = solve_euler(s, grid, stamps);
    Composer cmp(s, euler, lower, upper, eps, grid);
    StampAccumulator acc(s, cmp, delta);

    ViscousDiagnostics diag;
    auto u1_half = solve_viscous_u1(s, eps, grid, 2 * nt, 1, vopt, &diag);
    StampSink sink = [&](int k, const Field2D& u2, const Field1D& u1) {
        acc.on_stamp(k, u2, u1);
    };
    solve_viscous_u2(s, eps, u1_half, grid, nt, stride, vopt, &diag, &sink, false);
    ErrorReport rep = acc.finalize();
    rep.diag = diag;

    if (audit) {
        GridPtr fine = refine_grid(*grid);
        int nt_f = 2 * nt;
        int stride_f = nt_f / (stamps - 1);
        EulerSolution euler_f = solve_euler(s, fine, stamps);
        StampAccumulator acc_f(s, cmp, delta);
        ViscousDiagnostics diag_f;
        auto u1_half_f = solve_viscous_u1(s, eps, fine, 2 * nt_f, 1, vopt, &diag_f);
        StampSink sink_f = [&](int k, const Field2D& u2f, const Field1D& u1f) {
            Field2D u2r = detail::restrict_stride2(u2f, grid);
            Field1D u1r = detail::restrict_stride2(u1f, grid);
            acc_f.on_stamp(k, u2r, u1r);
        };
        solve_viscous_u2(s, eps, u1_half_f, fine, nt_f, stride_f, vopt, &diag_f, &sink_f,
                         false);
        ErrorReport rep_f = acc_f.finalize();
        rep.audited = true;
        for (int q = 0; q < Q_COUNT; ++q) {
            if (!quantity_audited(q)) {
                rep.audit[q] = 0.0;
                continue;
            }
            double nf = rep_f.value[q], nb = rep.value[q];
            double denom = std::max(nf, 1e-300);
            rep.audit[q] = std::fabs(nf - nb) * (4.0 / 3.0) / denom;
        }
        rep.resolution_audit =
            std::max(std::max(rep.audit[Q_err_approx_l2], rep.audit[Q_err_approx_h1]),
                     std::max(rep.audit[Q_err_approx_linf], rep.audit[Q_err_euler_l2]));
    }
    return rep;
}

/// Full sweep: Euler and the (eps-free) correctors are solved once and shared
/// across every eps leg; per-eps legs may run on a worker pool.
inline SweepReport run_sweep(const Scenario& s, const SweepConfig& cfg) {
    require(!cfg.eps_list.empty(), "run_sweep: eps_list must be nonempty");
    for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
        require(cfg.eps_list[i] < cfg.eps_list[i - 1],
                "run_sweep: eps_list must be strictly decreasing");
    ValidationReport v = validate_scenario(s);
    if (!v.ok()) throw ScenarioError("run_sweep: scenario failed validation");

    SweepReport out;
    out.eps_list = cfg.eps_list;
    const GridPolicy& pol = cfg.policy;

    // corrector inputs: wall traces only touch z = 0, 1, so a coarse
    // reference grid serves every eps
    GridPtr ref = std::make_shared<Grid2D>(
        Grid2D::channel(pol.nx, uniform_nodes(9, 0.0, 1.0), s.L));
    EulerSolution euler_ref = solve_euler(s, ref, pol.stamps);
    auto zgrid = std::make_shared<HalfLineGrid>(HalfLineGrid::uniform(cfg.nZ, cfg.z_max));
    int nt_corr = (pol.stamps - 1) * pol.corrector_substeps;
    CorrectorOptions copt;
    copt.cfl = pol.cfl;
    CorrectorSet lower = solve_corrector(Side::lower, s, euler_ref, zgrid, pol.nx, nt_corr,
                                         pol.corrector_substeps, copt);
    CorrectorSet upper = solve_corrector(Side::upper, s, euler_ref, zgrid, pol.nx, nt_corr,
                                         pol.corrector_substeps, copt);
    out.corrector_reuse = true;

    std::vector<int> ls = {0, 1, 2, 3, 4};
    std::vector<int> is = {0, 1, 2};
    out.weighted_lower = weighted_report(lower, ls, is);
    out.weighted_upper = weighted_report(upper, ls, is);

    const int ne = static_cast<int>(cfg.eps_list.size());
    out.reports.resize(ne);
    std::atomic<int> next{0};
    std::vector<std::string> job_errors(ne);
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= ne) return;
            bool audit = cfg.audit == SweepConfig::Audit::full ||
                         (cfg.audit == SweepConfig::Audit::smallest && i == ne - 1);
            try {
                out.reports[i] = run_single_eps(s, cfg.eps_list[i], pol, lower, upper,
                                                cfg.delta, audit);
            } catch (const std::exception& e) {
                job_errors[i] = e.what();
            }
        }
    };
    int jobs = cfg.jobs > 0
                   ? cfg.jobs
                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min(jobs, ne);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (int i = 0; i < ne; ++i)
        if (!job_errors[i].empty())
            throw SolverError("sweep job for eps = " + std::to_string(cfg.eps_list[i]) +
                              " failed: " + job_errors[i]);

    // fits per quantity over audit-passing points
    for (int q = 0; q < Q_COUNT; ++q) {
        std::vector<double> es, ns;
        for (int i = 0; i < ne; ++i) {
            const ErrorReport& r = out.reports[i];
            if (quantity_audited(q) && r.audited &&
                r.audit[q] >= cfg.audit_threshold) {
                out.notes.push_back(std::string("audit excluded ") + quantity_name(q) +
                                    " at eps = " + std::to_string(r.epsilon) +
                                    " (ratio " + std::to_string(r.audit[q]) + ")");
                continue;
            }
            es.push_back(r.epsilon);
            ns.push_back(r.value[q]);
        }
        QuantityFit qf;
        qf.name = quantity_name(q);
        try {
            qf.fit = fit_rate(es, ns);
            qf.valid = true;
        } catch (const std::exception& e) {
            qf.valid = false;
            qf.fit.warnings.push_back(e.what());
        }
        out.fits.push_back(std::move(qf));
    }

    // monotonicity of the approximation-error norms along decreasing eps
    for (int q = Q_err_approx_l2; q <= Q_err_approx_linf; ++q) {
        for (int i = 1; i < ne; ++i) {
            if (out.reports[i].value[q] > out.reports[i - 1].value[q] * (1.0 + 1e-9))
                out.notes.push_back(std::string("non-monotone ") + quantity_name(q) +
                                    " between eps = " +
                                    std::to_string(out.reports[i - 1].epsilon) + " and " +
                                    std::to_string(out.reports[i].epsilon));
        }
    }

    double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
    for (const auto& r : out.reports) {
        if (r.aniso.ratio > 0.0) {
            amin = std::min(amin, r.aniso.ratio);
            amax = std::max(amax, r.aniso.ratio);
        }
    }
    out.aniso_spread = (amin > 0.0 && std::isfinite(amin)) ? amax / amin : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Slope bars checked by `sweep` runs (and the acceptance suite)

struct BarCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline void add_slope_bar(std::vector<BarCheck>& out, const SweepReport& rep, int q,
                          double lo, double hi, bool gate_r2) {
    const QuantityFit& qf = rep.fits[q];
    BarCheck b;
    b.name = qf.name;
    char buf[160];
    if (!qf.valid) {
        b.pass = false;
        b.detail = "fit unavailable";
        out.push_back(b);
        return;
    }
    bool slope_ok = qf.fit.slope >= lo && qf.fit.slope <= hi;
    bool r2_ok = !gate_r2 || qf.fit.r2 >= 0.98;
    bool pts_ok = qf.fit.n_points >= 5;
    b.pass = slope_ok && r2_ok && pts_ok;
    std::snprintf(buf, sizeof buf, "slope %.4f in [%.2f, %.2f], R2 %.5f%s, %d pts",
                  qf.fit.slope, lo, hi, qf.fit.r2, gate_r2 ? "" : " (not gated)",
                  qf.fit.n_points);
    b.detail = buf;
    out.push_back(b);
}

}  // namespace detail

/// The sweep-level rate assertions: two-sided windows for the optimal-rate
/// quantities, one-sided floors for the upper-bound quantities. R2 >= 0.98 is
/// required wherever the underlying decay is a power law; the cutoff-overlap
/// remainder decays faster than any power of eps, so its line fit is reported
/// but not gated on R2.
inline std::vector<BarCheck> acceptance_slope_checks(const SweepReport& rep) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<BarCheck> out;
    detail::add_slope_bar(out, rep, Q_err_euler_l2, 0.20, 0.35, true);
    detail::add_slope_bar(out, rep, Q_corrector_l2, 0.20, 0.30, true);
    detail::add_slope_bar(out, rep, Q_err_approx_l2, 0.70, inf, true);
    detail::add_slope_bar(out, rep, Q_err_approx_h1, 0.20, inf, true);
    detail::add_slope_bar(out, rep, Q_err_approx_linf, 0.45, inf, true);
    detail::add_slope_bar(out, rep, Q_interior_h1, 0.20, inf, true);
    detail::add_slope_bar(out, rep, Q_interior_linf, 0.45, inf, true);
    detail::add_slope_bar(out, rep, Q_rem_A, 0.70, inf, true);
    detail::add_slope_bar(out, rep, Q_rem_B, 1.00, inf, true);
    detail::add_slope_bar(out, rep, Q_rem_C, 1.50, inf, false);
    detail::add_slope_bar(out, rep, Q_rem_D, 0.70, inf, true);
    detail::add_slope_bar(out, rep, Q_rem_E, 1.00, inf, true);

    BarCheck an;
    an.name = "aniso_ratio_spread";
    an.pass = rep.aniso_spread > 0.0 && rep.aniso_spread < 2.0;
    char buf[120];
    std::snprintf(buf, sizeof buf, "max/min ratio across sweep = %.4f (< 2 required)",
                  rep.aniso_spread);
    an.detail = buf;
    out.push_back(an);
    return out;
}

}  // namespace layerlab
