#include "dfnsim/dae.hpp"

#include "dfnsim/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dfn {

void SolverConfig::validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0)) throw ConfigError("solver: tolerances must be positive");
    if (!(h_init > 0)) throw ConfigError("solver: h_init must be positive");
    if (!(h_init <= h_max)) throw ConfigError("solver: h_init must not exceed h_max");
    if (max_newton_iters < 1) throw ConfigError("solver: max_newton_iters must be >= 1");
    if (max_order < 1 || max_order > 2) throw ConfigError("solver: max_order must be 1 or 2");
    if (!(h_ss > 0)) throw ConfigError("solver: h_ss must be positive");
}

InitMethod init_method_from_string(const std::string& s) {
    if (s == "single_step") return InitMethod::SINGLE_STEP;
    if (s == "newton_alg") return InitMethod::NEWTON_ALGEBRAIC;
    throw ConfigError("unknown init_method '" + s + "' (have: single_step, newton_alg)");
}

const char* to_string(InitMethod m) {
    return m == InitMethod::SINGLE_STEP ? "single_step" : "newton_alg";
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::REACHED_TFINAL: return "reached_tfinal";
        case Termination::EVENT_CUTOFF: return "event_cutoff";
        case Termination::FAILED: return "failed";
    }
    return "?";
}

namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08; // sqrt(machine epsilon)

using Vec = std::vector<double>;

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

int argmax_abs(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    return best;
}

struct Weights {
    Vec w; // 1 / (abs_tol + rel_tol*|y|)
    void update(std::span<const double> y, const SolverConfig& cfg) {
        w.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            w[i] = 1.0 / (cfg.abs_tol + cfg.rel_tol * std::abs(y[i]));
    }
};

double wrms(std::span<const double> v, const Weights& wt, const std::vector<std::uint8_t>* mask) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        const double s = v[i] * wt.w[i];
        acc += s * s;
        ++n;
    }
    return n ? std::sqrt(acc / n) : 0.0;
}

// ---------------------------------------------------------------------------
// finite-difference Jacobians over a structural pattern

std::vector<std::vector<int>> build_col_rows(const DAESystem& sys) {
    std::vector<std::vector<int>> col_rows(sys.dimension);
    if (sys.sparsity.empty()) {
        for (int c = 0; c < sys.dimension; ++c) {
            col_rows[c].resize(sys.dimension);
            for (int r = 0; r < sys.dimension; ++r) col_rows[c][r] = r;
        }
        return col_rows;
    }
    for (const auto& [r, c] : sys.sparsity) col_rows[c].push_back(r);
    for (auto& rows : col_rows) {
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    }
    return col_rows;
}

// Greedy grouping of `cols` such that no two columns of a group touch the
// same active row.
std::vector<std::vector<int>> color_columns(const std::vector<std::vector<int>>& col_rows,
                                            const std::vector<int>& cols, int dim,
                                            const std::vector<std::uint8_t>* row_active) {
    std::vector<std::vector<int>> row_cols(dim);
    std::vector<int> color_of(col_rows.size(), -1);
    std::vector<std::vector<int>> groups;
    std::vector<char> used;
    for (int c : cols) {
        used.assign(groups.size(), 0);
        for (int r : col_rows[c]) {
            if (row_active && !(*row_active)[r]) continue;
            for (int c2 : row_cols[r])
                if (color_of[c2] >= 0) used[color_of[c2]] = 1;
        }
        int g = 0;
        while (g < static_cast<int>(groups.size()) && used[g]) ++g;
        if (g == static_cast<int>(groups.size())) groups.emplace_back();
        groups[g].push_back(c);
        color_of[c] = g;
        for (int r : col_rows[c]) {
            if (row_active && !(*row_active)[r]) continue;
            row_cols[r].push_back(c);
        }
    }
    return groups;
}

class ResidualFn {
public:
    ResidualFn(const DAESystem& sys, SolveStats* stats) : sys_(sys), stats_(stats) {}
    void operator()(double t, std::span<const double> y, std::span<const double> yp,
                    std::span<double> F) const {
        if (stats_) ++stats_->residual_evals;
        sys_.residual(t, y, yp, F);
    }

private:
    const DAESystem& sys_;
    SolveStats* stats_;
};

// Builds dF/dy + alpha dF/dy' column-wise by directional differences
// (y <- y + d e_c, y' <- y' + alpha d e_c) over the colored groups.
void build_step_jacobian(const ResidualFn& resid, double t, std::span<const double> y,
                         std::span<const double> yp, double alpha, double h,
                         const std::vector<std::vector<int>>& col_rows,
                         const std::vector<std::vector<int>>& groups, const Weights& wt,
                         std::span<const double> F0, Eigen::MatrixXd& J) {
    const int n = static_cast<int>(y.size());
    J.setZero(n, n);
    Vec yw(y.begin(), y.end()), ypw(yp.begin(), yp.end()), Fp(n);
    for (const auto& group : groups) {
        Vec deltas;
        deltas.reserve(group.size());
        for (int c : group) {
            const double d =
                kSqrtEps * std::max({std::abs(y[c]), std::abs(h * yp[c]), 1.0 / wt.w[c]});
            deltas.push_back(d);
            yw[c] += d;
            ypw[c] += alpha * d;
        }
        resid(t, yw, ypw, Fp);
        for (std::size_t k = 0; k < group.size(); ++k) {
            const int c = group[k];
            for (int r : col_rows[c]) J(r, c) = (Fp[r] - F0[r]) / deltas[k];
            yw[c] = y[c];
            ypw[c] = yp[c];
        }
    }
}

// Reduced Jacobian d resid[rows] / d u[cols] where u is y or y'.
void build_sub_jacobian(const ResidualFn& resid, double t, std::span<const double> y,
                        std::span<const double> yp, bool wrt_yp,
                        const std::vector<std::vector<int>>& col_rows,
                        const std::vector<int>& cols, const std::vector<int>& row_index,
                        const std::vector<std::uint8_t>& row_active,
                        const std::vector<std::vector<int>>& groups, std::span<const double> F0,
                        Eigen::MatrixXd& J) {
    const int n = static_cast<int>(y.size());
    std::vector<int> col_index(n, -1);
    for (std::size_t k = 0; k < cols.size(); ++k) col_index[cols[k]] = static_cast<int>(k);
    J.setZero(static_cast<int>(row_index.size() ? 0 : 0) + static_cast<int>(cols.size()),
              static_cast<int>(cols.size()));
    // row_index maps global row -> reduced row (or -1)
    J.setZero(static_cast<int>(cols.size()), static_cast<int>(cols.size()));
    Vec yw(y.begin(), y.end()), ypw(yp.begin(), yp.end()), Fp(n);
    for (const auto& group : groups) {
        Vec deltas;
        deltas.reserve(group.size());
        for (int c : group) {
            const double base = wrt_yp ? std::abs(yp[c]) + std::abs(y[c]) + 1.0
                                       : std::abs(y[c]) + 1.0;
            const double d = kSqrtEps * base;
            deltas.push_back(d);
            (wrt_yp ? ypw[c] : yw[c]) += d;
        }
        resid(t, yw, ypw, Fp);
        for (std::size_t k = 0; k < group.size(); ++k) {
            const int c = group[k];
            for (int r : col_rows[c]) {
                if (!row_active[r] || row_index[r] < 0) continue;
                J(row_index[r], col_index[c]) = (Fp[r] - F0[r]) / deltas[k];
            }
            if (wrt_yp) ypw[c] = yp[c]; else yw[c] = y[c];
        }
    }
}

struct IndexSplit {
    std::vector<int> diff, alg;
    std::vector<std::uint8_t> diff_mask, alg_mask;
    std::vector<int> diff_row_index, alg_row_index; // global row -> reduced row
};

IndexSplit split_indices(const DAESystem& sys) {
    IndexSplit s;
    s.diff_mask.assign(sys.dimension, 0);
    s.alg_mask.assign(sys.dimension, 0);
    s.diff_row_index.assign(sys.dimension, -1);
    s.alg_row_index.assign(sys.dimension, -1);
    if (static_cast<int>(sys.differential_mask.size()) != sys.dimension)
        throw ConfigError("DAE system: mask length does not match dimension");
    for (int i = 0; i < sys.dimension; ++i) {
        if (sys.differential_mask[i]) {
            s.diff_row_index[i] = static_cast<int>(s.diff.size());
            s.diff.push_back(i);
            s.diff_mask[i] = 1;
        } else {
            s.alg_row_index[i] = static_cast<int>(s.alg.size());
            s.alg.push_back(i);
            s.alg_mask[i] = 1;
        }
    }
    return s;
}

// Recovers y' on the differential entries by Newton on the differential rows
// at fixed y (linear for mass-matrix systems, so this converges immediately).
void recover_yp(const DAESystem& sys, const ResidualFn& resid, double t, std::span<const double> y,
                Vec& yp, const IndexSplit& split,
                const std::vector<std::vector<int>>& col_rows) {
    if (split.diff.empty()) return;
    const int n = sys.dimension;
    Vec F(n);
    const auto groups = color_columns(col_rows, split.diff, n, &split.diff_mask);
    Eigen::MatrixXd J;
    Eigen::VectorXd rhs(static_cast<int>(split.diff.size()));
    for (int it = 0; it < 8; ++it) {
        resid(t, y, yp, F);
        double fmax = 0.0;
        for (int r : split.diff) fmax = std::max(fmax, std::abs(F[r]));
        if (fmax <= 1e-12) return;
        build_sub_jacobian(resid, t, y, yp, /*wrt_yp=*/true, col_rows, split.diff,
                           split.diff_row_index, split.diff_mask, groups, F, J);
        for (std::size_t k = 0; k < split.diff.size(); ++k) rhs(k) = -F[split.diff[k]];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const Eigen::VectorXd d = lu.solve(rhs);
        for (std::size_t k = 0; k < split.diff.size(); ++k) yp[split.diff[k]] += d(k);
    }
    throw InitError("initialization: could not solve the differential equations for y'");
}

double residual_max(const ResidualFn& resid, double t, std::span<const double> y,
                    std::span<const double> yp, Vec& F) {
    resid(t, y, yp, F);
    return max_abs(F);
}

// cubic Hermite interpolation between two stored points
void hermite_eval(double t0, const Vec& y0, const Vec& yp0, double t1, const Vec& y1,
                  const Vec& yp1, double t, std::span<double> out, std::span<double> dout) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    const double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1;
    const double d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        if (!out.empty())
            out[i] = h00 * y0[i] + h10 * h * yp0[i] + h01 * y1[i] + h11 * h * yp1[i];
        if (!dout.empty())
            dout[i] = d00 * y0[i] + d10 * yp0[i] + d01 * y1[i] + d11 * yp1[i];
    }
}

} // namespace

std::vector<double> Trajectory::sample(double t) const {
    std::vector<double> out(states.empty() ? 0 : states.front().size());
    sample_into(t, out);
    return out;
}

void Trajectory::sample_into(double t, std::span<double> y_out) const {
    if (times.empty()) throw DomainError("trajectory: empty");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw DomainError("trajectory: sample time outside integration range");
    t = std::clamp(t, times.front(), times.back());
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i < times.size() && times[i] == t) {
        std::copy(states[i].begin(), states[i].end(), y_out.begin());
        return;
    }
    i = (i == 0) ? 0 : i - 1;
    if (i + 1 >= times.size()) i = times.size() - 2;
    hermite_eval(times[i], states[i], derivs[i], times[i + 1], states[i + 1], derivs[i + 1], t,
                 y_out, {});
}

Trajectory solve(const DAESystem& system, std::pair<double, double> t_span,
                 std::span<const double> y0, std::span<const double> yp0,
                 const SolverConfig& config, const EventFn& event) {
    config.validate();
    const int n = system.dimension;
    if (static_cast<int>(y0.size()) != n || static_cast<int>(yp0.size()) != n)
        throw DomainError("solve: state size does not match system dimension");
    const auto [t0, t_final] = t_span;
    if (!(t_final > t0)) throw DomainError("solve: t_span must be increasing");

    Trajectory traj;
    ResidualFn resid(system, &traj.stats);
    const IndexSplit split = split_indices(system);
    const auto col_rows = build_col_rows(system);
    std::vector<int> all_cols(n);
    for (int i = 0; i < n; ++i) all_cols[i] = i;
    const auto groups = color_columns(col_rows, all_cols, n, nullptr);

    Weights wt;
    wt.update(y0, config);

    Vec F(n);
    {
        const double f0 = residual_max(resid, t0, y0, yp0, F);
        if (!(f0 <= config.precondition_tol)) {
            std::ostringstream msg;
            msg << "solve: initial conditions inconsistent (residual " << f0 << " at index "
                << argmax_abs(F) << ", tolerance " << config.precondition_tol << ")";
            throw InitError(msg.str());
        }
    }

    traj.times.push_back(t0);
    traj.states.emplace_back(y0.begin(), y0.end());
    traj.derivs.emplace_back(yp0.begin(), yp0.end());

    if (event && event(t0, y0)) {
        traj.termination = Termination::EVENT_CUTOFF;
        return traj;
    }

    const double h_min = 1e-14 * std::max({1.0, std::abs(t0), std::abs(t_final)});
    double h = std::min({config.h_init, config.h_max, t_final - t0});
    double t = t0;

    Eigen::MatrixXd J;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool jac_built = false;
    bool jac_fresh = false; // built at the current iteration point
    double alpha_built = 0.0;

    Vec y_new(n), yp_new(n), bvec(n), est(n), delta(n);
    Eigen::VectorXd rhs(n);
    long n_accepted = 0;
    int consecutive_failures = 0;

    auto fail = [&](const std::string& why) {
        std::ostringstream msg;
        msg << why << " (after " << n_accepted << " accepted steps, t = " << t
            << ", worst residual index " << argmax_abs(F) << ")";
        traj.failure = msg.str();
        traj.termination = Termination::FAILED;
        return traj;
    };

    while (t < t_final - 1e-12 * std::max(1.0, std::abs(t_final))) {
        if (h < h_min) return fail("step size underflow");
        h = std::min({h, config.h_max, t_final - t});

        const int order = (n_accepted >= 2 && config.max_order >= 2) ? 2 : 1;
        const Vec& y_n = traj.states.back();
        const Vec& yp_n = traj.derivs.back();
        wt.update(y_n, config);

        // BDF coefficients: yp_new = (alpha*h) y_new/h + bvec
        double alpha;
        if (order == 1) {
            alpha = 1.0 / h;
            for (int i = 0; i < n; ++i) bvec[i] = -y_n[i] / h;
        } else {
            const std::size_t m = traj.times.size();
            const double h_prev = traj.times[m - 1] - traj.times[m - 2];
            const double rho = h / h_prev;
            const double A = (1.0 + 2.0 * rho) / (1.0 + rho);
            const double B = -(1.0 + rho);
            const double C = rho * rho / (1.0 + rho);
            alpha = A / h;
            const Vec& y_nm1 = traj.states[m - 2];
            for (int i = 0; i < n; ++i) bvec[i] = (B * y_n[i] + C * y_nm1[i]) / h;
        }

        // predictor
        for (int i = 0; i < n; ++i) y_new[i] = y_n[i] + h * yp_n[i];

        bool newton_ok = false;
        std::string newton_diag;
        try {
            if (!jac_built || std::abs(alpha / alpha_built - 1.0) > 0.3) {
                for (int i = 0; i < n; ++i) yp_new[i] = alpha * y_new[i] + bvec[i];
                resid(t + h, y_new, yp_new, F);
                build_step_jacobian(resid, t + h, y_new, yp_new, alpha, h, col_rows, groups, wt, F,
                                    J);
                lu.compute(J);
                jac_built = true;
                jac_fresh = true;
                alpha_built = alpha;
                ++traj.stats.jacobian_builds;
            }

            double dn_prev = std::numeric_limits<double>::infinity();
            for (int m = 0; m <= config.max_newton_iters; ++m) {
                for (int i = 0; i < n; ++i) yp_new[i] = alpha * y_new[i] + bvec[i];
                resid(t + h, y_new, yp_new, F);
                const double fnorm = max_abs(F);
                if (fnorm <= config.newton_ftol) {
                    newton_ok = true;
                    break;
                }
                if (m == config.max_newton_iters) {
                    newton_diag = "Newton iteration limit";
                    break;
                }
                for (int i = 0; i < n; ++i) rhs(i) = -F[i];
                const Eigen::VectorXd d = lu.solve(rhs);
                for (int i = 0; i < n; ++i) {
                    delta[i] = d(i);
                    y_new[i] += delta[i];
                }
                ++traj.stats.newton_iters;
                const double dn = wrms(delta, wt, nullptr);
                if (dn <= 1e-4 && fnorm <= 1e-6) {
                    for (int i = 0; i < n; ++i) yp_new[i] = alpha * y_new[i] + bvec[i];
                    resid(t + h, y_new, yp_new, F);
                    newton_ok = max_abs(F) <= std::max(config.newton_ftol, 1e-6);
                    if (newton_ok) break;
                }
                if (m >= 1 && dn > 4.0 * dn_prev) {
                    newton_diag = "Newton divergence";
                    break;
                }
                dn_prev = dn;
            }
        } catch (const SaturationError& e) {
            newton_diag = e.what();
        } catch (const AssemblyError& e) {
            newton_diag = e.what();
        }

        if (!newton_ok) {
            ++traj.stats.rejected_newton;
            if (n_accepted == 0) ++traj.stats.first_step_rejections;
            if (!jac_fresh) {
                jac_built = false; // refresh the iteration matrix and retry at the same h
                continue;
            }
            ++consecutive_failures;
            if (consecutive_failures > 25)
                return fail("repeated Newton failures: " +
                            (newton_diag.empty() ? std::string("no convergence") : newton_diag));
            h *= 0.25;
            jac_built = false;
            continue;
        }
        jac_fresh = false;

        // local error estimate from divided differences, differential entries
        double err = 0.0;
        if (n_accepted == 0) {
            for (int i = 0; i < n; ++i) est[i] = 0.5 * (y_new[i] - y_n[i] - h * yp_n[i]);
            err = wrms(est, wt, &split.diff_mask);
        } else if (order == 1) {
            const std::size_t m = traj.times.size();
            const double t_nm1 = traj.times[m - 2];
            const Vec& y_nm1 = traj.states[m - 2];
            const double ha = h, hb = t - t_nm1;
            for (int i = 0; i < n; ++i) {
                const double f01 = (y_new[i] - y_n[i]) / ha;
                const double f12 = (y_n[i] - y_nm1[i]) / hb;
                est[i] = ha * ha * (f01 - f12) / (ha + hb);
            }
            err = wrms(est, wt, &split.diff_mask);
        } else {
            const std::size_t m = traj.times.size();
            const double t_nm1 = traj.times[m - 2], t_nm2 = traj.times[m - 3];
            const Vec& y_nm1 = traj.states[m - 2];
            const Vec& y_nm2 = traj.states[m - 3];
            const double h0 = h, h1 = t - t_nm1, h2 = t_nm1 - t_nm2;
            for (int i = 0; i < n; ++i) {
                const double f01 = (y_new[i] - y_n[i]) / h0;
                const double f12 = (y_n[i] - y_nm1[i]) / h1;
                const double f23 = (y_nm1[i] - y_nm2[i]) / h2;
                const double dd2a = (f01 - f12) / (h0 + h1);
                const double dd2b = (f12 - f23) / (h1 + h2);
                const double dd3 = (dd2a - dd2b) / (h0 + h1 + h2);
                est[i] = h0 * h0 * (h0 + h1) * dd3;
            }
            err = wrms(est, wt, &split.diff_mask);
        }

        if (err > 1.0) {
            ++traj.stats.rejected_error;
            if (n_accepted == 0) ++traj.stats.first_step_rejections;
            ++consecutive_failures;
            if (consecutive_failures > 25) return fail("repeated error-test failures");
            const double fac =
                std::clamp(0.9 * std::pow(err, -1.0 / (order + 1)), 0.2, 0.9);
            h *= fac;
            continue;
        }

        // accept
        consecutive_failures = 0;
        t += h;
        ++n_accepted;
        ++traj.stats.steps;
        traj.times.push_back(t);
        traj.states.push_back(y_new);
        traj.derivs.push_back(yp_new);

        if (event && event(t, y_new)) {
            // refine the crossing by bisection on the dense output
            const std::size_t m = traj.times.size();
            double ta = traj.times[m - 2], tb = t;
            Vec ymid(n), ypmid(n);
            while (tb - ta > config.event_time_tol) {
                const double tm = 0.5 * (ta + tb);
                hermite_eval(traj.times[m - 2], traj.states[m - 2], traj.derivs[m - 2], t,
                             traj.states[m - 1], traj.derivs[m - 1], tm, ymid, {});
                if (event(tm, ymid)) tb = tm; else ta = tm;
            }
            hermite_eval(traj.times[m - 2], traj.states[m - 2], traj.derivs[m - 2], t,
                         traj.states[m - 1], traj.derivs[m - 1], tb, ymid, ypmid);
            traj.times.back() = tb;
            traj.states.back() = ymid;
            traj.derivs.back() = ypmid;
            traj.termination = Termination::EVENT_CUTOFF;
            return traj;
        }

        const double fac = err > 1e-10 ? std::clamp(0.9 * std::pow(err, -1.0 / (order + 1)), 0.2, 2.0)
                                       : 2.0;
        h *= fac;
    }

    traj.termination = Termination::REACHED_TFINAL;
    return traj;
}

namespace {

// Damped full Newton used by the initialization routines. Unknowns are the
// whole state vector; yp is tied to y through yp = alpha*(y - y_ref).
Vec init_newton_full(const DAESystem& sys, const ResidualFn& resid, double t0, const Vec& y_ref,
                     double alpha, const char* what) {
    const int n = sys.dimension;
    const auto col_rows = build_col_rows(sys);
    std::vector<int> all_cols(n);
    for (int i = 0; i < n; ++i) all_cols[i] = i;
    const auto groups = color_columns(col_rows, all_cols, n, nullptr);

    Vec y = y_ref, yp(n, 0.0), F(n), Fp(n), y_try(n), yp_try(n);
    Eigen::MatrixXd J;
    Eigen::VectorXd rhs(n);
    SolverConfig wcfg; // default weights for FD scaling only
    Weights wt;

    auto eval = [&](const Vec& yy, Vec& ff) {
        Vec& ypv = yp_try;
        for (int i = 0; i < n; ++i) ypv[i] = alpha * (yy[i] - y_ref[i]);
        resid(t0, yy, ypv, ff);
        return max_abs(ff);
    };

    double fnorm = eval(y, F);
    for (int it = 0; it < 60; ++it) {
        if (fnorm <= 1e-11) return y;
        wt.update(y, wcfg);
        for (int i = 0; i < n; ++i) yp[i] = alpha * (y[i] - y_ref[i]);
        build_step_jacobian(resid, t0, y, yp, alpha, 1.0, col_rows, groups, wt, F, J);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        for (int i = 0; i < n; ++i) rhs(i) = -F[i];
        const Eigen::VectorXd d = lu.solve(rhs);

        // backtracking on the residual norm
        double lambda = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 10; ++bt) {
            for (int i = 0; i < n; ++i) y_try[i] = y[i] + lambda * d(i);
            double fn_try;
            try {
                fn_try = eval(y_try, Fp);
            } catch (const Error&) {
                lambda *= 0.5;
                continue;
            }
            if (fn_try < fnorm || fn_try <= 1e-11) {
                y = y_try;
                F = Fp;
                fnorm = fn_try;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    if (fnorm <= 1e-8) return y; // converged well enough to meet the contract
    std::ostringstream msg;
    msg << what << ": Newton did not converge (residual " << fnorm << " at index "
        << argmax_abs(F) << ")";
    throw InitError(msg.str());
}

} // namespace

std::pair<std::vector<double>, std::vector<double>> init_single_step(
    const DAESystem& system, std::span<const double> y0_diff, std::span<const double> alg_guess,
    double h_ss, double t0) {
    if (!(h_ss > 0)) throw DomainError("init_single_step: h_ss must be positive");
    const IndexSplit split = split_indices(system);
    if (y0_diff.size() != split.diff.size() || alg_guess.size() != split.alg.size())
        throw DomainError("init_single_step: input sizes do not match the mask");

    SolveStats stats;
    ResidualFn resid(system, &stats);
    const int n = system.dimension;

    Vec y_guess(n, 0.0);
    for (std::size_t k = 0; k < split.diff.size(); ++k) y_guess[split.diff[k]] = y0_diff[k];
    for (std::size_t k = 0; k < split.alg.size(); ++k) y_guess[split.alg[k]] = alg_guess[k];

    Vec y_star;
    try {
        y_star = init_newton_full(system, resid, t0, y_guess, 1.0 / h_ss,
                                  "single-step initialization");
    } catch (const InitError& e) {
        throw InitError(std::string(e.what()) + "; consider init_method=newton_alg");
    } catch (const Error& e) {
        throw InitError(std::string("single-step initialization failed: ") + e.what() +
                        "; consider init_method=newton_alg");
    }

    // keep the given differential values, adopt the relaxed algebraic ones
    Vec y0(n);
    Vec yp0(n, 0.0);
    for (std::size_t k = 0; k < split.diff.size(); ++k) {
        const int i = split.diff[k];
        y0[i] = y0_diff[k];
        yp0[i] = (y_star[i] - y0_diff[k]) / h_ss;
    }
    for (int i : split.alg) y0[i] = y_star[i];

    const auto col_rows = build_col_rows(system);
    recover_yp(system, resid, t0, y0, yp0, split, col_rows);

    Vec F(n);
    const double f0 = residual_max(resid, t0, y0, yp0, F);
    if (!(f0 <= 1e-8))
        throw InitError("single-step initialization left residual " + std::to_string(f0) +
                        "; consider init_method=newton_alg");
    return {std::move(y0), std::move(yp0)};
}

std::pair<std::vector<double>, std::vector<double>> init_newton_algebraic(
    const DAESystem& system, std::span<const double> y0_diff, std::span<const double> alg_guess,
    double t0) {
    const IndexSplit split = split_indices(system);
    if (y0_diff.size() != split.diff.size() || alg_guess.size() != split.alg.size())
        throw DomainError("init_newton_algebraic: input sizes do not match the mask");
    for (double v : y0_diff)
        if (!std::isfinite(v)) throw DomainError("init_newton_algebraic: non-finite differential value");

    SolveStats stats;
    ResidualFn resid(system, &stats);
    const int n = system.dimension;
    const int na = static_cast<int>(split.alg.size());

    Vec y(n, 0.0), yp(n, 0.0), F(n), Fp(n), y_try(n);
    for (std::size_t k = 0; k < split.diff.size(); ++k) y[split.diff[k]] = y0_diff[k];
    for (std::size_t k = 0; k < split.alg.size(); ++k) y[split.alg[k]] = alg_guess[k];

    const auto col_rows = build_col_rows(system);

    if (na > 0) {
        const auto groups = color_columns(col_rows, split.alg, n, &split.alg_mask);
        Eigen::MatrixXd J;
        Eigen::VectorXd rhs(na);

        auto alg_norm = [&](const Vec& ff) {
            double m = 0.0;
            for (int r : split.alg) m = std::max(m, std::abs(ff[r]));
            return m;
        };

        resid(t0, y, yp, F);
        double fnorm = alg_norm(F);
        bool done = fnorm <= 1e-11;
        for (int it = 0; it < 60 && !done; ++it) {
            build_sub_jacobian(resid, t0, y, yp, /*wrt_yp=*/false, col_rows, split.alg,
                               split.alg_row_index, split.alg_mask, groups, F, J);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
            const double rcond = lu.rcond();
            if (!(rcond > 1e-14)) {
                std::ostringstream msg;
                msg << "algebraic initialization: Jacobian numerically singular "
                    << "(reciprocal condition estimate " << rcond << ")";
                throw InitError(msg.str());
            }
            for (int k = 0; k < na; ++k) rhs(k) = -F[split.alg[k]];
            const Eigen::VectorXd d = lu.solve(rhs);

            double lambda = 1.0;
            bool improved = false;
            for (int bt = 0; bt < 10; ++bt) {
                y_try = y;
                for (int k = 0; k < na; ++k) y_try[split.alg[k]] += lambda * d(k);
                double fn_try;
                try {
                    resid(t0, y_try, yp, Fp);
                    fn_try = alg_norm(Fp);
                } catch (const Error&) {
                    lambda *= 0.5;
                    continue;
                }
                if (fn_try < fnorm || fn_try <= 1e-11) {
                    y = y_try;
                    F = Fp;
                    fnorm = fn_try;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!improved) break;
            done = fnorm <= 1e-11;
        }
        if (!done && fnorm > 1e-8)
            throw InitError("algebraic initialization: Newton did not converge (residual " +
                            std::to_string(fnorm) + ")");
    }

    recover_yp(system, resid, t0, y, yp, split, col_rows);

    const double f0 = residual_max(resid, t0, y, yp, F);
    if (!(f0 <= 1e-8))
        throw InitError("algebraic initialization left residual " + std::to_string(f0));
    return {std::move(y), std::move(yp)};
}

} // namespace dfn
