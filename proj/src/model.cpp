#include "dfnsim/model.hpp"

#include "dfnsim/constants.hpp"
#include "dfnsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfn {

namespace {

double safe_sinh(double x) { return std::sinh(std::clamp(x, -350.0, 350.0)); }
double safe_cosh(double x) { return std::cosh(std::clamp(x, -350.0, 350.0)); }

} // namespace

double butler_volmer_flux(double c_surf, double c_e, double eta, double k, double cs_max, double T) {
    if (!(c_surf > 0.0 && c_surf < cs_max)) {
        std::ostringstream msg;
        msg << "Butler-Volmer: surface concentration " << c_surf << " outside (0, " << cs_max << ")";
        throw SaturationError(msg.str());
    }
    if (!(c_e > 0.0)) throw SaturationError("Butler-Volmer: electrolyte concentration depleted");
    const double exchange = 2.0 * k * std::sqrt(c_e * c_surf * (cs_max - c_surf));
    return exchange * safe_sinh(0.5 * phys::F * eta / (phys::R * T));
}

// Everything the interfacial flux solve needs about one electrode x-cell.
struct DfnModel::CellCtx {
    const RadialMesh* rmesh;
    const OCPCurve* ocp;
    double k, cs_max, Ds;
    double c_lo, c_hi; // admissible surface-concentration range
    bool hermite;
};

DfnModel::DfnModel(CellParameters params, Mesh mesh, RadialMethod radial)
    : params_(std::move(params)), mesh_(std::move(mesh)), radial_(radial) {
    params_.validate();
    layout_ = make_layout(mesh_);

    const int nx = mesh_.nx_total();
    eps_e_.resize(nx);
    a_s_.resize(nx);
    for (int i = 0; i < nx; ++i) {
        switch (mesh_.region_of[i]) {
            case 0: eps_e_[i] = params_.eps_e_n; a_s_[i] = mesh_.a_s_neg; break;
            case 1: eps_e_[i] = params_.eps_e_s; a_s_[i] = 0.0; break;
            default: eps_e_[i] = params_.eps_e_p; a_s_[i] = mesh_.a_s_pos; break;
        }
    }
    sigma_eff_n_ = effective_property(params_.sigma_n, params_.eps_s_n, params_.brugg);
    sigma_eff_p_ = effective_property(params_.sigma_p, params_.eps_s_p, params_.brugg);

    // Row scales: concentrations against a 1C turnover hour, charge equations
    // against the 1C current density.
    const double tau = 3600.0;
    scale_cs_n_ = tau / params_.cs_max_n;
    scale_cs_p_ = tau / params_.cs_max_p;
    scale_ce_ = tau / params_.c0;
    i_ref_ = params_.Q_nom / params_.A_cell;
    scale_i_ = 1.0 / i_ref_;
}

DfnModel::CellCtx DfnModel::cell_ctx(int cell) const {
    CellCtx c;
    const bool neg = mesh_.region_of[cell] == 0;
    c.rmesh = neg ? &mesh_.r_neg : &mesh_.r_pos;
    c.ocp = neg ? &params_.ocp_n : &params_.ocp_p;
    c.k = neg ? params_.kn : params_.kp;
    c.cs_max = neg ? params_.cs_max_n : params_.cs_max_p;
    c.Ds = neg ? params_.Dsn : params_.Dsp;
    const double margin = 1e-9 * c.cs_max;
    c.c_lo = std::max(margin, c.ocp->theta_min() * c.cs_max);
    c.c_hi = std::min(c.cs_max - margin, c.ocp->theta_max() * c.cs_max);
    c.hermite = radial_ == RadialMethod::FVM_HERMITE;
    return c;
}

// Scalar solve of j = BV(c_surf(j), eta(c_surf(j))) per electrode cell. With
// the Hermite reconstruction the surface concentration is affine in the flux,
// c_surf = base - beta*j, so the root is bracketed by the admissible
// surface-concentration range and found by safeguarded Newton.
double DfnModel::solve_reaction_flux(const CellCtx& c, std::span<const double> shells, double c_e,
                                     double phi_s, double phi_e) const {
    if (!(c_e > 0.0)) throw SaturationError("electrolyte concentration depleted");
    const int nr = c.rmesh->nr;
    const double coef = 0.5 * phys::F / (phys::R * params_.T);

    auto bv = [&](double c_surf, double& dj_dcsurf) {
        const double theta = c_surf / c.cs_max;
        const double u = c.ocp->eval(theta);
        const double eta = phi_s - phi_e - u;
        const double root = std::sqrt(c_e * c_surf * (c.cs_max - c_surf));
        const double ex = 2.0 * c.k * root;
        const double s = safe_sinh(coef * eta);
        const double j = ex * s;
        const double droot = c_e * (c.cs_max - 2.0 * c_surf) / (2.0 * root);
        const double du = c.ocp->deriv(theta) / c.cs_max;
        dj_dcsurf = 2.0 * c.k * droot * s + ex * safe_cosh(coef * eta) * coef * (-du);
        return j;
    };

    if (!c.hermite) {
        const double c_surf = shells[nr - 1];
        if (!(c_surf > c.c_lo && c_surf < c.c_hi))
            throw SaturationError("particle surface concentration out of range");
        double unused;
        return bv(c_surf, unused);
    }

    const double base = c.rmesh->w_last * shells[nr - 1] + c.rmesh->w_prev * shells[nr - 2];
    const double beta = c.rmesh->w_grad * c.rmesh->dr / c.Ds; // dc_surf/d(-j)
    // flux bracket keeping c_surf = base - beta*j inside (c_lo, c_hi)
    double j_lo = (base - c.c_hi) / beta;
    double j_hi = (base - c.c_lo) / beta;
    if (!(j_lo < j_hi)) throw SaturationError("particle shells out of admissible range");

    auto g = [&](double j, double& dg) {
        double djdc;
        const double v = bv(base - beta * j, djdc);
        dg = 1.0 + beta * djdc;
        return j - v;
    };

    double dg_lo, dg_hi;
    double g_lo = g(j_lo, dg_lo);
    double g_hi = g(j_hi, dg_hi);
    if (g_lo == 0.0) return j_lo;
    if (g_hi == 0.0) return j_hi;
    if (g_lo > 0.0 || g_hi < 0.0) throw SaturationError("no admissible reaction flux");

    double x = 0.0;
    if (!(x > j_lo && x < j_hi)) x = 0.5 * (j_lo + j_hi);
    for (int it = 0; it < 80; ++it) {
        double dg;
        const double gx = g(x, dg);
        if (gx == 0.0) return x;
        if (gx > 0.0) j_hi = x; else j_lo = x;
        double step = (dg != 0.0) ? -gx / dg : 0.0;
        double x_new = x + step;
        if (!(x_new > j_lo && x_new < j_hi)) x_new = 0.5 * (j_lo + j_hi);
        const double dx = x_new - x;
        x = x_new;
        if (std::abs(dx) <= 1e-13 * (std::abs(x) + 1e-300)) return x;
        if (j_hi - j_lo <= 1e-13 * (std::abs(x) + 1e-300)) return x;
    }
    throw SaturationError("reaction flux iteration stalled");
}

void DfnModel::residual(double /*t*/, std::span<const double> y, std::span<const double> yp,
                        double I_app, std::span<double> F) const {
    const StateLayout& L = layout_;
    if (static_cast<int>(y.size()) != L.size || static_cast<int>(yp.size()) != L.size ||
        static_cast<int>(F.size()) != L.size)
        throw AssemblyError("residual: state dimension does not match layout");

    for (int i = 0; i < L.size; ++i) {
        if (!std::isfinite(y[i])) {
            std::ostringstream msg;
            msg << "residual: non-finite state entry in block " << block_name(L.block_of(i))
                << " at index " << i;
            throw AssemblyError(msg.str());
        }
    }

    const int nx = mesh_.nx_total();
    const int nn = L.nx_n, ns = L.nx_s, np = L.nx_p;
    const double i_app = I_app / params_.A_cell; // [A/m^2]
    const double t_plus = params_.t1_constant;
    const double two_rt_f = 2.0 * phys::R * params_.T / phys::F;

    // interfacial fluxes per x cell (0 in separator)
    std::vector<double> jflux(nx, 0.0);
    for (int i = 0; i < nx; ++i) {
        if (mesh_.region_of[i] == 1) continue;
        const CellCtx c = cell_ctx(i);
        std::span<const double> shells =
            mesh_.region_of[i] == 0
                ? y.subspan(L.cs_neg(i, 0), L.nr_n)
                : y.subspan(L.cs_pos(i - nn - ns, 0), L.nr_p);
        jflux[i] = solve_reaction_flux(c, shells, y[L.ce(i)],
                                       mesh_.region_of[i] == 0 ? y[L.phis_neg(i)]
                                                               : y[L.phis_pos(i - nn - ns)],
                                       y[L.phie(i)]);
    }

    // (a) solid diffusion
    {
        std::vector<double> rates(std::max(L.nr_n, L.nr_p));
        for (int i = 0; i < nn; ++i) {
            auto shells = y.subspan(L.cs_neg(i, 0), L.nr_n);
            radial_rates(shells, jflux[i], params_.Dsn, mesh_.r_neg, radial_,
                         std::span<double>(rates.data(), L.nr_n));
            for (int k = 0; k < L.nr_n; ++k)
                F[L.cs_neg(i, k)] = (yp[L.cs_neg(i, k)] - rates[k]) * scale_cs_n_;
        }
        for (int i = 0; i < np; ++i) {
            const int cell = nn + ns + i;
            auto shells = y.subspan(L.cs_pos(i, 0), L.nr_p);
            radial_rates(shells, jflux[cell], params_.Dsp, mesh_.r_pos, radial_,
                         std::span<double>(rates.data(), L.nr_p));
            for (int k = 0; k < L.nr_p; ++k)
                F[L.cs_pos(i, k)] = (yp[L.cs_pos(i, k)] - rates[k]) * scale_cs_p_;
        }
    }

    // (b) electrolyte diffusion, zero-flux walls
    {
        std::vector<double> deff(nx);
        for (int i = 0; i < nx; ++i) {
            const double ce = y[L.ce(i)];
            if (!(ce > 0.0)) throw SaturationError("electrolyte concentration depleted");
            deff[i] = effective_property(params_.De * params_.De_fn(ce), eps_e_[i], params_.brugg);
        }
        std::vector<double> nflux(nx + 1, 0.0); // +x-directed molar flux at faces
        for (int f = 1; f < nx; ++f) {
            const double g = 1.0 / (mesh_.dx[f - 1] / (2.0 * deff[f - 1]) + mesh_.dx[f] / (2.0 * deff[f]));
            nflux[f] = g * (y[L.ce(f - 1)] - y[L.ce(f)]);
        }
        for (int i = 0; i < nx; ++i) {
            const double net_in = (nflux[i] - nflux[i + 1]) / mesh_.dx[i];
            const double src = (1.0 - t_plus) * a_s_[i] * jflux[i];
            F[L.ce(i)] = (eps_e_[i] * yp[L.ce(i)] - net_in - src) * scale_ce_;
        }
    }

    // (c) solid-phase charge conservation per electrode
    {
        auto assemble_electrode = [&](int first_cell, int n, double sigma_eff, double i_left,
                                      double i_right, auto phis_index) {
            std::vector<double> is_face(n + 1);
            is_face[0] = i_left;
            is_face[n] = i_right;
            for (int f = 1; f < n; ++f) {
                const double dx = mesh_.dx[first_cell + f];
                is_face[f] = -sigma_eff * (y[phis_index(f)] - y[phis_index(f - 1)]) / dx;
            }
            for (int i = 0; i < n; ++i) {
                const int cell = first_cell + i;
                const double sink = a_s_[cell] * phys::F * jflux[cell] * mesh_.dx[cell];
                F[phis_index(i)] = (is_face[i + 1] - is_face[i] + sink) * scale_i_;
            }
        };
        assemble_electrode(0, nn, sigma_eff_n_, i_app, 0.0, [&](int i) { return L.phis_neg(i); });
        assemble_electrode(nn + ns, np, sigma_eff_p_, 0.0, i_app,
                           [&](int i) { return L.phis_pos(i); });
    }

    // (d) electrolyte charge conservation with concentration overpotential;
    // the first equation is replaced by the gauge phi_e = 0 at the negative
    // collector cell
    {
        std::vector<double> keff(nx);
        for (int i = 0; i < nx; ++i)
            keff[i] = effective_property(params_.Kappa * params_.Kappa_fn(y[L.ce(i)]), eps_e_[i],
                                         params_.brugg);
        std::vector<double> ie_face(nx + 1, 0.0);
        for (int f = 1; f < nx; ++f) {
            const double g = 1.0 / (mesh_.dx[f - 1] / (2.0 * keff[f - 1]) + mesh_.dx[f] / (2.0 * keff[f]));
            const double dphi = y[L.phie(f)] - y[L.phie(f - 1)];
            const double dlnc = std::log(y[L.ce(f)]) - std::log(y[L.ce(f - 1)]);
            ie_face[f] = -g * dphi + g * two_rt_f * (1.0 - t_plus) * dlnc;
        }
        F[L.phie(0)] = y[L.phie(0)];
        for (int i = 1; i < nx; ++i) {
            const double src = a_s_[i] * phys::F * jflux[i] * mesh_.dx[i];
            F[L.phie(i)] = (ie_face[i + 1] - ie_face[i] - src) * scale_i_;
        }
    }
}

double DfnModel::terminal_voltage(std::span<const double> y, double I_app) const {
    const StateLayout& L = layout_;
    const double i_app = I_app / params_.A_cell;
    const double phi_neg = y[L.phis_neg(0)] + i_app * mesh_.neg.dx / (2.0 * sigma_eff_n_);
    const double phi_pos =
        y[L.phis_pos(L.nx_p - 1)] - i_app * mesh_.pos.dx / (2.0 * sigma_eff_p_);
    return phi_pos - phi_neg;
}

std::pair<double, double> DfnModel::mean_stoichiometry(std::span<const double> y) const {
    const StateLayout& L = layout_;
    double sum_n = 0.0;
    for (int i = 0; i < L.nx_n; ++i)
        sum_n += radial_mean(y.subspan(L.cs_neg(i, 0), L.nr_n), mesh_.r_neg);
    double sum_p = 0.0;
    for (int i = 0; i < L.nx_p; ++i)
        sum_p += radial_mean(y.subspan(L.cs_pos(i, 0), L.nr_p), mesh_.r_pos);
    return {sum_p / (L.nx_p * params_.cs_max_p), sum_n / (L.nx_n * params_.cs_max_n)};
}

std::pair<double, double> DfnModel::electrode_soc(std::span<const double> y) const {
    const double wn = params_.theta100_n - params_.theta0_n;
    const double wp = params_.theta100_p - params_.theta0_p;
    if (wn == 0.0 || wp == 0.0) throw ConfigError("degenerate stoichiometric window");
    const auto [theta_p, theta_n] = mean_stoichiometry(y);
    return {(theta_p - params_.theta0_p) / wp, (theta_n - params_.theta0_n) / wn};
}

void DfnModel::reaction_fluxes(std::span<const double> y, std::vector<double>& j_neg,
                               std::vector<double>& j_pos) const {
    const StateLayout& L = layout_;
    j_neg.resize(L.nx_n);
    j_pos.resize(L.nx_p);
    for (int i = 0; i < L.nx_n; ++i)
        j_neg[i] = solve_reaction_flux(cell_ctx(i), y.subspan(L.cs_neg(i, 0), L.nr_n), y[L.ce(i)],
                                       y[L.phis_neg(i)], y[L.phie(i)]);
    for (int i = 0; i < L.nx_p; ++i) {
        const int cell = L.nx_n + L.nx_s + i;
        j_pos[i] = solve_reaction_flux(cell_ctx(cell), y.subspan(L.cs_pos(i, 0), L.nr_p),
                                       y[L.ce(cell)], y[L.phis_pos(i)], y[L.phie(cell)]);
    }
}

double DfnModel::solid_lithium(std::span<const double> y) const {
    const StateLayout& L = layout_;
    double total = 0.0;
    for (int i = 0; i < L.nx_n; ++i)
        total += params_.eps_s_n * params_.A_cell * mesh_.neg.dx *
                 radial_mean(y.subspan(L.cs_neg(i, 0), L.nr_n), mesh_.r_neg);
    for (int i = 0; i < L.nx_p; ++i)
        total += params_.eps_s_p * params_.A_cell * mesh_.pos.dx *
                 radial_mean(y.subspan(L.cs_pos(i, 0), L.nr_p), mesh_.r_pos);
    return total;
}

double DfnModel::electrolyte_lithium(std::span<const double> y) const {
    const StateLayout& L = layout_;
    double total = 0.0;
    for (int i = 0; i < mesh_.nx_total(); ++i)
        total += params_.A_cell * eps_e_[i] * mesh_.dx[i] * y[L.ce(i)];
    return total;
}

CellState DfnModel::equilibrium_state(double theta_n, double theta_p) const {
    const StateLayout& L = layout_;
    CellState s;
    s.y.assign(L.size, 0.0);
    s.yp.assign(L.size, 0.0);
    s.t = 0.0;
    for (int i = 0; i < L.nx_n; ++i)
        for (int k = 0; k < L.nr_n; ++k) s.y[L.cs_neg(i, k)] = theta_n * params_.cs_max_n;
    for (int i = 0; i < L.nx_p; ++i)
        for (int k = 0; k < L.nr_p; ++k) s.y[L.cs_pos(i, k)] = theta_p * params_.cs_max_p;
    for (int i = 0; i < mesh_.nx_total(); ++i) s.y[L.ce(i)] = params_.c0;
    const double un = params_.ocp_n.eval(theta_n);
    const double up = params_.ocp_p.eval(theta_p);
    for (int i = 0; i < L.nx_n; ++i) s.y[L.phis_neg(i)] = un;
    for (int i = 0; i < L.nx_p; ++i) s.y[L.phis_pos(i)] = up;
    return s;
}

std::vector<std::pair<int, int>> DfnModel::sparsity() const {
    const StateLayout& L = layout_;
    const int nx = mesh_.nx_total();
    const int nn = L.nx_n, ns = L.nx_s, np = L.nx_p;
    std::vector<std::pair<int, int>> pat;
    pat.reserve(static_cast<std::size_t>(L.size) * 8);

    auto add = [&](int r, int c) { pat.emplace_back(r, c); };

    // indices the local interfacial flux depends on, per electrode cell
    auto add_flux_deps = [&](int row, int cell) {
        if (mesh_.region_of[cell] == 0) {
            add(row, L.cs_neg(cell, L.nr_n - 1));
            if (L.nr_n >= 2) add(row, L.cs_neg(cell, L.nr_n - 2));
            add(row, L.phis_neg(cell));
        } else {
            const int e = cell - nn - ns;
            add(row, L.cs_pos(e, L.nr_p - 1));
            if (L.nr_p >= 2) add(row, L.cs_pos(e, L.nr_p - 2));
            add(row, L.phis_pos(e));
        }
        add(row, L.ce(cell));
        add(row, L.phie(cell));
    };

    // solid diffusion rows: tridiagonal in the shell index; the outermost
    // shell also sees the flux couplings
    for (int i = 0; i < nn; ++i) {
        for (int k = 0; k < L.nr_n; ++k) {
            const int row = L.cs_neg(i, k);
            if (k > 0) add(row, L.cs_neg(i, k - 1));
            add(row, row);
            if (k + 1 < L.nr_n) add(row, L.cs_neg(i, k + 1));
            if (k == L.nr_n - 1) add_flux_deps(row, i);
        }
    }
    for (int i = 0; i < np; ++i) {
        for (int k = 0; k < L.nr_p; ++k) {
            const int row = L.cs_pos(i, k);
            if (k > 0) add(row, L.cs_pos(i, k - 1));
            add(row, row);
            if (k + 1 < L.nr_p) add(row, L.cs_pos(i, k + 1));
            if (k == L.nr_p - 1) add_flux_deps(row, nn + ns + i);
        }
    }

    // electrolyte diffusion rows
    for (int i = 0; i < nx; ++i) {
        const int row = L.ce(i);
        if (i > 0) add(row, L.ce(i - 1));
        add(row, row);
        if (i + 1 < nx) add(row, L.ce(i + 1));
        if (mesh_.region_of[i] != 1) add_flux_deps(row, i);
    }

    // solid charge rows
    for (int i = 0; i < nn; ++i) {
        const int row = L.phis_neg(i);
        if (i > 0) add(row, L.phis_neg(i - 1));
        if (i + 1 < nn) add(row, L.phis_neg(i + 1));
        add_flux_deps(row, i);
    }
    for (int i = 0; i < np; ++i) {
        const int row = L.phis_pos(i);
        if (i > 0) add(row, L.phis_pos(i - 1));
        if (i + 1 < np) add(row, L.phis_pos(i + 1));
        add_flux_deps(row, nn + ns + i);
    }

    // electrolyte charge rows (row 0 is the gauge)
    add(L.phie(0), L.phie(0));
    for (int i = 1; i < nx; ++i) {
        const int row = L.phie(i);
        add(row, L.phie(i - 1));
        add(row, row);
        if (i + 1 < nx) add(row, L.phie(i + 1));
        add(row, L.ce(i - 1));
        add(row, L.ce(i));
        if (i + 1 < nx) add(row, L.ce(i + 1));
        if (mesh_.region_of[i] != 1) add_flux_deps(row, i);
    }

    std::sort(pat.begin(), pat.end());
    pat.erase(std::unique(pat.begin(), pat.end()), pat.end());
    return pat;
}

std::vector<double> assemble_residual(const CellState& state, const CellParameters& params,
                                      const Mesh& mesh, RadialMethod radial, double I_app,
                                      double t) {
    DfnModel model(params, mesh, radial);
    std::vector<double> F(model.layout().size);
    model.residual(t, state.y, state.yp, I_app, F);
    return F;
}

} // namespace dfn
