#include "dfnsim/mesh.hpp"

#include "dfnsim/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace dfn {

RadialMethod radial_method_from_string(const std::string& s) {
    if (s == "fvm_hermite") return RadialMethod::FVM_HERMITE;
    if (s == "fdm") return RadialMethod::FDM;
    throw ConfigError("unknown radial_method '" + s + "' (have: fvm_hermite, fdm)");
}

const char* to_string(RadialMethod m) {
    return m == RadialMethod::FVM_HERMITE ? "fvm_hermite" : "fdm";
}

namespace {

// Volume-average of the monomial rho^m over [rho_a, rho_b] where the physical
// radius is r = R + dr*rho and the weight is r^2.
double monomial_volume_average(int m, double rho_a, double rho_b, double R, double dr) {
    auto ipow = [&](int k) { return (std::pow(rho_b, k + 1) - std::pow(rho_a, k + 1)) / (k + 1); };
    auto weighted = [&](int k) {
        return R * R * ipow(k) + 2.0 * R * dr * ipow(k + 1) + dr * dr * ipow(k + 2);
    };
    return weighted(m) / weighted(0);
}

// Fit weights for the cubic surface reconstruction on the two outermost
// shells: volume averages of both shells, the surface gradient, and gradient
// continuity with the two-point face gradient at the shared inner face.
void fit_hermite_weights(RadialMesh& mesh) {
    const double R = mesh.radius, dr = mesh.dr;
    Eigen::Matrix4d M;
    for (int m = 0; m < 4; ++m) {
        M(0, m) = monomial_volume_average(m, -1.0, 0.0, R, dr);
        M(1, m) = monomial_volume_average(m, -2.0, -1.0, R, dr);
    }
    M.row(2) << 0, 1, 0, 0;  // dp/drho at rho = 0
    M.row(3) << 0, 1, -2, 3; // dp/drho at rho = -1
    const Eigen::Matrix4d Minv = M.inverse();
    // c_surf = p(0) = a0; rhs = (c_last, c_prev, g, c_last - c_prev)
    mesh.w_last = Minv(0, 0) + Minv(0, 3);
    mesh.w_prev = Minv(0, 1) - Minv(0, 3);
    mesh.w_grad = Minv(0, 2);
}

} // namespace

RadialMesh build_radial_mesh(int nr, double radius) {
    if (nr < 2) throw ConfigError("radial mesh needs at least 2 shells");
    if (!(radius > 0)) throw ConfigError("particle radius must be positive");
    RadialMesh m;
    m.nr = nr;
    m.radius = radius;
    m.dr = radius / nr;
    m.face_r.resize(nr + 1);
    m.face_area.resize(nr + 1);
    m.shell_volume.resize(nr);
    constexpr double four_pi = 4.0 * std::numbers::pi;
    for (int k = 0; k <= nr; ++k) {
        m.face_r[k] = radius * k / nr;
        m.face_area[k] = four_pi * m.face_r[k] * m.face_r[k];
    }
    for (int k = 0; k < nr; ++k) {
        const double r0 = m.face_r[k], r1 = m.face_r[k + 1];
        m.shell_volume[k] = four_pi / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0);
    }
    m.total_volume = four_pi / 3.0 * radius * radius * radius;
    fit_hermite_weights(m);
    return m;
}

Mesh build_mesh(int nx_n, int nx_s, int nx_p, int nr_n, int nr_p, const CellParameters& params) {
    if (nx_n < 2 || nx_s < 2 || nx_p < 2 || nr_n < 2 || nr_p < 2)
        throw ConfigError("mesh: all node counts must be >= 2");
    params.validate();

    Mesh m;
    m.neg = {nx_n, params.L_n, params.L_n / nx_n};
    m.sep = {nx_s, params.L_s, params.L_s / nx_s};
    m.pos = {nx_p, params.L_p, params.L_p / nx_p};
    m.r_neg = build_radial_mesh(nr_n, params.R_p_neg);
    m.r_pos = build_radial_mesh(nr_p, params.R_p_pos);
    m.a_s_neg = 3.0 * params.eps_s_n / params.R_p_neg;
    m.a_s_pos = 3.0 * params.eps_s_p / params.R_p_pos;

    double x = 0.0;
    for (const auto& [region, id] : {std::pair{&m.neg, 0}, {&m.sep, 1}, {&m.pos, 2}}) {
        for (int i = 0; i < region->nx; ++i) {
            m.dx.push_back(region->dx);
            m.x_center.push_back(x + (i + 0.5) * region->dx);
            m.region_of.push_back(id);
        }
        x += region->length;
    }
    return m;
}

double effective_property(double value, double eps, double brugg) {
    if (!(eps > 0)) throw DomainError("effective_property: volume fraction must be positive");
    return value * std::pow(eps, brugg);
}

double particle_surface_concentration(std::span<const double> shell_averages, double surface_flux,
                                      double Ds, const RadialMesh& mesh, RadialMethod method) {
    if (static_cast<int>(shell_averages.size()) != mesh.nr)
        throw ConfigError("surface concentration: shell count does not match mesh");
    if (!(Ds > 0)) throw DomainError("surface concentration: Ds must be positive");
    if (method == RadialMethod::FDM) return shell_averages.back();
    if (mesh.nr < 2) throw ConfigError("Hermite surface reconstruction needs at least 2 shells");
    const double grad_R = -surface_flux / Ds;
    return mesh.w_last * shell_averages[mesh.nr - 1] + mesh.w_prev * shell_averages[mesh.nr - 2] +
           mesh.w_grad * mesh.dr * grad_R;
}

void radial_rates(std::span<const double> shells, double surface_flux, double Ds,
                  const RadialMesh& mesh, RadialMethod method, std::span<double> dcdt) {
    const int nr = mesh.nr;
    if (static_cast<int>(shells.size()) != nr || static_cast<int>(dcdt.size()) != nr)
        throw ConfigError("radial_rates: shell count does not match mesh");

    if (method == RadialMethod::FVM_HERMITE) {
        // outward diffusive flux at interior faces; zero at the center,
        // prescribed at the surface
        double flux_in = 0.0; // A_k * N_k at the inner face of shell k
        for (int k = 0; k < nr; ++k) {
            double flux_out;
            if (k == nr - 1) {
                flux_out = mesh.face_area[nr] * surface_flux;
            } else {
                const double n_face = -Ds * (shells[k + 1] - shells[k]) / mesh.dr;
                flux_out = mesh.face_area[k + 1] * n_face;
            }
            dcdt[k] = (flux_in - flux_out) / mesh.shell_volume[k];
            flux_in = flux_out;
        }
        return;
    }

    // FDM: nodes at shell centers r_k = (k + 1/2) dr, ghost nodes mirror the
    // center symmetry and carry the surface gradient.
    const double dr = mesh.dr;
    for (int k = 0; k < nr; ++k) {
        const double rk = (k + 0.5) * dr;
        const double r_in = mesh.face_r[k];
        const double r_out = mesh.face_r[k + 1];
        const double c_in = (k == 0) ? shells[0] : shells[k - 1];
        const double c_out = (k == nr - 1) ? shells[nr - 1] - surface_flux * dr / Ds : shells[k + 1];
        const double lap = (r_out * r_out * (c_out - shells[k]) - r_in * r_in * (shells[k] - c_in)) /
                           (rk * rk * dr * dr);
        dcdt[k] = Ds * lap;
    }
}

double radial_mean(std::span<const double> shells, const RadialMesh& mesh) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < mesh.nr; ++k) {
        num += mesh.shell_volume[k] * shells[k];
        den += mesh.shell_volume[k];
    }
    return num / den;
}

} // namespace dfn
