#pragma once

#include "dfnsim/layout.hpp"

#include <span>
#include <utility>
#include <vector>

namespace dfn {

// Interfacial molar flux [mol/(m^2 s)] from symmetric Butler-Volmer kinetics,
//   j = 2 k sqrt(c_e c_surf (cs_max - c_surf)) sinh(F eta / (2 R T)).
// Positive j moves lithium out of the particle. Throws SaturationError when
// c_surf leaves (0, cs_max) or c_e <= 0.
double butler_volmer_flux(double c_surf, double c_e, double eta, double k, double cs_max, double T);

// through-cell model with all operating-point inputs explicit; immutable
// after construction, residual evaluation is pure and reentrant
class DfnModel {
public:
    DfnModel(CellParameters params, Mesh mesh, RadialMethod radial);

    const CellParameters& params() const { return params_; }
    const Mesh& mesh() const { return mesh_; }
    const StateLayout& layout() const { return layout_; }
    RadialMethod radial_method() const { return radial_; }

    // F(t, y, y') for applied current I_app [A] (discharge positive). Rows are
    // nondimensionalized so a well-converged state has entries near zero at
    // comparable magnitude across blocks.
    void residual(double t, std::span<const double> y, std::span<const double> yp, double I_app,
                  std::span<double> F) const;

    // Cell voltage: phi_s reconstructed at the positive collector face minus
    // the same at the negative collector face.
    double terminal_voltage(std::span<const double> y, double I_app) const;

    // (SOC_p, SOC_n) from volume-averaged stoichiometries through the windows.
    std::pair<double, double> electrode_soc(std::span<const double> y) const;
    // (theta_bar_p, theta_bar_n)
    std::pair<double, double> mean_stoichiometry(std::span<const double> y) const;

    // Butler-Volmer fluxes per electrode cell for the given state.
    void reaction_fluxes(std::span<const double> y, std::vector<double>& j_neg,
                         std::vector<double>& j_pos) const;

    // Totals in mol, for conservation checks.
    double solid_lithium(std::span<const double> y) const;
    double electrolyte_lithium(std::span<const double> y) const;

    // Rested state at the given uniform stoichiometries: uniform c_e = c0,
    // phi_s at the electrode OCPs, phi_e = 0, yp = 0.
    CellState equilibrium_state(double theta_n, double theta_p) const;

    // Structural nonzeros of dF/dy + alpha dF/dy' as (row, col) pairs.
    std::vector<std::pair<int, int>> sparsity() const;

private:
    struct CellCtx; // per-x-cell electrode context

    double solve_reaction_flux(const CellCtx& c, std::span<const double> shells, double c_e,
                               double phi_s, double phi_e) const;
    CellCtx cell_ctx(int cell) const;

    CellParameters params_;
    Mesh mesh_;
    RadialMethod radial_;
    StateLayout layout_;

    std::vector<double> eps_e_;   // per x cell
    std::vector<double> a_s_;     // per x cell, 0 in separator
    double sigma_eff_n_ = 0.0, sigma_eff_p_ = 0.0;
    double scale_cs_n_ = 0.0, scale_cs_p_ = 0.0, scale_ce_ = 0.0, scale_i_ = 0.0;
    double i_ref_ = 0.0; // 1C current density [A/m^2]
};

// Convenience wrapper matching the per-call contract; builds a model and
// evaluates F once. Prefer a long-lived DfnModel in hot paths.
std::vector<double> assemble_residual(const CellState& state, const CellParameters& params,
                                      const Mesh& mesh, RadialMethod radial, double I_app, double t);

} // namespace dfn
