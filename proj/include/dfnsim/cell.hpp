#pragma once

#include "dfnsim/ocp.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dfn {

// Full parameter set of one cell. Geometry, stoichiometric windows, transport
// and kinetic constants, electrolyte property curves and the operating
// envelope. Immutable by convention once a simulation has been built from it.
struct CellParameters {
    // region thicknesses [m]
    double L_n = 85.2e-6;
    double L_s = 12.0e-6;
    double L_p = 75.6e-6;

    // particle radii [m]
    double R_p_pos = 5.22e-6;
    double R_p_neg = 5.86e-6;

    // electrolyte volume fractions [-]
    double eps_e_n = 0.25;
    double eps_e_s = 0.47;
    double eps_e_p = 0.335;

    // active-material volume fractions [-]
    double eps_s_n = 0.75;
    double eps_s_p = 0.665;

    double brugg = 1.5;    // Bruggeman exponent [-]
    double A_cell = 0.1027; // electrode plate area [m^2]

    // stoichiometric window endpoints [-]
    // (negative electrode fills on charge, positive empties)
    double theta100_p = 0.27;
    double theta100_n = 0.888;
    double theta0_p = 0.8426;
    double theta0_n = 0.03;

    // maximum solid concentrations [mol/m^3]
    double cs_max_p = 63104.0;
    double cs_max_n = 33133.0;

    double c0 = 1000.0; // initial electrolyte concentration [mol/m^3]

    // solid diffusivities [m^2/s]
    double Dsp = 4.0e-15;
    double Dsn = 3.3e-14;

    // reaction rate constants [m^2.5 mol^-0.5 s^-1]
    double kp = 3.545e-11;
    double kn = 6.7159e-12;

    double t1_constant = 0.2594; // transference number t+ [-]

    // solid conductivities [S/m]
    double sigma_n = 215.0;
    double sigma_p = 0.18;

    // nominal electrolyte property curves of c_e, and the dimensionless
    // multipliers applied to them ("De", "Kappa" in identification runs)
    std::function<double(double)> De_fn = builtin_electrolyte_diffusivity("nyman2008");
    std::function<double(double)> Kappa_fn = builtin_electrolyte_conductivity("nyman2008");
    double De = 1.0;
    double Kappa = 1.0;

    double Q_nom = 5.0;  // nominal capacity [Ah]
    double V_min = 2.5;  // lower voltage cutoff [V]
    double V_max = 4.2;  // upper voltage cutoff [V]
    double T = 298.15;   // temperature [K], isothermal

    // Not referenced by any model equation. Exists so sensitivity tooling can
    // be pointed at a parameter with provably zero influence.
    double dummy = 1.0;

    OCPCurve ocp_n = builtin_ocp("graphite", "negative electrode");
    OCPCurve ocp_p = builtin_ocp("nmc", "positive electrode");

    // Throws ConfigError when an invariant is violated.
    void validate() const;

    // Ah between the 0% and 100% stoichiometry endpoints of one electrode:
    // eps_s * L * A * F * cs_max * |theta100 - theta0| / 3600.
    double window_capacity_neg_ah() const;
    double window_capacity_pos_ah() const;
};

// Fixture parameter set for a 21700-format graphite-SiOx/NMC811 cell with
// the stoichiometric windows balanced so both electrodes span Q_nom.
CellParameters lg_m50_cell();

// Mutable access to a scalar field by its canonical name ("Dsp", "theta0_n",
// "De", ...). Unknown names throw ConfigError listing the valid ones.
double& param_by_name(CellParameters& p, std::string_view name);
double param_by_name(const CellParameters& p, std::string_view name);

// Names accepted by param_by_name, in a stable order.
const std::vector<std::string>& parameter_names();

} // namespace dfn
