#pragma once

#include "dfnsim/interp.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dfn {

// Open-circuit potential of one electrode as a function of stoichiometry
// theta = cs/cs_max. Backed either by a closed-form expression or by a
// sampled table interpolated with a monotone cubic. Evaluation outside the
// curve's domain is an error, never an extrapolation.
class OCPCurve {
public:
    OCPCurve() = default;

    static OCPCurve from_samples(std::string electrode, std::vector<double> theta,
                                 std::vector<double> voltage);
    static OCPCurve from_function(std::string electrode, std::function<double(double)> u,
                                  double theta_min, double theta_max);

    // potential [V] at stoichiometry theta; throws DomainError outside the domain
    double eval(double theta) const;
    double operator()(double theta) const { return eval(theta); }

    // dU/dtheta [V]; analytic for tables, central difference for closed forms
    double deriv(double theta) const;

    double theta_min() const { return lo_; }
    double theta_max() const { return hi_; }
    bool tabulated() const { return !fn_; }
    const std::string& electrode() const { return electrode_; }

private:
    void check_domain(double theta) const;

    std::string electrode_;
    std::function<double(double)> fn_; // empty when tabulated
    MonotoneCubic table_;
    double lo_ = 0.0, hi_ = 1.0;
};

// Built-in fixture curves for a graphite-SiOx / NMC cell, from published
// half-cell fits. Keys: "graphite", "nmc".
OCPCurve builtin_ocp(const std::string& name, const std::string& electrode);

// Built-in electrolyte property correlations (functions of c_e [mol/m^3]):
//   diffusivity "nyman2008"  [m^2/s]
//   conductivity "nyman2008" [S/m]
std::function<double(double)> builtin_electrolyte_diffusivity(const std::string& name);
std::function<double(double)> builtin_electrolyte_conductivity(const std::string& name);

} // namespace dfn
