#include "dfnsim/ocp.hpp"

#include "dfnsim/errors.hpp"

#include <cmath>
#include <sstream>

namespace dfn {

OCPCurve OCPCurve::from_samples(std::string electrode, std::vector<double> theta,
                                std::vector<double> voltage) {
    OCPCurve c;
    c.electrode_ = std::move(electrode);
    c.table_ = MonotoneCubic(std::move(theta), std::move(voltage));
    c.lo_ = c.table_.x_min();
    c.hi_ = c.table_.x_max();
    return c;
}

OCPCurve OCPCurve::from_function(std::string electrode, std::function<double(double)> u,
                                 double theta_min, double theta_max) {
    if (!(theta_min < theta_max)) throw ConfigError("OCPCurve: empty domain");
    OCPCurve c;
    c.electrode_ = std::move(electrode);
    c.fn_ = std::move(u);
    c.lo_ = theta_min;
    c.hi_ = theta_max;
    return c;
}

void OCPCurve::check_domain(double theta) const {
    if (!(theta >= lo_ && theta <= hi_)) {
        std::ostringstream msg;
        msg << "open-circuit potential of " << (electrode_.empty() ? "electrode" : electrode_)
            << ": theta " << theta << " outside [" << lo_ << ", " << hi_ << "]";
        throw DomainError(msg.str());
    }
}

double OCPCurve::eval(double theta) const {
    check_domain(theta);
    return fn_ ? fn_(theta) : table_.eval(theta);
}

double OCPCurve::deriv(double theta) const {
    check_domain(theta);
    if (!fn_) return table_.deriv(theta);
    const double h = 1e-6 * (hi_ - lo_);
    const double a = std::max(lo_, theta - h);
    const double b = std::min(hi_, theta + h);
    return (fn_(b) - fn_(a)) / (b - a);
}

namespace {

// Half-cell fits for a commercial graphite-SiOx negative electrode and an
// NMC811 positive electrode (Chen et al. 2020 parameterization family).
double graphite_u(double theta) {
    return 1.9793 * std::exp(-39.3631 * theta) + 0.2482 -
           0.0909 * std::tanh(29.8538 * (theta - 0.1234)) -
           0.04478 * std::tanh(14.9159 * (theta - 0.2769)) -
           0.0205 * std::tanh(30.4444 * (theta - 0.6103));
}

double nmc_u(double theta) {
    return -0.8090 * theta + 4.4875 - 0.0428 * std::tanh(18.5138 * (theta - 0.5542)) -
           17.7326 * std::tanh(15.7890 * (theta - 0.3117)) +
           17.5842 * std::tanh(15.9308 * (theta - 0.3120));
}

} // namespace

OCPCurve builtin_ocp(const std::string& name, const std::string& electrode) {
    if (name == "graphite") return OCPCurve::from_function(electrode, graphite_u, 0.0, 1.0);
    if (name == "nmc") return OCPCurve::from_function(electrode, nmc_u, 0.0, 1.0);
    throw ConfigError("unknown built-in OCP curve '" + name + "' (have: graphite, nmc)");
}

std::function<double(double)> builtin_electrolyte_diffusivity(const std::string& name) {
    if (name == "nyman2008") {
        return [](double ce) {
            const double c = ce / 1000.0; // correlation fitted in kmol/m^3
            return (8.794e-11 * c * c - 3.972e-10 * c + 4.862e-10);
        };
    }
    throw ConfigError("unknown built-in electrolyte diffusivity '" + name + "'");
}

std::function<double(double)> builtin_electrolyte_conductivity(const std::string& name) {
    if (name == "nyman2008") {
        return [](double ce) {
            const double c = ce / 1000.0;
            return 0.1297 * c * c * c - 2.51 * std::pow(c, 1.5) + 3.329 * c;
        };
    }
    throw ConfigError("unknown built-in electrolyte conductivity '" + name + "'");
}

} // namespace dfn
