#include "dfnsim/cell.hpp"

#include "dfnsim/constants.hpp"
#include "dfnsim/errors.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace dfn {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("cell parameters: ") + what);
}

using FieldMap = std::map<std::string, double CellParameters::*, std::less<>>;

const FieldMap& field_map() {
    static const FieldMap m = {
        {"L_n", &CellParameters::L_n},
        {"L_s", &CellParameters::L_s},
        {"L_p", &CellParameters::L_p},
        {"R_p_pos", &CellParameters::R_p_pos},
        {"R_p_neg", &CellParameters::R_p_neg},
        {"eps_e_n", &CellParameters::eps_e_n},
        {"eps_e_s", &CellParameters::eps_e_s},
        {"eps_e_p", &CellParameters::eps_e_p},
        {"eps_s_n", &CellParameters::eps_s_n},
        {"eps_s_p", &CellParameters::eps_s_p},
        {"brugg", &CellParameters::brugg},
        {"A_cell", &CellParameters::A_cell},
        {"theta100_p", &CellParameters::theta100_p},
        {"theta100_n", &CellParameters::theta100_n},
        {"theta0_p", &CellParameters::theta0_p},
        {"theta0_n", &CellParameters::theta0_n},
        {"cs_max_p", &CellParameters::cs_max_p},
        {"cs_max_n", &CellParameters::cs_max_n},
        {"c0", &CellParameters::c0},
        {"Dsp", &CellParameters::Dsp},
        {"Dsn", &CellParameters::Dsn},
        {"kp", &CellParameters::kp},
        {"kn", &CellParameters::kn},
        {"t1_constant", &CellParameters::t1_constant},
        {"sigma_n", &CellParameters::sigma_n},
        {"sigma_p", &CellParameters::sigma_p},
        {"De", &CellParameters::De},
        {"Kappa", &CellParameters::Kappa},
        {"Q_nom", &CellParameters::Q_nom},
        {"V_min", &CellParameters::V_min},
        {"V_max", &CellParameters::V_max},
        {"T", &CellParameters::T},
        {"dummy", &CellParameters::dummy},
    };
    return m;
}

} // namespace

void CellParameters::validate() const {
    require(L_n > 0 && L_s > 0 && L_p > 0, "region thicknesses must be positive");
    require(R_p_pos > 0 && R_p_neg > 0, "particle radii must be positive");
    require(A_cell > 0, "plate area must be positive");
    require(eps_e_n > 0 && eps_e_n < 1 && eps_e_s > 0 && eps_e_s < 1 && eps_e_p > 0 && eps_e_p < 1,
            "electrolyte volume fractions must lie in (0,1)");
    require(eps_s_n > 0 && eps_s_n < 1 && eps_s_p > 0 && eps_s_p < 1,
            "active-material volume fractions must lie in (0,1)");
    require(eps_e_n + eps_s_n <= 1.0 + 1e-12, "negative electrode: eps_e + eps_s exceeds 1");
    require(eps_e_p + eps_s_p <= 1.0 + 1e-12, "positive electrode: eps_e + eps_s exceeds 1");
    require(cs_max_p > 0 && cs_max_n > 0, "maximum solid concentrations must be positive");
    require(c0 > 0, "initial electrolyte concentration must be positive");
    require(Dsp > 0 && Dsn > 0, "solid diffusivities must be positive");
    require(kp > 0 && kn > 0, "reaction rate constants must be positive");
    require(sigma_n > 0 && sigma_p > 0, "solid conductivities must be positive");
    require(t1_constant > 0 && t1_constant < 1, "transference number must lie in (0,1)");
    require(De > 0 && Kappa > 0, "electrolyte property multipliers must be positive");
    require(Q_nom > 0, "nominal capacity must be positive");
    require(T > 0, "temperature must be positive");
    require(V_min < V_max, "voltage window must be nonempty");

    require(theta0_n >= 0 && theta0_n < theta100_n && theta100_n <= 1,
            "negative window requires 0 <= theta0_n < theta100_n <= 1");
    require(theta100_p >= 0 && theta100_p < theta0_p && theta0_p <= 1,
            "positive window requires 0 <= theta100_p < theta0_p <= 1");

    require(static_cast<bool>(De_fn) && static_cast<bool>(Kappa_fn),
            "electrolyte property functions must be set");
}

double CellParameters::window_capacity_neg_ah() const {
    return eps_s_n * L_n * A_cell * phys::F * cs_max_n * std::abs(theta100_n - theta0_n) / 3600.0;
}

double CellParameters::window_capacity_pos_ah() const {
    return eps_s_p * L_p * A_cell * phys::F * cs_max_p * std::abs(theta100_p - theta0_p) / 3600.0;
}

CellParameters lg_m50_cell() { return CellParameters{}; }

double& param_by_name(CellParameters& p, std::string_view name) {
    const auto& m = field_map();
    auto it = m.find(name);
    if (it == m.end()) {
        std::ostringstream msg;
        msg << "unknown cell parameter '" << name << "'; valid names:";
        for (const auto& [k, _] : m) msg << ' ' << k;
        throw ConfigError(msg.str());
    }
    return p.*(it->second);
}

double param_by_name(const CellParameters& p, std::string_view name) {
    return param_by_name(const_cast<CellParameters&>(p), name);
}

const std::vector<std::string>& parameter_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : field_map()) v.push_back(k);
        return v;
    }();
    return names;
}

} // namespace dfn
