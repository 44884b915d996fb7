#pragma once

#include "dfnsim/cell.hpp"

#include <span>
#include <vector>

namespace dfn {

// Radial discretization scheme for the solid particles.
enum class RadialMethod {
    FVM_HERMITE, // conservative finite volumes + cubic Hermite surface reconstruction
    FDM,         // finite differences at shell centers, one-sided surface treatment
};

RadialMethod radial_method_from_string(const std::string& s);
const char* to_string(RadialMethod m);

// Uniform shells of a sphere of radius `radius`, plus the precomputed
// surface-reconstruction weights for the Hermite scheme:
//   c_surf = w_last*c[nr-1] + w_prev*c[nr-2] + w_grad * dr * (dc/dr at r=R)
struct RadialMesh {
    int nr = 0;
    double radius = 0.0;
    double dr = 0.0;
    std::vector<double> face_r;      // nr+1 shell boundaries, face_r[0] = 0
    std::vector<double> face_area;   // 4*pi*r^2 at each boundary
    std::vector<double> shell_volume; // nr shell volumes
    double total_volume = 0.0;

    double w_last = 1.0, w_prev = 0.0, w_grad = 0.0;
};

RadialMesh build_radial_mesh(int nr, double radius);

// One through-cell region with uniform control volumes.
struct Region {
    int nx = 0;
    double length = 0.0;
    double dx = 0.0;
};

// Discretization geometry of the whole cell: stacked x control volumes for
// negative electrode / separator / positive electrode plus the particle
// meshes and specific interfacial areas a_s = 3*eps_s/R per electrode.
struct Mesh {
    Region neg, sep, pos;
    RadialMesh r_neg, r_pos;
    double a_s_neg = 0.0, a_s_pos = 0.0; // [1/m]

    std::vector<double> dx;       // width of every x cell, size nx_total
    std::vector<double> x_center; // absolute center coordinate of every x cell
    std::vector<int> region_of;   // 0 = negative, 1 = separator, 2 = positive

    int nx_total() const { return neg.nx + sep.nx + pos.nx; }
};

// Uniform mesh with the given per-region cell counts. All counts must be >= 2.
Mesh build_mesh(int nx_n, int nx_s, int nx_p, int nr_n, int nr_p, const CellParameters& params);

// Bruggeman-corrected effective transport property: value * eps^brugg.
double effective_property(double value, double eps, double brugg);

// Surface concentration of a particle from its shell-average concentrations
// and the outward surface molar flux [mol/(m^2 s)] (dc/dr at r=R equals
// -surface_flux/Ds). FVM_HERMITE evaluates the fitted cubic at r=R; FDM
// returns the outermost node value.
double particle_surface_concentration(std::span<const double> shell_averages, double surface_flux,
                                      double Ds, const RadialMesh& mesh, RadialMethod method);

// Time derivatives of the shell states for spherical diffusion with the given
// outward surface flux. FVM_HERMITE uses the conservative finite-volume form
// (shell averages); FDM the node-centered finite-difference form.
void radial_rates(std::span<const double> shells, double surface_flux, double Ds,
                  const RadialMesh& mesh, RadialMethod method, std::span<double> dcdt);

// Volume-weighted mean concentration of a particle (shell averages for FVM;
// same volume weights are used for FDM nodes).
double radial_mean(std::span<const double> shells, const RadialMesh& mesh);

} // namespace dfn
