#pragma once

#include "dfnsim/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dfn {

// Field blocks of the state vector, in storage order.
enum class Block { CsNeg, CsPos, Ce, PhisNeg, PhisPos, PhiE };

const char* block_name(Block b);

// Index map of the assembled state vector:
//   [ c_s(neg)  c_s(pos)  c_e  phi_s(neg)  phi_s(pos)  phi_e ]
// Concentrations are differential, potentials algebraic (index-1 structure).
struct StateLayout {
    int nx_n = 0, nx_s = 0, nx_p = 0, nr_n = 0, nr_p = 0;

    int cs_neg_begin = 0, cs_pos_begin = 0, ce_begin = 0;
    int phis_neg_begin = 0, phis_pos_begin = 0, phie_begin = 0;
    int size = 0;

    std::vector<std::uint8_t> differential; // 1 on c_s and c_e entries, else 0

    int nx_total() const { return nx_n + nx_s + nx_p; }
    int n_differential() const { return ce_begin + nx_total() - cs_neg_begin; }

    // cell indices are cell positions within the full x stack for ce/phie,
    // within the electrode for cs/phis
    int cs_neg(int cell, int shell) const { return cs_neg_begin + cell * nr_n + shell; }
    int cs_pos(int cell, int shell) const { return cs_pos_begin + cell * nr_p + shell; }
    int ce(int cell) const { return ce_begin + cell; }
    int phis_neg(int cell) const { return phis_neg_begin + cell; }
    int phis_pos(int cell) const { return phis_pos_begin + cell; }
    int phie(int cell) const { return phie_begin + cell; }

    Block block_of(int index) const;
};

StateLayout make_layout(const Mesh& mesh);

// State snapshot: the assembled vector, its time derivative and the time.
struct CellState {
    std::vector<double> y;
    std::vector<double> yp;
    double t = 0.0;
};

} // namespace dfn
