#include "dfnsim/layout.hpp"

namespace dfn {

const char* block_name(Block b) {
    switch (b) {
        case Block::CsNeg: return "c_s(neg)";
        case Block::CsPos: return "c_s(pos)";
        case Block::Ce: return "c_e";
        case Block::PhisNeg: return "phi_s(neg)";
        case Block::PhisPos: return "phi_s(pos)";
        case Block::PhiE: return "phi_e";
    }
    return "?";
}

Block StateLayout::block_of(int index) const {
    if (index < cs_pos_begin) return Block::CsNeg;
    if (index < ce_begin) return Block::CsPos;
    if (index < phis_neg_begin) return Block::Ce;
    if (index < phis_pos_begin) return Block::PhisNeg;
    if (index < phie_begin) return Block::PhisPos;
    return Block::PhiE;
}

StateLayout make_layout(const Mesh& mesh) {
    StateLayout l;
    l.nx_n = mesh.neg.nx;
    l.nx_s = mesh.sep.nx;
    l.nx_p = mesh.pos.nx;
    l.nr_n = mesh.r_neg.nr;
    l.nr_p = mesh.r_pos.nr;

    l.cs_neg_begin = 0;
    l.cs_pos_begin = l.cs_neg_begin + l.nx_n * l.nr_n;
    l.ce_begin = l.cs_pos_begin + l.nx_p * l.nr_p;
    l.phis_neg_begin = l.ce_begin + l.nx_total();
    l.phis_pos_begin = l.phis_neg_begin + l.nx_n;
    l.phie_begin = l.phis_pos_begin + l.nx_p;
    l.size = l.phie_begin + l.nx_total();

    l.differential.assign(l.size, 0);
    for (int i = 0; i < l.phis_neg_begin; ++i) l.differential[i] = 1;
    return l;
}

} // namespace dfn
