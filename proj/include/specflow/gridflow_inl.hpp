#pragma once

namespace specflow {

template <class F>
void for_each_grid_point(const DeformationAtlas& atlas, ClassRef c, F&& fn, double tol) {
    const AtlasEntry& e = atlas.at(c);
    for_each_integer_point(e.core, [&](const IVec& p) { fn(p, atlas.psi_inverse(c, to_vec(p), tol)); });
}

}  // namespace specflow
