#pragma once

#include <string>

#include "specflow/gridflow.hpp"
#include "specflow/toast.hpp"

namespace specflow {

// Class rectangles coloured by level. d = 1 draws one strip per level; d = 3
// draws the projection to the first two axes.
std::string svg_toast(const ToastHierarchy& h, std::size_t max_classes = 20000);

// Before and after panels for one class: dots are the integer points of
// phi_n(C'), crosses are the grids of its children, first at phi_n and then
// at psi_n, where they land on the dots.
std::string svg_grid_class(const DeformationAtlas& atlas, ClassRef c, std::size_t max_points = 6000);

}  // namespace specflow
