#pragma once

#include "cdii/grid.hpp"

#include <string>

namespace cdii {

/// Which ground-truth conductivity a dataset is generated from. The three
/// named benchmarks are closed forms; Custom samples a user-supplied grid.
struct ExampleId {
    enum class Kind { FourMode, Discontinuous, DisjointModes, Custom };

    Kind kind = Kind::FourMode;
    GridField custom; // only for Kind::Custom

    std::string name() const;
    static ExampleId from_name(const std::string& name);
    static ExampleId custom_grid(GridField g);
};

/// Ground-truth conductivity at a point, by the literal benchmark formula
/// (no positivity floor; the disjoint-modes example really does return 0
/// inside its second mode).
double eval_conductivity(const ExampleId& id, double x, double y);

} // namespace cdii
