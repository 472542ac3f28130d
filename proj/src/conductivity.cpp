#include "cdii/conductivity.hpp"

#include <cmath>

namespace cdii {

std::string ExampleId::name() const {
    switch (kind) {
    case Kind::FourMode:
        return "four_mode";
    case Kind::Discontinuous:
        return "discontinuous";
    case Kind::DisjointModes:
        return "disjoint_modes";
    case Kind::Custom:
        return "custom";
    }
    return "?";
}

ExampleId ExampleId::from_name(const std::string& name) {
    ExampleId id;
    if (name == "four_mode") {
        id.kind = Kind::FourMode;
    } else if (name == "discontinuous") {
        id.kind = Kind::Discontinuous;
    } else if (name == "disjoint_modes") {
        id.kind = Kind::DisjointModes;
    } else if (name == "custom") {
        id.kind = Kind::Custom;
    } else {
        throw ConfigError("unknown example \"" + name +
                          "\"; expected four_mode, discontinuous, disjoint_modes or custom");
    }
    return id;
}

ExampleId ExampleId::custom_grid(GridField g) {
    ExampleId id;
    id.kind = Kind::Custom;
    id.custom = std::move(g);
    return id;
}

namespace {

// Four superposed modes riding on a unit background.
double four_mode(double x, double y) {
    const double s = 2.0 * x - 1.0;
    const double t = 2.0 * y - 1.0;
    const double a = 0.3 * (1.0 - 3.0 * s) * (1.0 - 3.0 * s) * std::exp(-9.0 * s * s - (6.0 * y - 2.0) * (6.0 * y - 2.0));
    const double b = (3.0 * s / 5.0 - 27.0 * s * s * s - std::pow(3.0 * t, 5)) * std::exp(-(9.0 * s * s + 9.0 * t * t));
    const double c = std::exp(-(3.0 * s + 1.0) * (3.0 * s + 1.0) - 9.0 * t * t);
    return 1.0 + 0.3 * (a - b - c);
}

// Gaussian bump switched on only in the right half plane.
double discontinuous(double x, double y) {
    if (x <= 0.5) {
        return 1.0;
    }
    const double dx = x - 0.5;
    const double dy = y - 0.5;
    return 1.0 + std::exp(-2.0 * (dx * dx + dy * dy));
}

// A tilted ellipse raising the conductivity and a disk cancelling it.
double disjoint_modes(double x, double y) {
    const double ex = x - 0.3;
    const double ey = y - 0.7;
    const bool in_ellipse = 100.0 * ex * ex + 36.0 * ey * ey - 72.0 * ex * ey < 1.0;
    const double dx = x - 0.6;
    const double dy = y - 0.4;
    const bool in_disk = 36.0 * dx * dx + 36.0 * dy * dy < 1.0;
    return 1.0 + (in_ellipse ? 1.0 : 0.0) - (in_disk ? 1.0 : 0.0);
}

} // namespace

double eval_conductivity(const ExampleId& id, double x, double y) {
    switch (id.kind) {
    case ExampleId::Kind::FourMode:
        return four_mode(x, y);
    case ExampleId::Kind::Discontinuous:
        return discontinuous(x, y);
    case ExampleId::Kind::DisjointModes:
        return disjoint_modes(x, y);
    case ExampleId::Kind::Custom:
        return interpolate(id.custom, x, y);
    }
    throw ConfigError("invalid example id");
}

} // namespace cdii
