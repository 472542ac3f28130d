#include "cdii/sizing.hpp"

#include "cdii/common.hpp"

#include <cmath>

namespace cdii {

SizingOutput prescribe(const SizingInput& input) {
    if (!(input.n >= 1.0)) {
        throw ConfigError("sizing: n must be >= 1");
    }
    if (input.d < 1 || input.s < 1) {
        throw ConfigError("sizing: d and s must be >= 1");
    }
    if (!(input.mu > 0.0)) {
        throw ConfigError("sizing: mu must be > 0");
    }

    const double d = input.d;
    const double s = input.s;
    const double log3 = std::pow(std::log(d + s + 1.0), 3);
    const double common = (4.0 * d + s + 1.0) * log3;

    SizingOutput out;
    out.S = std::pow(input.n, 1.0 / (6.0 * common));
    out.B = std::pow(input.n, (s + 7.0 * d) / (3.0 * d * common));
    out.rate_exponent = -(s - input.mu) / (7.0 * d * common);
    out.depth_note = "depth D = C(d, s, mu, U) with an unspecified constant C";
    out.vacuous_rate = s <= input.mu;
    return out;
}

std::vector<std::pair<double, double>> rate_curve(const SizingInput& input,
                                                  const std::vector<double>& ns) {
    const SizingOutput base = prescribe(SizingInput{std::max(input.n, 1.0), input.d, input.s, input.mu});
    std::vector<std::pair<double, double>> table;
    table.reserve(ns.size());
    for (const double n : ns) {
        table.emplace_back(n, std::pow(n, base.rate_exponent));
    }
    return table;
}

} // namespace cdii
