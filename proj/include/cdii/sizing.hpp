#pragma once

#include <string>
#include <vector>

namespace cdii {

struct SizingInput {
    double n = 1.0;  // sample count
    int d = 2;       // dimension
    int s = 1;       // smoothness index
    double mu = 0.5; // slack
};

/// Network-size prescription and convergence-rate exponent. Logarithms are
/// natural (disclosed in log_base); the depth comes with an unspecified
/// constant, so it is reported as a note rather than a number.
struct SizingOutput {
    double S = 0.0;
    double B = 0.0;
    double rate_exponent = 0.0;
    std::string depth_note;
    std::string log_base = "natural";
    bool vacuous_rate = false; // s <= mu makes the rate exponent nonnegative
};

SizingOutput prescribe(const SizingInput& input);

/// (n, n^rate_exponent) pairs for plotting against measured errors.
std::vector<std::pair<double, double>> rate_curve(const SizingInput& input,
                                                  const std::vector<double>& ns);

} // namespace cdii
