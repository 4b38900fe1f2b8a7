#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace peal {

// Currency in integer minor units (cents). All cash-flow arithmetic stays in
// this type so that conservation identities hold exactly.
using Amount = std::int64_t;

// Discrete month index on the deal timeline.
using Month = int;

// One amount per month, index 0..horizon.
using Series = std::vector<Amount>;

// Violation of a structural rule. Violations are reported as data.
struct Violation {
    std::string rule;
    std::string location;
    std::string detail;
};

Amount sum(std::span<const Amount> values);

// Sum of the entries strictly after t: the outstanding balance convention.
Series tail_sums(std::span<const Amount> values);

Series add(std::span<const Amount> a, std::span<const Amount> b);
Series subtract(std::span<const Amount> a, std::span<const Amount> b);

// Series resized to n entries, zero padded or truncated.
Series fitted(std::span<const Amount> values, std::size_t n);

// Integer division rounded half away from zero.
Amount rounded_div(__int128 numerator, std::int64_t denominator);

// Rounds a real amount of minor units to the nearest integer amount.
Amount round_amount(double value);

// Mean of integer amounts, rounded half away from zero.
Amount rounded_mean(std::span<const Amount> values);

// Splits total into weights.size() integer parts proportional to the weights,
// using the largest-remainder method. The parts always sum to total exactly.
// Weights must be non-negative with a positive sum; ties go to the lower index.
std::vector<Amount> split_proportional(Amount total, std::span<const double> weights);

}  // namespace peal
