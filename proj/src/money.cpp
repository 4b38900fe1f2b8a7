#include "peal/money.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace peal {

Amount sum(std::span<const Amount> values) {
    return std::accumulate(values.begin(), values.end(), Amount{0});
}

Series tail_sums(std::span<const Amount> values) {
    Series out(values.size(), 0);
    Amount running = 0;
    for (std::size_t i = values.size(); i-- > 0;) {
        out[i] = running;
        running += values[i];
    }
    return out;
}

Series add(std::span<const Amount> a, std::span<const Amount> b) {
    Series out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Series subtract(std::span<const Amount> a, std::span<const Amount> b) {
    Series out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    return out;
}

Series fitted(std::span<const Amount> values, std::size_t n) {
    Series out(n, 0);
    std::copy_n(values.begin(), std::min(n, values.size()), out.begin());
    return out;
}

Amount rounded_div(__int128 numerator, std::int64_t denominator) {
    if (denominator == 0) throw std::domain_error("rounded_div: zero denominator");
    if (denominator < 0) {
        numerator = -numerator;
        denominator = -denominator;
    }
    const bool negative = numerator < 0;
    __int128 magnitude = negative ? -numerator : numerator;
    // halves can only occur for even denominators and round up in magnitude
    const __int128 q = (magnitude + denominator / 2) / denominator;
    return static_cast<Amount>(negative ? -q : q);
}

Amount round_amount(double value) {
    return static_cast<Amount>(std::llround(value));
}

Amount rounded_mean(std::span<const Amount> values) {
    if (values.empty()) return 0;
    __int128 total = 0;
    for (Amount v : values) total += v;
    return rounded_div(total, static_cast<std::int64_t>(values.size()));
}

std::vector<Amount> split_proportional(Amount total, std::span<const double> weights) {
    std::vector<Amount> parts(weights.size(), 0);
    if (weights.empty()) {
        if (total != 0) throw std::invalid_argument("split_proportional: no weights for a non-zero total");
        return parts;
    }
    double weight_sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("split_proportional: negative weight");
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) {
        if (total != 0) throw std::invalid_argument("split_proportional: weights sum to zero");
        return parts;
    }
    const bool negative = total < 0;
    const Amount magnitude = negative ? -total : total;

    std::vector<double> remainders(weights.size());
    Amount assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const long double exact = static_cast<long double>(magnitude) * weights[i] / weight_sum;
        const long double floor_part = std::floor(exact);
        parts[i] = static_cast<Amount>(floor_part);
        remainders[i] = static_cast<double>(exact - floor_part);
        assigned += parts[i];
    }
    Amount leftover = magnitude - assigned;
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t k = 0; leftover > 0; k = (k + 1) % order.size()) {
        if (weights[order[k]] > 0.0) {
            ++parts[order[k]];
            --leftover;
        }
    }
    // floating error can overshoot by a unit on huge totals
    for (std::size_t k = order.size(); leftover < 0 && k-- > 0;) {
        if (parts[order[k]] > 0) {
            --parts[order[k]];
            ++leftover;
        }
    }
    if (negative)
        for (auto& p : parts) p = -p;
    return parts;
}

}  // namespace peal
