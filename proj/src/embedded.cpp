#include "peal/embedded.hpp"

#include <algorithm>
#include <stdexcept>

namespace peal {

Amount excessive_recovery(Amount recovered_value, Amount outstanding_at_default, Amount recovery_costs) {
    return std::max<Amount>(0, recovered_value - outstanding_at_default - recovery_costs);
}

Series super_senior_embedded(std::span<const Amount> excessive_costs, std::span<const Amount> recovery_costs,
                             std::span<const Amount> excess_recovery) {
    const auto partial = add(recovery_costs, excess_recovery);
    return add(excessive_costs, partial);
}

Series sse_mean(std::span<const Series> sse_per_scenario) {
    if (sse_per_scenario.empty()) return {};
    const std::size_t n = sse_per_scenario.front().size();
    Series out(n, 0);
    std::vector<Amount> column(sse_per_scenario.size());
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t s = 0; s < sse_per_scenario.size(); ++s) {
            if (sse_per_scenario[s].size() != n) throw std::invalid_argument("sse_mean: ragged scenario series");
            column[s] = sse_per_scenario[s][t];
        }
        out[t] = rounded_mean(column);
    }
    return out;
}

Series buffer(std::span<const Amount> asset, std::span<const Amount> gross_asset) {
    const auto diff = subtract(asset, gross_asset);
    Series out(diff.size());
    std::transform(diff.begin(), diff.end(), out.begin(), [](Amount v) { return std::max<Amount>(0, v); });
    return out;
}

}  // namespace peal
