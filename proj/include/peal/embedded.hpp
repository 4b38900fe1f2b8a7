#pragma once

#include <span>

#include "peal/money.hpp"

namespace peal {

// Recovered value in excess of the outstanding capital at default and the
// recovery costs paid up to the recovery month.
Amount excessive_recovery(Amount recovered_value, Amount outstanding_at_default, Amount recovery_costs);

// SSE(t) = EC(t) + sum over exposures of CR(t) + ER(t).
Series super_senior_embedded(std::span<const Amount> excessive_costs, std::span<const Amount> recovery_costs,
                             std::span<const Amount> excess_recovery);

// Month-wise rounded mean over scenarios. All series must share one length.
Series sse_mean(std::span<const Series> sse_per_scenario);

// B(t) = max(0, A(t) - GA(t)).
Series buffer(std::span<const Amount> asset, std::span<const Amount> gross_asset);

}  // namespace peal
