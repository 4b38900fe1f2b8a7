#pragma once

#include <optional>
#include <string>
#include <vector>

#include "peal/asset_model.hpp"
#include "peal/scenario.hpp"

namespace peal {

// Cash flows of one exposure in one scenario, indexed 0..T.
struct ExposureFlows {
    Series base;             // R^(b)
    Series realized;         // R^(s)
    Series recovery;         // spot payloads p + d
    Series recovery_costs;   // CR
    Series excess_recovery;  // ER
    std::optional<Month> first_event;
};

// Applies the occurrences of one exposure. Throws when a return to life
// precedes the gate it would reactivate.
ExposureFlows exposure_flows(const Deal& deal, const Exposure& e, const std::vector<EventOccurrence>& occurrences);

// R^(s) of exposure (k,n).
Series scenario_installment(const Deal& deal, const Exposure& e, const Scenario& scn);

Series gross_asset(const Deal& deal);

// All basic blocks of one scenario plus the embedded series derived from them.
struct ScenarioBlocks {
    Series ga;
    Series a;
    Series l;
    Series e;
    Series ec;
    Series cr;
    Series er;
    Series sse;
    Series buffer;
};

ScenarioBlocks scenario_blocks(const Deal& deal, const Scenario& scn);

Series asset_block(const Deal& deal, const Scenario& scn);
Series loss_block(const Deal& deal, const Scenario& scn);
Amount cumulative_loss(const Deal& deal, const Scenario& scn);
Series event_recovery(const Deal& deal, const Scenario& scn);

// L(t) as the base installments times the count of gating events already
// started. Equals loss_block when each exposure has at most one gate.
Series loss_block_mece(const Deal& deal, const Scenario& scn);

// Audit dump: t,GA,A,L,E,SSE,B
std::string blocks_to_csv(const ScenarioBlocks& blocks);

}  // namespace peal
