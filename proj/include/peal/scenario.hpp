#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "peal/asset_model.hpp"

namespace peal {

using BigInt = boost::multiprecision::cpp_int;

enum class TemporalClass { Spot, Continuous };
enum class Leg { Capital, Interest, Both };
enum class Polarity { Negative, Positive, Hybrid };

// How an occurrence changes an exposure's cash flows.
enum class Mechanic {
    Gate,            // stops the affected legs from the occurrence month on
    Reactivate,      // return to life after a gate
    RateShift,       // additive annual spread on the interest leg
    RecoveryFactor,  // scales a later recovery payload
    RecoveryDelay,   // postpones a later recovery payload
    Moratorium,      // postpones every installment from the occurrence month
};

// What a gating occurrence pays as a spot recovery when no explicit amount is given.
enum class PayloadRule {
    None,
    OutstandingCapital,  // prepayment-like: the capital not yet repaid
    Recovery,            // collateral recovery; amount comes from the occurrence
};

struct EventKind {
    std::string_view code;
    std::string_view name;
    TemporalClass temporal;
    Leg affects;
    Polarity polarity;
    Mechanic mechanic;
    PayloadRule payload;
};

const std::vector<EventKind>& event_catalog();
// Throws std::invalid_argument for codes outside the catalog.
const EventKind& event_kind(std::string_view code);

// List of events and extreme events per exposure type.
struct TypeEvents {
    std::string_view type;
    std::vector<std::string_view> events;
    std::vector<std::string_view> extreme;
};

const std::vector<TypeEvents>& type_catalog();
const TypeEvents& type_events(std::string_view type);
// Throws unless code belongs to the type's list (or its extreme list when allowed).
void check_event_allowed(std::string_view type, std::string_view code, bool allow_extreme);

struct ExposureRef {
    int k = 1;
    int n = 1;
    auto operator<=>(const ExposureRef&) const = default;
};

struct DatedAmount {
    Month month = 0;
    Amount amount = 0;
    auto operator<=>(const DatedAmount&) const = default;
};

struct EventOccurrence {
    std::string code;
    ExposureRef exposure;
    Month time = 0;                      // first month the event acts on the deal timeline
    std::optional<Month> capital_time;   // leg-specific gating months, default to time
    std::optional<Month> interest_time;
    std::optional<Amount> amount;        // spot payload (recovered value, prepaid amount)
    std::optional<Month> arrival;        // month the payload is received, defaults to time
    double factor = 0.0;                 // annual spread (eu) or recovery multiplier (cd, rr)
    Month delay = 0;                     // months of postponement (tm, tr, ts)
    std::vector<DatedAmount> recovery_costs;

    bool operator==(const EventOccurrence&) const = default;
};

// One sampled world. per_exposure is indexed like Deal::exposures(); each
// list is sorted by time. The Base Scenario has no occurrences at all.
struct Scenario {
    int id = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<EventOccurrence>> per_exposure;
    std::vector<DatedAmount> excessive_costs;

    bool is_base() const;
    bool operator==(const Scenario&) const = default;
};

Scenario base_scenario(const Deal& deal);

// Builds a scenario from a flat list of occurrences, sorting them per exposure.
Scenario make_scenario(const Deal& deal, int id, std::vector<EventOccurrence> occurrences,
                       std::vector<DatedAmount> excessive_costs = {});

struct EventRate {
    std::string code;
    double monthly_hazard = 0.0;
    double recovery_fraction = 0.0;  // de-like: recovered share of the outstanding capital
    Month recovery_lag = 0;          // months from the gate to the recovery
    double cost_fraction = 0.0;      // cost of recovery as a share of the recovered value
    double factor = 0.0;             // eu spread, cd/rr multiplier
    Month delay = 0;                 // tm/tr/ts postponement
};

struct ClusterProfile {
    std::vector<EventRate> events;
    // One-factor Gaussian copula correlation on default times; 0 disables it.
    double default_correlation = 0.0;
};

struct GeneratorConfig {
    std::uint64_t master_seed = 0;
    int scenario_count = 1000;
    bool allow_extreme = false;
    std::map<std::string, ClusterProfile> clusters;
    // Deterministic stress added to every sampled scenario.
    std::vector<DatedAmount> excessive_costs;
};

struct ScenarioSet {
    GeneratorConfig config;
    std::vector<Scenario> scenarios;
};

int kronecker(long long a, long long b);
int heaviside(long long a, long long b);

// Number of scenarios when only whether an event happens matters.
BigInt scenario_count_if(const Deal& deal, int event_count);
// Number of scenarios when the month of the single event matters too.
// Throws if the exposures of a portfolio do not share one duration.
BigInt scenario_count_when(const Deal& deal, int event_count);

// Per-scenario seed derived from the master seed and the scenario id.
std::uint64_t scenario_seed(std::uint64_t master_seed, int id);

Scenario generate_scenario(const Deal& deal, const GeneratorConfig& config, int id);
ScenarioSet generate_scenarios(const Deal& deal, const GeneratorConfig& config);

std::optional<Month> first_event_time(const Scenario& scn, const Deal& deal, ExposureRef e);

// Columnar audit dump: scenario_id,k,n,event,t,payload
std::string scenarios_to_csv(const ScenarioSet& set);

}  // namespace peal
