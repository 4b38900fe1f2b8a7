#include "peal/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

const std::vector<EventKind>& event_catalog() {
    using enum TemporalClass;
    static const std::vector<EventKind> catalog = {
        {"pe", "prepayment", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::OutstandingCapital},
        {"de", "default", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::Recovery},
        {"dh", "death", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::Recovery},
        {"npd", "not paid", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::None},
        {"jl", "job loss", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::None},
        {"cd", "collateral depreciation", Spot, Leg::Capital, Polarity::Negative, Mechanic::RecoveryFactor, PayloadRule::None},
        {"eu", "euribor", Continuous, Leg::Interest, Polarity::Hybrid, Mechanic::RateShift, PayloadRule::None},
        {"fr", "fraud", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::None},
        {"imp", "impairment", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::Recovery},
        {"rr", "recovery rate", Spot, Leg::Capital, Polarity::Hybrid, Mechanic::RecoveryFactor, PayloadRule::None},
        {"sp", "selling price", Continuous, Leg::Both, Polarity::Hybrid, Mechanic::Gate, PayloadRule::OutstandingCapital},
        {"tm", "moratorium", Continuous, Leg::Both, Polarity::Negative, Mechanic::Moratorium, PayloadRule::None},
        {"trl", "return to life", Continuous, Leg::Both, Polarity::Positive, Mechanic::Reactivate, PayloadRule::None},
        {"tr", "recovery time", Spot, Leg::Both, Polarity::Hybrid, Mechanic::RecoveryDelay, PayloadRule::None},
        {"ts", "selling time", Spot, Leg::Both, Polarity::Hybrid, Mechanic::RecoveryDelay, PayloadRule::None},
        {"nr", "not rented", Continuous, Leg::Interest, Polarity::Hybrid, Mechanic::Gate, PayloadRule::None},
        {"oi", "over-indebtedness", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::None},
        {"en", "extreme natures", Continuous, Leg::Both, Polarity::Negative, Mechanic::Gate, PayloadRule::Recovery},
    };
    return catalog;
}

const EventKind& event_kind(std::string_view code) {
    for (const auto& kind : event_catalog())
        if (kind.code == code) return kind;
    throw std::invalid_argument(fmt::format("unknown event code '{}'", code));
}

const std::vector<TypeEvents>& type_catalog() {
    static const std::vector<TypeEvents> catalog = {
        {"QP", {"pe", "dh"}, {"tm", "oi"}},
        {"QS", {"pe", "dh", "npd", "jl"}, {"tm", "oi"}},
        {"CL", {"pe", "de", "eu", "trl"}, {"tm"}},
        {"EA", {"imp", "fr", "ts", "sp"}, {"en"}},
        {"NE", {"fr", "trl", "rr", "tr"}, {"tm"}},
        {"EE", {"npd", "fr", "ts", "sp"}, {"tm", "en"}},
        {"CC", {"de", "fr", "eu", "trl"}, {"tm", "oi"}},
        {"SL", {"pe", "de", "dh", "eu", "trl"}, {"tm"}},
        {"ML", {"pe", "de", "cd", "eu", "trl"}, {"tm"}},
        {"AL", {"pe", "de", "cd", "eu", "trl"}, {"tm"}},
        {"RE", {"npd", "fr", "cd", "ts", "sp", "nr"}, {"tm", "en"}},
    };
    return catalog;
}

const TypeEvents& type_events(std::string_view type) {
    for (const auto& t : type_catalog())
        if (t.type == type) return t;
    throw std::invalid_argument(fmt::format("unknown exposure type '{}'", type));
}

void check_event_allowed(std::string_view type, std::string_view code, bool allow_extreme) {
    event_kind(code);
    const auto& t = type_events(type);
    if (std::find(t.events.begin(), t.events.end(), code) != t.events.end()) return;
    if (std::find(t.extreme.begin(), t.extreme.end(), code) != t.extreme.end()) {
        if (allow_extreme) return;
        throw std::invalid_argument(
            fmt::format("event '{}' is extreme for type {} and needs allow_extreme", code, type));
    }
    throw std::invalid_argument(fmt::format("event '{}' is not in the list of events of type {}", code, type));
}

bool Scenario::is_base() const {
    if (!excessive_costs.empty()) return false;
    return std::all_of(per_exposure.begin(), per_exposure.end(), [](const auto& v) { return v.empty(); });
}

Scenario base_scenario(const Deal& deal) {
    Scenario s;
    s.per_exposure.resize(deal.exposures().size());
    return s;
}

Scenario make_scenario(const Deal& deal, int id, std::vector<EventOccurrence> occurrences,
                       std::vector<DatedAmount> excessive_costs) {
    Scenario s = base_scenario(deal);
    s.id = id;
    for (auto& occ : occurrences) {
        event_kind(occ.code);
        const auto i = deal.flat_index(occ.exposure.k, occ.exposure.n);
        const auto& e = deal.exposures()[i];
        if (occ.time < 0 || occ.time > e.end_month())
            throw std::invalid_argument(fmt::format("occurrence '{}' on ({},{}) at month {} outside [0, {}]",
                                                    occ.code, occ.exposure.k, occ.exposure.n, occ.time,
                                                    e.end_month()));
        s.per_exposure[i].push_back(std::move(occ));
    }
    for (auto& list : s.per_exposure)
        std::stable_sort(list.begin(), list.end(),
                         [](const EventOccurrence& a, const EventOccurrence& b) { return a.time < b.time; });
    std::sort(excessive_costs.begin(), excessive_costs.end());
    s.excessive_costs = std::move(excessive_costs);
    return s;
}

int kronecker(long long a, long long b) { return a == b ? 1 : 0; }
int heaviside(long long a, long long b) { return a >= b ? 1 : 0; }

BigInt scenario_count_if(const Deal& deal, int event_count) {
    if (event_count < 1) throw std::invalid_argument("scenario_count_if: NE >= 1 required");
    BigInt total = 1;
    for (const auto& p : deal.portfolios())
        total *= boost::multiprecision::pow(BigInt(event_count), static_cast<unsigned>(p.exposures.size()));
    return total;
}

BigInt scenario_count_when(const Deal& deal, int event_count) {
    if (event_count < 1) throw std::invalid_argument("scenario_count_when: NE >= 1 required");
    BigInt total = 1;
    for (const auto& p : deal.portfolios()) {
        const Month duration = p.exposures.front().duration();
        for (const auto& e : p.exposures)
            if (e.duration() != duration)
                throw std::invalid_argument(
                    fmt::format("scenario_count_when: portfolio {} mixes exposure durations", p.index));
        const BigInt base = BigInt(event_count - 1) * duration + 1;
        total *= boost::multiprecision::pow(base, static_cast<unsigned>(p.exposures.size()));
    }
    return total;
}

std::uint64_t scenario_seed(std::uint64_t master_seed, int id) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(id) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// First month in [first, last] hit by a monthly hazard, given a uniform draw.
std::optional<Month> geometric_time(double hazard, double u, Month first, Month last) {
    if (first > last || !(hazard > 0.0)) return std::nullopt;
    if (hazard >= 1.0) return first;
    const double trials = std::ceil(std::log1p(-u) / std::log1p(-hazard));
    const double k = std::max(1.0, trials);
    if (k > static_cast<double>(last - first + 1)) return std::nullopt;
    return first + static_cast<Month>(k) - 1;
}

}  // namespace

Scenario generate_scenario(const Deal& deal, const GeneratorConfig& config, int id) {
    Scenario s = base_scenario(deal);
    s.id = id;
    s.seed = scenario_seed(config.master_seed, id);
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::map<std::string, double> common_factor;
    for (const auto& [name, profile] : config.clusters)
        common_factor[name] = profile.default_correlation > 0.0 ? normal(rng) : 0.0;

    const Month horizon = deal.horizon();
    for (std::size_t i = 0; i < deal.exposures().size(); ++i) {
        const auto& e = deal.exposures()[i];
        const auto& cluster = deal.portfolios()[static_cast<std::size_t>(e.portfolio - 1)].cluster;
        const auto it = config.clusters.find(cluster);
        if (it == config.clusters.end())
            throw std::invalid_argument(fmt::format("generator: no rate parameters for cluster '{}'", cluster));
        const auto& profile = it->second;
        const Month first = e.pooling + 1;
        const Month last = e.end_month();
        auto& list = s.per_exposure[i];
        std::optional<Month> first_gate;

        for (const auto& rate : profile.events) {
            const auto& kind = event_kind(rate.code);
            double u = uniform(rng);
            if (kind.mechanic == Mechanic::Reactivate) continue;
            if (rate.code == "de" && profile.default_correlation > 0.0) {
                const double rho = std::min(profile.default_correlation, 1.0);
                const double latent = std::sqrt(rho) * common_factor[cluster] + std::sqrt(1.0 - rho) * normal(rng);
                u = normal_cdf(latent);
            }
            const auto t = geometric_time(rate.monthly_hazard, u, first, last);
            if (!t) continue;
            EventOccurrence occ;
            occ.code = rate.code;
            occ.exposure = {e.portfolio, e.index};
            occ.time = *t;
            occ.factor = rate.factor;
            occ.delay = rate.delay;
            if (kind.mechanic == Mechanic::Gate) {
                const Amount outstanding = e.outstanding_capital(*t - 1);
                if (kind.payload == PayloadRule::OutstandingCapital) {
                    occ.amount = outstanding;
                } else if (kind.payload == PayloadRule::Recovery && rate.recovery_fraction > 0.0) {
                    const Amount recovered = round_amount(rate.recovery_fraction * static_cast<double>(outstanding));
                    const Month arrival = std::min(*t + rate.recovery_lag, horizon);
                    occ.amount = recovered;
                    occ.arrival = arrival;
                    const Amount cost = round_amount(rate.cost_fraction * static_cast<double>(recovered));
                    if (cost > 0) occ.recovery_costs.push_back({arrival, cost});
                }
                if (!first_gate || *t < *first_gate) first_gate = *t;
            }
            list.push_back(std::move(occ));
        }
        // return to life is only meaningful after a gate
        for (const auto& rate : profile.events) {
            const auto& kind = event_kind(rate.code);
            if (kind.mechanic != Mechanic::Reactivate) continue;
            const double u = uniform(rng);
            if (!first_gate) continue;
            const auto t = geometric_time(rate.monthly_hazard, u, *first_gate + 1, last);
            if (!t) continue;
            EventOccurrence occ;
            occ.code = rate.code;
            occ.exposure = {e.portfolio, e.index};
            occ.time = *t;
            list.push_back(std::move(occ));
        }
        std::stable_sort(list.begin(), list.end(),
                         [](const EventOccurrence& a, const EventOccurrence& b) { return a.time < b.time; });
    }
    s.excessive_costs = config.excessive_costs;
    std::sort(s.excessive_costs.begin(), s.excessive_costs.end());
    return s;
}

ScenarioSet generate_scenarios(const Deal& deal, const GeneratorConfig& config) {
    if (config.scenario_count < 1) throw std::invalid_argument("generator: at least one scenario required");
    if (!deal.normalized()) throw std::invalid_argument("generator: deal timeline must be normalized");
    for (const auto& p : deal.portfolios())
        if (!config.clusters.contains(p.cluster))
            throw std::invalid_argument(fmt::format("generator: no rate parameters for cluster '{}'", p.cluster));
    for (const auto& [name, profile] : config.clusters)
        for (const auto& rate : profile.events) {
            check_event_allowed(deal.type(), rate.code, config.allow_extreme);
            if (rate.monthly_hazard < 0.0 || rate.monthly_hazard > 1.0)
                throw std::invalid_argument(
                    fmt::format("generator: hazard of '{}' in cluster '{}' must lie in [0,1]", rate.code, name));
        }
    ScenarioSet set;
    set.config = config;
    set.scenarios.reserve(static_cast<std::size_t>(config.scenario_count));
    for (int id = 1; id <= config.scenario_count; ++id) set.scenarios.push_back(generate_scenario(deal, config, id));
    return set;
}

std::optional<Month> first_event_time(const Scenario& scn, const Deal& deal, ExposureRef e) {
    const auto& list = scn.per_exposure.at(deal.flat_index(e.k, e.n));
    std::optional<Month> first;
    for (const auto& occ : list)
        if (!first || occ.time < *first) first = occ.time;
    return first;
}

std::string scenarios_to_csv(const ScenarioSet& set) {
    std::string out = "scenario_id,k,n,event,t,payload\n";
    for (const auto& s : set.scenarios) {
        for (const auto& list : s.per_exposure) {
            for (const auto& occ : list) {
                std::string payload;
                if (occ.amount) payload = fmt::format("{}@{}", *occ.amount, occ.arrival.value_or(occ.time));
                else if (occ.delay != 0) payload = fmt::format("{}", occ.delay);
                else if (occ.factor != 0.0) payload = fmt::format("{:.10g}", occ.factor);
                out += fmt::format("{},{},{},{},{},{}\n", s.id, occ.exposure.k, occ.exposure.n, occ.code, occ.time,
                                   payload);
            }
        }
        for (const auto& ec : s.excessive_costs)
            out += fmt::format("{},0,0,ec,{},{}\n", s.id, ec.month, ec.amount);
    }
    return out;
}

}  // namespace peal
