#include "peal/inbound.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "peal/embedded.hpp"

namespace peal {

namespace {

std::size_t length(const Deal& deal) { return static_cast<std::size_t>(deal.horizon()) + 1; }

constexpr Month kNever = std::numeric_limits<Month>::max();

bool gated(const std::optional<Month>& gate, Month reactivation, Month t) {
    if (!gate || t < *gate) return false;
    return t < reactivation;
}

}  // namespace

ExposureFlows exposure_flows(const Deal& deal, const Exposure& e, const std::vector<EventOccurrence>& occurrences) {
    const std::size_t n = length(deal);
    const Month last = deal.horizon();
    ExposureFlows out;
    out.base.assign(n, 0);
    out.recovery.assign(n, 0);
    out.recovery_costs.assign(n, 0);
    out.excess_recovery.assign(n, 0);
    Series capital(n, 0);
    Series interest(n, 0);
    for (Month t = 0; t <= last; ++t) {
        capital[static_cast<std::size_t>(t)] = e.capital_at(t);
        interest[static_cast<std::size_t>(t)] = e.interest_at(t);
        out.base[static_cast<std::size_t>(t)] = e.installment_at(t);
    }

    const EventOccurrence* gate = nullptr;
    const EventOccurrence* moratorium = nullptr;
    std::optional<Month> capital_gate;
    std::optional<Month> interest_gate;
    Month reactivation = kNever;
    for (const auto& occ : occurrences) {
        const auto& kind = event_kind(occ.code);
        if (!out.first_event || occ.time < *out.first_event) out.first_event = occ.time;
        switch (kind.mechanic) {
        case Mechanic::Gate: {
            if (!gate || occ.time < gate->time) gate = &occ;
            if (kind.affects != Leg::Interest) {
                const Month tc = occ.capital_time.value_or(occ.time);
                capital_gate = capital_gate ? std::min(*capital_gate, tc) : tc;
            }
            if (kind.affects != Leg::Capital) {
                const Month ti = occ.interest_time.value_or(occ.time);
                interest_gate = interest_gate ? std::min(*interest_gate, ti) : ti;
            }
            break;
        }
        case Mechanic::Reactivate:
            reactivation = std::min(reactivation, occ.time);
            break;
        case Mechanic::RateShift:
            for (Month t = std::max(occ.time, e.pooling + 1); t <= std::min(e.end_month(), last); ++t) {
                auto& slot = interest[static_cast<std::size_t>(t)];
                const double shift = static_cast<double>(e.outstanding_capital(t - 1)) * occ.factor / 12.0;
                slot = std::max<Amount>(0, slot + round_amount(shift));
            }
            break;
        case Mechanic::Moratorium:
            if (!moratorium || occ.time < moratorium->time) moratorium = &occ;
            break;
        case Mechanic::RecoveryFactor:
        case Mechanic::RecoveryDelay:
            break;
        }
    }

    if (moratorium && moratorium->delay > 0) {
        Series c(n, 0);
        Series i(n, 0);
        for (Month t = 0; t <= last; ++t) {
            const auto from = static_cast<std::size_t>(t);
            const Month to = t >= moratorium->time ? t + moratorium->delay : t;
            if (to > last) continue;
            c[static_cast<std::size_t>(to)] += capital[from];
            i[static_cast<std::size_t>(to)] += interest[from];
        }
        capital = std::move(c);
        interest = std::move(i);
    }

    if (!gate) reactivation = kNever;
    if (gate && reactivation < gate->time)
        throw std::invalid_argument(fmt::format("exposure ({},{}): return to life at {} precedes the gate at {}",
                                                e.portfolio, e.index, reactivation, gate->time));

    out.realized.assign(n, 0);
    for (Month t = 0; t <= last; ++t) {
        const auto i = static_cast<std::size_t>(t);
        if (!gated(capital_gate, reactivation, t)) out.realized[i] += capital[i];
        if (!gated(interest_gate, reactivation, t)) out.realized[i] += interest[i];
    }

    if (!gate) return out;
    const auto& kind = event_kind(gate->code);
    if (kind.payload == PayloadRule::None) return out;
    std::optional<Amount> amount = gate->amount;
    if (!amount && kind.payload == PayloadRule::OutstandingCapital) amount = e.outstanding_capital(gate->time - 1);
    if (!amount) return out;

    Month arrival = gate->arrival.value_or(gate->time);
    Month shift = 0;
    double factor = 1.0;
    for (const auto& occ : occurrences) {
        const auto mechanic = event_kind(occ.code).mechanic;
        if (occ.time > arrival) continue;
        if (mechanic == Mechanic::RecoveryFactor) factor *= occ.factor;
        if (mechanic == Mechanic::RecoveryDelay) shift += occ.delay;
    }
    const Amount value = factor == 1.0 ? *amount : round_amount(static_cast<double>(*amount) * factor);
    arrival = std::min(arrival + shift, last);
    // a return to life before the recovery arrives cancels it
    if (kind.payload == PayloadRule::Recovery && reactivation < arrival) return out;

    out.recovery[static_cast<std::size_t>(arrival)] += value;
    Amount costs_to_arrival = 0;
    for (const auto& cost : gate->recovery_costs) {
        const Month when = std::min(cost.month + shift, last);
        out.recovery_costs[static_cast<std::size_t>(when)] += cost.amount;
        if (when <= arrival) costs_to_arrival += cost.amount;
    }
    if (kind.payload == PayloadRule::Recovery)
        out.excess_recovery[static_cast<std::size_t>(arrival)] =
            excessive_recovery(value, e.outstanding_capital(gate->time - 1), costs_to_arrival);
    return out;
}

Series scenario_installment(const Deal& deal, const Exposure& e, const Scenario& scn) {
    const auto i = deal.flat_index(e.portfolio, e.index);
    return exposure_flows(deal, e, scn.per_exposure.at(i)).realized;
}

Series gross_asset(const Deal& deal) {
    Series ga(length(deal), 0);
    for (const auto& e : deal.exposures())
        for (Month t = 0; t <= deal.horizon(); ++t) ga[static_cast<std::size_t>(t)] += e.installment_at(t);
    return ga;
}

ScenarioBlocks scenario_blocks(const Deal& deal, const Scenario& scn) {
    if (scn.per_exposure.size() != deal.exposures().size())
        throw std::invalid_argument("scenario does not match the deal's exposures");
    const std::size_t n = length(deal);
    ScenarioBlocks b;
    b.ga = gross_asset(deal);
    b.a.assign(n, 0);
    b.e.assign(n, 0);
    b.ec.assign(n, 0);
    b.cr.assign(n, 0);
    b.er.assign(n, 0);
    for (std::size_t i = 0; i < deal.exposures().size(); ++i) {
        const auto flows = exposure_flows(deal, deal.exposures()[i], scn.per_exposure[i]);
        for (std::size_t t = 0; t < n; ++t) {
            b.a[t] += flows.realized[t];
            b.e[t] += flows.recovery[t];
            b.cr[t] += flows.recovery_costs[t];
            b.er[t] += flows.excess_recovery[t];
        }
    }
    for (const auto& cost : scn.excessive_costs) {
        if (cost.month < 0 || cost.month > deal.horizon())
            throw std::invalid_argument(fmt::format("excessive cost at month {} outside [0, {}]", cost.month,
                                                    deal.horizon()));
        b.ec[static_cast<std::size_t>(cost.month)] += cost.amount;
    }
    b.l = subtract(b.ga, b.a);
    b.sse = super_senior_embedded(b.ec, b.cr, b.er);
    b.buffer = buffer(b.a, b.ga);
    return b;
}

Series asset_block(const Deal& deal, const Scenario& scn) { return scenario_blocks(deal, scn).a; }
Series loss_block(const Deal& deal, const Scenario& scn) { return scenario_blocks(deal, scn).l; }
Amount cumulative_loss(const Deal& deal, const Scenario& scn) { return sum(loss_block(deal, scn)); }
Series event_recovery(const Deal& deal, const Scenario& scn) { return scenario_blocks(deal, scn).e; }

Series loss_block_mece(const Deal& deal, const Scenario& scn) {
    Series out(length(deal), 0);
    for (std::size_t i = 0; i < deal.exposures().size(); ++i) {
        const auto& e = deal.exposures()[i];
        for (const auto& occ : scn.per_exposure.at(i)) {
            if (event_kind(occ.code).mechanic != Mechanic::Gate) continue;
            for (Month t = 0; t <= deal.horizon(); ++t)
                out[static_cast<std::size_t>(t)] += e.installment_at(t) * heaviside(t, occ.time);
        }
    }
    return out;
}

std::string blocks_to_csv(const ScenarioBlocks& b) {
    std::string out = "t,GA,A,L,E,SSE,B\n";
    for (std::size_t t = 0; t < b.ga.size(); ++t)
        out += fmt::format("{},{},{},{},{},{},{}\n", t, b.ga[t], b.a[t], b.l[t], b.e[t], b.sse[t], b.buffer[t]);
    return out;
}

}  // namespace peal
