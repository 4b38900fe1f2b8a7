#include "peal/asset_model.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

namespace {

Amount at(const Series& schedule, Month pooling, Month t) {
    const Month local = t - pooling;
    if (local < 0 || local >= static_cast<Month>(schedule.size())) return 0;
    return schedule[static_cast<std::size_t>(local)];
}

Amount outstanding_after(const Series& schedule, Month pooling, Month t) {
    Amount out = 0;
    const Month first = std::max<Month>(t - pooling + 1, 0);
    for (Month local = first; local < static_cast<Month>(schedule.size()); ++local)
        out += schedule[static_cast<std::size_t>(local)];
    return out;
}

}  // namespace

Amount Exposure::capital_at(Month t) const { return at(capital, pooling, t); }
Amount Exposure::interest_at(Month t) const { return at(interest, pooling, t); }
Amount Exposure::outstanding_capital(Month t) const { return outstanding_after(capital, pooling, t); }
Amount Exposure::outstanding_interest(Month t) const { return outstanding_after(interest, pooling, t); }

ScheduleAggregates schedule_aggregates(const Exposure& e, Month horizon) {
    ScheduleAggregates out;
    out.total_capital = sum(e.capital);
    out.total_interest = sum(e.interest);
    out.outstanding_capital.resize(static_cast<std::size_t>(horizon) + 1);
    out.outstanding_interest.resize(static_cast<std::size_t>(horizon) + 1);
    for (Month t = 0; t <= horizon; ++t) {
        out.outstanding_capital[static_cast<std::size_t>(t)] = e.outstanding_capital(t);
        out.outstanding_interest[static_cast<std::size_t>(t)] = e.outstanding_interest(t);
    }
    return out;
}

Deal::Deal(std::vector<Portfolio> portfolios, Month tp, bool islamic, std::string type)
    : portfolios_(std::move(portfolios)), tp_(tp), islamic_(islamic), type_(std::move(type)) {
    if (portfolios_.empty()) throw std::invalid_argument("deal: K >= 1 required");
    std::sort(portfolios_.begin(), portfolios_.end(),
              [](const Portfolio& a, const Portfolio& b) { return a.index < b.index; });
    origin_ = portfolios_.front().pooling;
    for (std::size_t k = 0; k < portfolios_.size(); ++k) {
        auto& p = portfolios_[k];
        if (p.index != static_cast<int>(k) + 1)
            throw std::invalid_argument(fmt::format("deal: portfolio indices must be 1..K, got {}", p.index));
        if (p.exposures.empty())
            throw std::invalid_argument(fmt::format("deal: portfolio {} needs N_k >= 1 exposures", p.index));
        if (p.pooling < 0)
            throw std::invalid_argument(fmt::format("deal: portfolio {} has a negative pooling month", p.index));
        origin_ = std::min(origin_, p.pooling);
        for (std::size_t n = 0; n < p.exposures.size(); ++n) {
            auto& e = p.exposures[n];
            e.portfolio = p.index;
            e.index = static_cast<int>(n) + 1;
            e.pooling = p.pooling;
            const auto where = fmt::format("exposure ({},{})", e.portfolio, e.index);
            if (e.capital.size() < 2)
                throw std::invalid_argument(where + ": schedule needs at least months 0 and 1");
            if (e.interest.size() > e.capital.size())
                throw std::invalid_argument(where + ": interest schedule longer than capital schedule");
            e.interest.resize(e.capital.size(), 0);
            if (e.capital[0] != 0 || e.interest[0] != 0)
                throw std::invalid_argument(where + ": month 0 is the pooling month and must carry no installment");
            for (std::size_t t = 0; t < e.capital.size(); ++t) {
                if (e.capital[t] < 0 || e.interest[t] < 0)
                    throw std::invalid_argument(fmt::format("{}: negative schedule value at month {}", where, t));
            }
            if (islamic_ && std::any_of(e.interest.begin(), e.interest.end(), [](Amount v) { return v != 0; }))
                throw std::invalid_argument(where + ": Islamic deals carry no interest");
            exposures_.push_back(e);
        }
    }
    horizon_ = 0;
    for (const auto& e : exposures_) horizon_ = std::max(horizon_, e.end_month());
    horizon_ -= origin_;
    if (tp_ < 1 || tp_ > horizon_)
        throw std::invalid_argument(fmt::format("deal: TP must lie in [1, T={}], got {}", horizon_, tp_));
}

std::size_t Deal::flat_index(int k, int n) const {
    for (std::size_t i = 0; i < exposures_.size(); ++i)
        if (exposures_[i].portfolio == k && exposures_[i].index == n) return i;
    throw std::out_of_range(fmt::format("deal: no exposure ({},{})", k, n));
}

bool Deal::rolling() const {
    return std::any_of(portfolios_.begin(), portfolios_.end(),
                       [&](const Portfolio& p) { return p.pooling != portfolios_.front().pooling; });
}

Amount Deal::total_capital() const {
    Amount total = 0;
    for (const auto& e : exposures_) total += sum(e.capital);
    return total;
}

Amount Deal::total_interest() const {
    Amount total = 0;
    for (const auto& e : exposures_) total += sum(e.interest);
    return total;
}

int total_exposure_count(const Deal& deal) { return static_cast<int>(deal.exposures().size()); }

Amount deal_outstanding_balance(const Deal& deal, Month t) {
    Amount total = 0;
    const Month shifted = t + deal.origin();
    for (const auto& e : deal.exposures()) total += e.outstanding_capital(shifted) + e.outstanding_interest(shifted);
    return total;
}

Deal normalize_timeline(const Deal& deal) {
    auto portfolios = deal.portfolios();
    for (auto& p : portfolios) p.pooling -= deal.origin();
    return Deal(std::move(portfolios), deal.tp(), deal.islamic(), deal.type());
}

}  // namespace peal
