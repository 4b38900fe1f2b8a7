#pragma once

#include <string>
#include <vector>

#include "peal/money.hpp"

namespace peal {

// A single income-generating asset. Schedules are indexed on the exposure's
// own clock: index 0 is the pooling month and carries no installment, the
// first installment is due at index 1.
struct Exposure {
    int portfolio = 1;  // k, 1-based
    int index = 1;      // n, 1-based
    Month pooling = 0;  // pooling month of the owning portfolio on the deal timeline
    Series capital;
    Series interest;

    Month duration() const { return static_cast<Month>(capital.size()) - 1; }
    Month end_month() const { return pooling + duration(); }

    // Schedule values on the deal timeline; zero outside [pooling, end_month].
    Amount capital_at(Month t) const;
    Amount interest_at(Month t) const;
    Amount installment_at(Month t) const { return capital_at(t) + interest_at(t); }

    // Capital and interest still due strictly after deal month t.
    Amount outstanding_capital(Month t) const;
    Amount outstanding_interest(Month t) const;
};

struct ScheduleAggregates {
    Amount total_capital = 0;
    Amount total_interest = 0;
    Series outstanding_capital;   // OC(t), t = 0..horizon
    Series outstanding_interest;  // OI(t)
};

ScheduleAggregates schedule_aggregates(const Exposure& e, Month horizon);

struct Portfolio {
    int index = 1;
    Month pooling = 0;
    std::string cluster;  // key of the risk profile in the generator config
    std::vector<Exposure> exposures;
};

// The asset side of a securitization. Immutable after construction.
class Deal {
public:
    Deal(std::vector<Portfolio> portfolios, Month tp, bool islamic, std::string type = "CL");

    const std::vector<Portfolio>& portfolios() const { return portfolios_; }
    // All exposures ordered by (k, n).
    const std::vector<Exposure>& exposures() const { return exposures_; }

    // Position of exposure (k, n) in exposures(); throws when absent.
    std::size_t flat_index(int k, int n) const;

    Month tp() const { return tp_; }
    // T: the last month any exposure pays.
    Month horizon() const { return horizon_; }
    Month origin() const { return origin_; }
    bool islamic() const { return islamic_; }
    bool rolling() const;
    bool normalized() const { return origin_ == 0; }
    const std::string& type() const { return type_; }

    Amount total_capital() const;
    Amount total_interest() const;

private:
    std::vector<Portfolio> portfolios_;
    std::vector<Exposure> exposures_;
    Month tp_ = 0;
    Month horizon_ = 0;
    Month origin_ = 0;
    bool islamic_ = false;
    std::string type_;
};

int total_exposure_count(const Deal& deal);

// OB(t): outstanding capital plus outstanding interest over all exposures.
Amount deal_outstanding_balance(const Deal& deal, Month t);

// Shifts every pooling month so that the earliest becomes month 0.
Deal normalize_timeline(const Deal& deal);

}  // namespace peal
