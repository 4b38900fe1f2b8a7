#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peal/inbound.hpp"
#include "peal/net.hpp"

namespace peal {

enum class PerformanceState { FullPerforming, Performing, NonPerforming, SuperPerforming };
std::string_view state_name(PerformanceState s);

struct ExposurePerformance {
    double value = 0.0;
    PerformanceState state = PerformanceState::FullPerforming;
};

// Discount factor (1 + eta/12)^t.
double monthly_discount(double eta, Month t);

ExposurePerformance exposure_performance(const ExposureFlows& flows, Month tp, double eta);

// A ratio kept exact as numerator over the total outstanding OBP(t).
struct Share {
    Amount num = 0;
    Amount den = 0;
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
};

struct RegulatoryThickness {
    std::vector<Series> ob;  // OB_p(t) per GDM column
    Series obp;
    std::vector<std::vector<Share>> ap;
    std::vector<std::vector<Share>> dp;
    std::vector<std::vector<Share>> thp;
    std::vector<Series> th;  // OBP(t) THP_p(t)
};

// Attachment/detachment on the GDM columns. Refuses designs with vertical
// slices; use thickness_peal for those.
RegulatoryThickness thickness_regulatory(const std::vector<Series>& gdm, const WaterfallDesign& d);

struct PealThickness {
    std::vector<Series> thc;
    std::vector<Series> thn;
};

PealThickness thickness_peal(const GrossDimensioning& gross);

struct RiskWeights {
    std::map<Quality, double> by_quality;
    std::map<int, std::map<Quality, double>> by_vc;  // overrides keyed by 1-based VC index

    double lookup(int vc, Quality q) const;  // throws when no entry exists
};

// RCN_y(t) = sum over the VCs of note y of OB_i(t) RW_(i,q) CAR.
std::vector<std::vector<double>> regulatory_capital(const WaterfallDesign& d, const GrossDimensioning& gross,
                                                    const RiskWeights& rw, double car);

struct CvaReport {
    std::vector<std::vector<double>> cost;
    std::vector<std::vector<double>> note;
    bool crossing = false;
    bool ordered = true;  // CVA non-decreasing towards the subordinated positions at every t
    std::vector<std::string> crossings;
};

// Month-wise scenario mean of a set of series.
std::vector<double> mean_series(std::span<const Series> set);

// CVA_p(t) = (G_p(t) - <N_p(t)>) / TH_p with TH_p the thickness at month 0.
// A zero-thickness position that is neither owed nor paid anything has CVA 0;
// any other zero-thickness position throws std::domain_error.
CvaReport cva(const GrossDimensioning& gross, const std::vector<std::vector<double>>& mean_nc,
              const std::vector<std::vector<double>>& mean_nn, const WaterfallDesign& d);

// Strict sign change of a - b over months 1..end.
bool curves_cross(std::span<const double> a, std::span<const double> b);

// FVY^(s)(t) = sum over tau >= t of NN(tau) / (1 + eta/12)^tau.
std::vector<double> fair_value_path(std::span<const Amount> nn, double eta);

struct FairValue {
    std::vector<double> mean;     // FVY(t)
    std::vector<double> at_zero;  // sorted FVY^(s)(0)
};

FairValue fair_value(std::span<const Series> nn_set, double eta);
// Share of scenarios whose value does not exceed price.
double price_quantile(const FairValue& fv, double price);
// Lower nearest-rank quantiles at k / (points - 1), k = 0..points-1.
std::vector<double> quantile_function(const FairValue& fv, int points = 101);

struct IrrResult {
    bool solved = false;
    double monthly = 0.0;
    double annual = 0.0;
};

double present_value(std::span<const double> cashflows, double monthly_rate);
IrrResult irr(std::span<const double> cashflows, double price);

struct NoteIrr {
    double price = 0.0;
    IrrResult gross;
    IrrResult net;
};

// CY0 = min(C0, FVY(0)); CY_(0,y) = cpy_y CY0.
double initial_note_price(double c0, double fvy0);
std::vector<NoteIrr> gross_net_irr(const std::vector<Series>& gn, const std::vector<std::vector<double>>& mean_nn,
                                   double cy0, std::span<const double> cpy);

}  // namespace peal
