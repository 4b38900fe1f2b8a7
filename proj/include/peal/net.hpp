#pragma once

#include <span>
#include <string>
#include <vector>

#include "peal/gross.hpp"

namespace peal {

int step_indicator(Amount x);

struct NetTotals {
    Series paf;
    Series tad;
    Series adv;
    Series dbt;
    Series tnp;
};

// Global recursion over months 0..TP (the length of tgp). Payments happen when
// TGP(t) > 0 and at the final month, where all debts fall due and the whole
// PAF is paid out, so that the sum of TNP equals the sum of TAF.
NetTotals total_net_position(std::span<const Amount> taf, std::span<const Amount> tgp);

struct NetMatrix {
    std::vector<Series> ndm;
    std::vector<Series> dbt;
    std::vector<Series> rnp;
};

// Column recursion: left to right, each column takes its gross amount plus
// its debt at payment months. The accrued buffer is reserved for the last
// column; any residual at the final month also goes to the last column.
NetMatrix net_dimensioning_matrix(const NetTotals& totals, const std::vector<Series>& gdm,
                                  std::span<const Amount> buffer = {});

struct NetPositions {
    std::vector<Series> nv;
    std::vector<Series> nc;
    std::vector<Series> nn;
    std::vector<Series> lc;
    std::vector<Series> ln;
};

// NV_i = NDM_j g_i, split exactly with largest remainders.
std::vector<Series> net_verticals(const NetMatrix& m, const GrossDimensioning& gross, const WaterfallDesign& d);
NetPositions net_positions(std::vector<Series> nv, const GrossDimensioning& gross, const WaterfallDesign& d);

struct Allocation {
    NetTotals totals;
    NetMatrix matrix;
    NetPositions positions;
};

Allocation allocate(std::span<const Amount> taf, const GrossDimensioning& gross, const WaterfallDesign& d,
                    std::span<const Amount> buffer = {});

// t,NDM1..NDMH
std::string ndm_to_csv(const std::vector<Series>& ndm);

}  // namespace peal
