#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "peal/money.hpp"

namespace peal::oracle {

// Cumulative-claims allocator. At each payable month (any gross due, or the
// final month) the cash pot pays the columns in order up to what each is still
// owed from its gross to date; the final month hands any remainder to the last
// column. Returns the same quantities as the waterfall recursion.
struct Greedy {
    std::vector<Series> ndm;
    std::vector<Series> debt;  // per column, owed after month t
    Series adv;                // cash carried after month t
    Series tnp;
};

Greedy greedy_waterfall(const Series& taf, const std::vector<Series>& gdm);

// Decimal string of base^exp by schoolbook multiplication on base-10 digits.
std::string decimal_pow(unsigned base, unsigned exp);

// Distinct single-event scenarios of a one-portfolio deal: each exposure either
// has no event or one of `codes` at one month 1..duration. Counted by building
// every assignment as a scenario and deduplicating the results.
std::size_t enumerate_single_event(int exposures, int duration, const std::vector<std::string>& codes);

// E[sum_t L(t)] for one exposure with installments inst (index 0..T) under a
// monthly default hazard p applied from month 1.
double expected_cumulative_loss(const Series& inst, double p);

// Mean default month of a geometric hazard p truncated to 1..T, conditional on default.
double truncated_geometric_mean(double p, int T);

}  // namespace peal::oracle
