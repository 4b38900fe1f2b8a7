#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "peal/deal_io.hpp"
#include "peal/pipeline.hpp"

namespace peal::test {

std::filesystem::path source_dir();
std::filesystem::path deals_dir();

// Scratch directory under the system temp dir, emptied on creation.
std::filesystem::path scratch_dir(const std::string& name);

Exposure make_exposure(int k, int n, Series capital, Series interest, Month pooling = 0);

// Two exposures: C1=[0,50,50,0], I1=[0,10,5,0]; C2=[0,30,30,40], I2=[0,2,2,1]; TP = 3.
std::shared_ptr<const Deal> d1_deal(bool islamic = false);

EventOccurrence occurrence(const std::string& code, int k, int n, Month t);

// Single-portfolio deal of equal exposures with a level installment each month.
std::shared_ptr<const Deal> level_deal(int exposures, Month duration, Amount capital, Amount interest, Month tp);

// Random structure with 4 <= H <= max_h horizontal components and HS1 >= 2 that
// passes validate_design.
WaterfallDesign random_design(std::mt19937_64& rng, int max_h = 5);

// Frequencies satisfying the vertical, multiple and horizontal rules and aligned with tp.
FrequencySchedule random_frequencies(std::mt19937_64& rng, const WaterfallDesign& d, Month tp);

// Random deal with N <= max_n exposures and TP <= max_tp, random design, frequencies,
// endowment and generator profile. scenario_count scenarios.
DealFile random_deal_file(std::mt19937_64& rng, int max_n, Month max_tp, int max_h, int scenario_count);

// Deal for the CVA compliance cases: ten level exposures over twelve months, one
// common default at month 2 in every scenario and a second default in five of twenty.
DealFile cva_stress_file(const std::vector<int>& omega, Month second_default, bool recovery);

Evaluation evaluate_file(const DealFile& f);

}  // namespace peal::test
