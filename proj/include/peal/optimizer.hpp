#pragma once

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "peal/pipeline.hpp"

namespace peal {

// Lower is better. Known names: min_tflt, min_rcn, max_nirr:<note>.
double objective_value(const std::string& objective, const Evaluation& ev);
bool known_objective(const std::string& objective, int note_count);

struct TraceRow {
    int id = 0;
    std::string params;
    double objective = std::numeric_limits<double>::infinity();
    bool feasible = false;
    bool evaluated = false;
    std::vector<Violation> violations;
};

struct OptimizationResult {
    bool found = false;  // some candidate was evaluated end to end
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::string params;
    Candidate best;
    std::vector<Violation> violations;
    std::vector<TraceRow> trace;
};

// Sets slice `slice` of every step of a percentage table to x and rescales the
// other slices so that each step still sums to one.
void set_share(PercentTable& table, int slice, double x);

// Coordinate grid refinement over z_b(0), percentage slices and frequency
// sets, all evaluated on one fixed inbound set.
OptimizationResult optimize(const DealFile& f, const InboundSet& inbound, const OptimizationSpec& spec,
                            double alpha);

// candidate,params,objective,feasible,violations
std::string trace_to_csv(const OptimizationResult& r);
nlohmann::json optimization_summary(const OptimizationResult& r);

}  // namespace peal
