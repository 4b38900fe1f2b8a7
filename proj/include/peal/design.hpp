#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "peal/tranching.hpp"

namespace peal {

inline constexpr int kVirtualPositions = 3;

enum class Quality { Senior, Mezzanine, Junior };
std::string_view quality_code(Quality q);  // SN, MZ, JR

// Piecewise-constant percentages: each step holds from its month until the next.
struct PercentStep {
    Month from = 0;
    std::vector<double> values;
};

struct PercentTable {
    std::vector<PercentStep> steps;

    // Values in force at month t; empty when the table is empty.
    std::span<const double> at(Month t) const;
    static PercentTable constant(std::vector<double> values);
};

struct WaterfallDesign {
    std::vector<int> hs;  // horizontal slices per virtual position
    // One table per virtual position. The table of VP1 lists the shares of
    // slices 2..HS1 only: slice 1 is always the mean SSE.
    std::vector<PercentTable> h;
    std::vector<int> vs;          // vertical slices per horizontal component
    std::vector<PercentTable> v;  // one table per horizontal component
    std::vector<std::vector<int>> costs;  // 1-based VC indices per cost position
    std::vector<std::vector<int>> notes;  // 1-based VC indices per note position

    int horizontal_count() const;  // H
    int vertical_count() const;    // V
    int cost_count() const { return static_cast<int>(costs.size()); }
    int note_count() const { return static_cast<int>(notes.size()); }

    // 1-based index navigation; throw std::out_of_range on bad input.
    int hc_of_vc(int i) const;
    int vp_of_hc(int j) const;
    int first_vc_of_hc(int j) const;
    Quality quality_of_vc(int i) const;

    // Percentages in force at t, defaulting to 100% for single slices.
    std::vector<double> h_weights(int vp, Month t) const;
    std::vector<double> v_weights(int hc, Month t) const;

    // True when no horizontal component is split vertically.
    bool horizontal_only() const;
};

std::vector<Violation> validate_design(const WaterfallDesign& d);

struct DesignSeries {
    std::array<Series, kVirtualPositions> vp;
    std::vector<Series> hc;
    std::vector<Series> vc;
    std::vector<Series> costs;
    std::vector<Series> notes;
};

std::array<Series, kVirtualPositions> virtual_positions(const Tranching& tr);
// HC1 = mean SSE; the rest of VP1 goes to slices 2..HS1 by their shares.
// Throws std::domain_error when the mean SSE exceeds VP1 or cannot be isolated.
std::vector<Series> horizontal_components(const std::array<Series, kVirtualPositions>& vp,
                                          const WaterfallDesign& d, std::span<const Amount> sse_mean);
std::vector<Series> vertical_components(const std::vector<Series>& hc, const WaterfallDesign& d);
void assemble_positions(const std::vector<Series>& vc, const WaterfallDesign& d, std::vector<Series>& costs,
                        std::vector<Series>& notes);

DesignSeries evaluate_design(const WaterfallDesign& d, const Tranching& tr, std::span<const Amount> sse_mean);

// Three-tranche layout with a vertical retention note: HS {3,1,1}, VS {1,1,2,2,2}, C1 = VC1+VC2,
// N1 = VC3, N2 = VC5, N3 = VC7, N4 = VC4+VC6+VC8 with retention share r.
WaterfallDesign retention_design(double retention = 0.05, double cost_share = 0.01);

// X = 1 cost (SSE plus a cost slice of VP1) and three sequential notes.
WaterfallDesign classical_horizontal_design(double cost_share = 0.01);

}  // namespace peal
