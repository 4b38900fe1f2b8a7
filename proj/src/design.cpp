#include "peal/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

namespace {

constexpr double kPercentTolerance = 1e-9;

void check_table(const PercentTable& table, std::size_t slices, const std::string& where,
                 std::vector<Violation>& out) {
    if (table.steps.empty()) {
        if (slices > 1) out.push_back({"partition", where, fmt::format("{} slices need a percentage table", slices)});
        return;
    }
    if (table.steps.front().from != 0)
        out.push_back({"steps", where, "the first percentage step must start at month 0"});
    for (std::size_t k = 0; k < table.steps.size(); ++k) {
        const auto& step = table.steps[k];
        if (k > 0 && step.from <= table.steps[k - 1].from)
            out.push_back({"steps", where, "percentage steps must have increasing start months"});
        if (step.values.size() != slices) {
            out.push_back({"partition", where,
                           fmt::format("step from month {} has {} values for {} slices", step.from,
                                       step.values.size(), slices)});
            continue;
        }
        double total = 0.0;
        bool negative = false;
        for (double v : step.values) {
            negative = negative || !(v >= 0.0);
            total += v;
        }
        if (negative) out.push_back({"partition", where, fmt::format("negative percentage from month {}", step.from)});
        if (std::abs(total - 1.0) > kPercentTolerance)
            out.push_back({"partition", where,
                           fmt::format("percentages from month {} sum to {:.10g}%", step.from, total * 100.0)});
    }
}

std::vector<double> weights_or_unit(const PercentTable* table, int slices, Month t) {
    if (table) {
        const auto values = table->at(t);
        if (!values.empty()) return {values.begin(), values.end()};
    }
    if (slices == 1) return {1.0};
    throw std::invalid_argument("design: missing percentage table");
}

}  // namespace

std::string_view quality_code(Quality q) {
    switch (q) {
    case Quality::Senior: return "SN";
    case Quality::Mezzanine: return "MZ";
    case Quality::Junior: return "JR";
    }
    return "";
}

std::span<const double> PercentTable::at(Month t) const {
    const PercentStep* current = nullptr;
    for (const auto& step : steps)
        if (step.from <= t) current = &step;
    if (!current && !steps.empty()) current = &steps.front();
    if (!current) return {};
    return current->values;
}

PercentTable PercentTable::constant(std::vector<double> values) { return {{PercentStep{0, std::move(values)}}}; }

int WaterfallDesign::horizontal_count() const { return std::accumulate(hs.begin(), hs.end(), 0); }
int WaterfallDesign::vertical_count() const { return std::accumulate(vs.begin(), vs.end(), 0); }

int WaterfallDesign::hc_of_vc(int i) const {
    int first = 1;
    for (std::size_t j = 0; j < vs.size(); ++j) {
        if (i >= first && i < first + vs[j]) return static_cast<int>(j) + 1;
        first += vs[j];
    }
    throw std::out_of_range(fmt::format("design: no vertical component {}", i));
}

int WaterfallDesign::vp_of_hc(int j) const {
    int first = 1;
    for (std::size_t p = 0; p < hs.size(); ++p) {
        if (j >= first && j < first + hs[p]) return static_cast<int>(p) + 1;
        first += hs[p];
    }
    throw std::out_of_range(fmt::format("design: no horizontal component {}", j));
}

int WaterfallDesign::first_vc_of_hc(int j) const {
    if (j < 1 || j > static_cast<int>(vs.size()))
        throw std::out_of_range(fmt::format("design: no horizontal component {}", j));
    int first = 1;
    for (int k = 1; k < j; ++k) first += vs[static_cast<std::size_t>(k - 1)];
    return first;
}

Quality WaterfallDesign::quality_of_vc(int i) const {
    switch (vp_of_hc(hc_of_vc(i))) {
    case 1: return Quality::Senior;
    case 2: return Quality::Mezzanine;
    default: return Quality::Junior;
    }
}

std::vector<double> WaterfallDesign::h_weights(int vp, Month t) const {
    const auto p = static_cast<std::size_t>(vp - 1);
    const int slices = hs.at(p) - (vp == 1 ? 1 : 0);
    return weights_or_unit(p < h.size() ? &h[p] : nullptr, slices, t);
}

std::vector<double> WaterfallDesign::v_weights(int hc, Month t) const {
    const auto j = static_cast<std::size_t>(hc - 1);
    return weights_or_unit(j < v.size() ? &v[j] : nullptr, vs.at(j), t);
}

bool WaterfallDesign::horizontal_only() const {
    return std::all_of(vs.begin(), vs.end(), [](int s) { return s == 1; });
}

std::vector<Violation> validate_design(const WaterfallDesign& d) {
    std::vector<Violation> out;
    if (d.hs.size() != kVirtualPositions) {
        out.push_back({"NP", "HS", fmt::format("exactly {} virtual positions required, got {}", kVirtualPositions,
                                               d.hs.size())});
        return out;
    }
    for (std::size_t p = 0; p < d.hs.size(); ++p)
        if (d.hs[p] < 1) out.push_back({"HS", fmt::format("VP{}", p + 1), "at least one horizontal slice required"});
    if (!out.empty()) return out;
    const int H = d.horizontal_count();
    if (d.h.size() > d.hs.size()) out.push_back({"HS", "h", "more horizontal tables than virtual positions"});
    for (std::size_t p = 0; p < d.hs.size(); ++p) {
        const auto slices = static_cast<std::size_t>(d.hs[p] - (p == 0 ? 1 : 0));
        if (slices == 0) continue;
        static const PercentTable empty;
        check_table(p < d.h.size() ? d.h[p] : empty, slices, fmt::format("VP{}", p + 1), out);
    }
    if (static_cast<int>(d.vs.size()) != H) {
        out.push_back({"VS", "VS", fmt::format("{} vertical slice counts for H = {}", d.vs.size(), H)});
        return out;
    }
    for (std::size_t j = 0; j < d.vs.size(); ++j)
        if (d.vs[j] < 1) out.push_back({"VS", fmt::format("HC{}", j + 1), "at least one vertical slice required"});
    if (d.vs[0] != 1) out.push_back({"VS", "HC1", "the first horizontal component cannot be subdivided"});
    if (!out.empty()) return out;
    if (d.v.size() > d.vs.size()) out.push_back({"VS", "v", "more vertical tables than horizontal components"});
    for (std::size_t j = 0; j < d.vs.size(); ++j) {
        static const PercentTable empty;
        check_table(j < d.v.size() ? d.v[j] : empty, static_cast<std::size_t>(d.vs[j]), fmt::format("HC{}", j + 1),
                    out);
    }

    const int V = d.vertical_count();
    if (d.costs.empty()) out.push_back({"positions", "X", "at least one cost position required"});
    if (d.notes.empty()) out.push_back({"positions", "Y", "at least one note position required"});
    std::vector<int> cover(static_cast<std::size_t>(V) + 1, 0);
    auto scan = [&](const std::vector<std::vector<int>>& group, char tag) {
        for (std::size_t x = 0; x < group.size(); ++x) {
            const auto where = fmt::format("{}{}", tag, x + 1);
            if (group[x].empty()) out.push_back({"coverage", where, "position maps no vertical component"});
            for (int i : group[x]) {
                if (i < 1 || i > V) {
                    out.push_back({"coverage", where, fmt::format("VC{} does not exist (V = {})", i, V)});
                    continue;
                }
                ++cover[static_cast<std::size_t>(i)];
            }
        }
    };
    scan(d.costs, 'C');
    scan(d.notes, 'N');
    for (int i = 1; i <= V; ++i) {
        const int c = cover[static_cast<std::size_t>(i)];
        if (c == 0) out.push_back({"coverage", fmt::format("VC{}", i), "not mapped to any position"});
        if (c > 1) out.push_back({"coverage", fmt::format("VC{}", i), fmt::format("mapped {} times", c)});
    }
    return out;
}

std::array<Series, kVirtualPositions> virtual_positions(const Tranching& tr) { return {tr.clt, tr.slt, tr.flt}; }

std::vector<Series> horizontal_components(const std::array<Series, kVirtualPositions>& vp,
                                          const WaterfallDesign& d, std::span<const Amount> sse_mean) {
    const std::size_t n = vp[0].size();
    std::vector<Series> hc(static_cast<std::size_t>(d.horizontal_count()), Series(n, 0));
    for (std::size_t t = 0; t < n; ++t) {
        const auto month = static_cast<Month>(t);
        std::size_t j = 0;
        for (int p = 1; p <= kVirtualPositions; ++p) {
            Amount mass = vp[static_cast<std::size_t>(p - 1)][t];
            if (p == 1) {
                const Amount sse = t < sse_mean.size() ? sse_mean[t] : 0;
                if (sse > mass)
                    throw std::domain_error(
                        fmt::format("design infeasible: mean SSE {} exceeds VP1 {} at month {}", sse, mass, t));
                hc[j++][t] = sse;
                mass -= sse;
                if (d.hs[0] == 1) {
                    if (mass != 0)
                        throw std::domain_error(
                            fmt::format("design infeasible: HS1 = 1 leaves {} of VP1 unassigned at month {}", mass, t));
                    continue;
                }
            }
            const auto weights = d.h_weights(p, month);
            const auto parts = split_proportional(mass, weights);
            for (Amount part : parts) hc[j++][t] = part;
        }
    }
    return hc;
}

std::vector<Series> vertical_components(const std::vector<Series>& hc, const WaterfallDesign& d) {
    const std::size_t n = hc.empty() ? 0 : hc.front().size();
    std::vector<Series> vc(static_cast<std::size_t>(d.vertical_count()), Series(n, 0));
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t i = 0;
        for (std::size_t j = 0; j < hc.size(); ++j) {
            const auto weights = d.v_weights(static_cast<int>(j) + 1, static_cast<Month>(t));
            for (Amount part : split_proportional(hc[j][t], weights)) vc[i++][t] = part;
        }
    }
    return vc;
}

void assemble_positions(const std::vector<Series>& vc, const WaterfallDesign& d, std::vector<Series>& costs,
                        std::vector<Series>& notes) {
    const std::size_t n = vc.empty() ? 0 : vc.front().size();
    auto build = [&](const std::vector<std::vector<int>>& group) {
        std::vector<Series> out(group.size(), Series(n, 0));
        for (std::size_t x = 0; x < group.size(); ++x)
            for (int i : group[x]) {
                const auto& s = vc.at(static_cast<std::size_t>(i - 1));
                for (std::size_t t = 0; t < n; ++t) out[x][t] += s[t];
            }
        return out;
    };
    costs = build(d.costs);
    notes = build(d.notes);
}

DesignSeries evaluate_design(const WaterfallDesign& d, const Tranching& tr, std::span<const Amount> sse_mean) {
    DesignSeries out;
    out.vp = virtual_positions(tr);
    out.hc = horizontal_components(out.vp, d, sse_mean);
    out.vc = vertical_components(out.hc, d);
    assemble_positions(out.vc, d, out.costs, out.notes);
    return out;
}

WaterfallDesign retention_design(double retention, double cost_share) {
    WaterfallDesign d;
    d.hs = {3, 1, 1};
    d.h = {PercentTable::constant({cost_share, 1.0 - cost_share})};
    d.vs = {1, 1, 2, 2, 2};
    const auto split = PercentTable::constant({1.0 - retention, retention});
    d.v = {PercentTable{}, PercentTable{}, split, split, split};
    d.costs = {{1, 2}};
    d.notes = {{3}, {5}, {7}, {4, 6, 8}};
    return d;
}

WaterfallDesign classical_horizontal_design(double cost_share) {
    WaterfallDesign d;
    d.hs = {3, 1, 1};
    d.h = {PercentTable::constant({cost_share, 1.0 - cost_share})};
    d.vs = {1, 1, 1, 1, 1};
    d.costs = {{1, 2}};
    d.notes = {{3}, {4}, {5}};
    return d;
}

}  // namespace peal
