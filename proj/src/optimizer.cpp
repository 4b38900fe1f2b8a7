#include "peal/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

using nlohmann::json;

namespace {

constexpr const char* kNirrPrefix = "max_nirr:";

struct Variable {
    enum class Kind { Endowment, Percent, Frequency } kind;
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    PercentVariable percent;
    std::size_t choices = 0;
};

std::vector<Variable> variables_of(const OptimizationSpec& spec) {
    std::vector<Variable> out;
    if (spec.z_max > 0.0) out.push_back({Variable::Kind::Endowment, "z0", 0.0, spec.z_max, {}, 0});
    for (const auto& p : spec.percents) {
        const auto name = fmt::format("{}{}.{}", p.kind == PercentVariable::Kind::Horizontal ? "h" : "v", p.component,
                                      p.slice);
        out.push_back({Variable::Kind::Percent, name, p.min, p.max, p, 0});
    }
    if (!spec.frequency_candidates.empty())
        out.push_back({Variable::Kind::Frequency, "freq", 0.0, 0.0, {}, spec.frequency_candidates.size()});
    return out;
}

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> out;
    if (hi <= lo) return {lo};
    for (int k = 0; k < points; ++k) out.push_back(lo + (hi - lo) * k / (points - 1));
    return out;
}

std::string params_key(const std::vector<Variable>& vars, const std::vector<double>& x) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (!out.empty()) out += ';';
        if (vars[i].kind == Variable::Kind::Frequency)
            out += fmt::format("{}={}", vars[i].name, static_cast<long long>(x[i]) + 1);
        else if (vars[i].kind == Variable::Kind::Endowment)
            out += fmt::format("{}={}", vars[i].name, std::llround(x[i]));
        else
            out += fmt::format("{}={:.6g}", vars[i].name, x[i]);
    }
    return out;
}

Candidate build(const DealFile& f, const OptimizationSpec& spec, const std::vector<Variable>& vars,
                const std::vector<double>& x) {
    Candidate c = candidate_of(f);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const auto& v = vars[i];
        switch (v.kind) {
        case Variable::Kind::Endowment: {
            if (c.endowment.base.empty()) c.endowment.base.assign(1, 0);
            c.endowment.base[0] = std::llround(x[i]);
            if (!c.endowment.scenario.empty()) c.endowment.scenario[0] = c.endowment.base[0];
            break;
        }
        case Variable::Kind::Percent: {
            const auto& p = v.percent;
            auto& tables = p.kind == PercentVariable::Kind::Horizontal ? c.design.h : c.design.v;
            const auto idx = static_cast<std::size_t>(p.component - 1);
            if (idx >= tables.size()) throw std::invalid_argument(fmt::format("{}: no such percentage table", v.name));
            set_share(tables[idx], p.slice, x[i]);
            break;
        }
        case Variable::Kind::Frequency:
            c.frequencies.omega = spec.frequency_candidates.at(static_cast<std::size_t>(x[i]));
            break;
        }
    }
    return c;
}

// Feasible first, then the objective; among infeasible ones, fewer violations.
bool better(const TraceRow& a, const TraceRow& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.evaluated != b.evaluated) return a.evaluated;
    if (!a.feasible && a.violations.size() != b.violations.size()) return a.violations.size() < b.violations.size();
    return a.objective < b.objective;
}

}  // namespace

bool known_objective(const std::string& objective, int note_count) {
    if (objective == "min_tflt" || objective == "min_rcn") return true;
    if (objective.rfind(kNirrPrefix, 0) == 0) {
        try {
            const int y = std::stoi(objective.substr(std::string(kNirrPrefix).size()));
            return y >= 1 && y <= note_count;
        } catch (const std::exception&) {
            return false;
        }
    }
    return false;
}

double objective_value(const std::string& objective, const Evaluation& ev) {
    if (objective == "min_tflt") return static_cast<double>(sum(ev.tranching.flt));
    if (objective == "min_rcn") {
        double total = 0.0;
        for (const auto& row : ev.rcn) total = std::accumulate(row.begin(), row.end(), total);
        return total;
    }
    if (objective.rfind(kNirrPrefix, 0) == 0) {
        const auto y = static_cast<std::size_t>(std::stoi(objective.substr(std::string(kNirrPrefix).size())) - 1);
        const auto& r = ev.irr.at(y).net;
        return r.solved ? -r.annual : std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument(fmt::format("unknown objective '{}'", objective));
}

void set_share(PercentTable& table, int slice, double x) {
    if (table.steps.empty()) throw std::invalid_argument("percentage table is empty");
    for (auto& s : table.steps) {
        const auto k = static_cast<std::size_t>(slice - 1);
        if (slice < 1 || k >= s.values.size()) throw std::out_of_range(fmt::format("slice {} out of range", slice));
        if (s.values.size() == 1) {
            s.values[0] = x;
            continue;
        }
        double rest = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i)
            if (i != k) rest += s.values[i];
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (i == k) continue;
            s.values[i] = rest > 0.0 ? s.values[i] / rest * (1.0 - x)
                                     : (1.0 - x) / static_cast<double>(s.values.size() - 1);
        }
        s.values[k] = x;
    }
}

OptimizationResult optimize(const DealFile& f, const InboundSet& inbound, const OptimizationSpec& spec, double alpha) {
    if (!known_objective(spec.objective, f.design.note_count()))
        throw std::invalid_argument(fmt::format("unknown objective '{}'", spec.objective));
    const auto vars = variables_of(spec);
    OptimizationResult result;
    std::map<std::string, std::size_t> seen;
    result.trace.reserve(static_cast<std::size_t>(std::max(spec.budget, 1)));

    auto evaluate_at = [&](const std::vector<double>& x) -> const TraceRow* {
        const auto key = params_key(vars, x);
        if (const auto it = seen.find(key); it != seen.end()) return &result.trace[it->second];
        if (static_cast<int>(result.trace.size()) >= spec.budget) return nullptr;
        TraceRow row;
        row.id = static_cast<int>(result.trace.size()) + 1;
        row.params = key;
        Candidate c;
        try {
            c = build(f, spec, vars, x);
            row.violations = validate_design(c.design);
            if (row.violations.empty()) {
                const auto ev = evaluate(f, inbound, c, alpha);
                row.evaluated = true;
                row.objective = objective_value(spec.objective, ev);
                row.violations = ev.compliance.violations();
            }
        } catch (const std::exception& e) {
            row.violations.push_back({"evaluation", row.params, e.what()});
        }
        row.feasible = row.evaluated && row.violations.empty();
        seen[key] = result.trace.size();
        result.trace.push_back(row);
        const auto& stored = result.trace.back();
        if (stored.evaluated && (!result.found || better(stored, result.trace[seen[result.params]]))) {
            result.found = true;
            result.params = stored.params;
            result.best = c;
            result.feasible = stored.feasible;
            result.objective = stored.objective;
            result.violations = stored.violations;
        }
        return &stored;
    };

    std::vector<double> x;
    std::vector<std::pair<double, double>> range;
    for (const auto& v : vars) {
        x.push_back(v.kind == Variable::Kind::Endowment ? 0.0 : v.kind == Variable::Kind::Frequency ? 0.0 : v.lo);
        range.emplace_back(v.lo, v.hi);
    }
    evaluate_at(x);
    for (int round = 0; round < spec.rounds; ++round) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            std::vector<double> values;
            if (vars[i].kind == Variable::Kind::Frequency) {
                for (std::size_t k = 0; k < vars[i].choices; ++k) values.push_back(static_cast<double>(k));
            } else {
                values = grid(range[i].first, range[i].second, spec.grid_points);
            }
            double best_value = x[i];
            const TraceRow* best_row = nullptr;
            for (double value : values) {
                auto probe = x;
                probe[i] = value;
                const auto* row = evaluate_at(probe);
                if (!row) break;
                if (!best_row || better(*row, *best_row)) {
                    best_row = row;
                    best_value = value;
                }
            }
            x[i] = best_value;
            if (vars[i].kind != Variable::Kind::Frequency && values.size() > 1) {
                const double half = (range[i].second - range[i].first) / (spec.grid_points - 1);
                range[i] = {std::max(vars[i].lo, best_value - half), std::min(vars[i].hi, best_value + half)};
            }
        }
    }
    return result;
}

std::string trace_to_csv(const OptimizationResult& r) {
    std::string out = "candidate,params,objective,feasible,violations\n";
    for (const auto& row : r.trace) {
        std::string detail;
        for (const auto& v : row.violations) detail += (detail.empty() ? "" : " | ") + v.rule + ": " + v.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        out += fmt::format("{},{},{},{},\"{}\"\n", row.id, row.params,
                           std::isfinite(row.objective) ? fmt::format("{:.10g}", row.objective) : "inf",
                           row.feasible ? 1 : 0, detail);
    }
    return out;
}

json optimization_summary(const OptimizationResult& r) {
    return {{"found", r.found},
            {"feasible", r.feasible},
            {"params", r.params},
            {"objective", std::isfinite(r.objective) ? json(r.objective) : json(nullptr)},
            {"evaluations", r.trace.size()},
            {"violations", violations_to_json(r.violations)}};
}

}  // namespace peal
