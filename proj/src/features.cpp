#include "peal/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace peal {

std::string_view state_name(PerformanceState s) {
    switch (s) {
    case PerformanceState::FullPerforming: return "full-performing";
    case PerformanceState::Performing: return "performing";
    case PerformanceState::NonPerforming: return "non-performing";
    case PerformanceState::SuperPerforming: return "super-performing";
    }
    return "";
}

double monthly_discount(double eta, Month t) { return std::pow(1.0 + eta / 12.0, t); }

ExposurePerformance exposure_performance(const ExposureFlows& flows, Month tp, double eta) {
    ExposurePerformance out;
    const auto last = std::min<std::size_t>(static_cast<std::size_t>(tp) + 1, flows.base.size());
    for (std::size_t t = 0; t < last; ++t) {
        const Amount delta = flows.realized[t] - flows.base[t] + flows.recovery[t] - flows.recovery_costs[t] -
                             flows.excess_recovery[t];
        if (delta != 0) out.value += static_cast<double>(delta) / monthly_discount(eta, static_cast<Month>(t));
    }
    if (!flows.first_event || *flows.first_event >= tp) out.state = PerformanceState::FullPerforming;
    else if (out.value < 0.0) out.state = PerformanceState::NonPerforming;
    else if (out.value > 0.0) out.state = PerformanceState::SuperPerforming;
    else out.state = PerformanceState::Performing;
    return out;
}

RegulatoryThickness thickness_regulatory(const std::vector<Series>& gdm, const WaterfallDesign& d) {
    if (!d.horizontal_only())
        throw std::invalid_argument(
            "regulatory thickness needs a design without vertical slices; use the PEAL thickness instead");
    RegulatoryThickness out;
    const std::size_t P = gdm.size();
    const std::size_t n = P == 0 ? 0 : gdm.front().size();
    for (const auto& column : gdm) out.ob.push_back(tail_sums(column));
    out.obp.assign(n, 0);
    for (const auto& ob : out.ob)
        for (std::size_t t = 0; t < n; ++t) out.obp[t] += ob[t];
    out.ap.assign(P, std::vector<Share>(n));
    out.dp.assign(P, std::vector<Share>(n));
    out.thp.assign(P, std::vector<Share>(n));
    out.th.assign(P, Series(n, 0));
    for (std::size_t t = 0; t < n; ++t) {
        const Amount obp = out.obp[t];
        Amount below = obp;
        for (std::size_t p = 0; p < P; ++p) {
            below -= out.ob[p][t];
            out.ap[p][t] = {below, obp};
            out.dp[p][t] = p == 0 ? Share{obp, obp} : out.ap[p - 1][t];
            out.thp[p][t] = {out.dp[p][t].num - out.ap[p][t].num, obp};
            out.th[p][t] = obp == 0 ? 0 : rounded_div(static_cast<__int128>(obp) * out.thp[p][t].num, obp);
        }
    }
    return out;
}

PealThickness thickness_peal(const GrossDimensioning& gross) {
    PealThickness out;
    for (const auto& gc : gross.gc) out.thc.push_back(tail_sums(gc));
    for (const auto& gn : gross.gn) out.thn.push_back(tail_sums(gn));
    return out;
}

double RiskWeights::lookup(int vc, Quality q) const {
    if (const auto it = by_vc.find(vc); it != by_vc.end())
        if (const auto jt = it->second.find(q); jt != it->second.end()) return jt->second;
    if (const auto it = by_quality.find(q); it != by_quality.end()) return it->second;
    throw std::invalid_argument(fmt::format("no risk weight for VC{} of quality {}", vc, quality_code(q)));
}

std::vector<std::vector<double>> regulatory_capital(const WaterfallDesign& d, const GrossDimensioning& gross,
                                                    const RiskWeights& rw, double car) {
    std::vector<std::vector<double>> out;
    for (const auto& note : d.notes) {
        const std::size_t n = gross.gv.empty() ? 0 : gross.gv.front().size();
        std::vector<double> rc(n, 0.0);
        for (int i : note) {
            const auto ob = tail_sums(gross.gv.at(static_cast<std::size_t>(i - 1)));
            const double weight = rw.lookup(i, d.quality_of_vc(i));
            for (std::size_t t = 0; t < n; ++t) rc[t] += static_cast<double>(ob[t]) * weight * car;
        }
        out.push_back(std::move(rc));
    }
    return out;
}

std::vector<double> mean_series(std::span<const Series> set) {
    if (set.empty()) return {};
    const std::size_t n = set.front().size();
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        __int128 total = 0;
        for (const auto& s : set) total += s.at(t);
        out[t] = static_cast<double>(static_cast<long double>(total) / static_cast<long double>(set.size()));
    }
    return out;
}

bool curves_cross(std::span<const double> a, std::span<const double> b) {
    constexpr double eps = 1e-12;
    bool above = false;
    bool below = false;
    for (std::size_t t = 1; t < std::min(a.size(), b.size()); ++t) {
        const double diff = a[t] - b[t];
        above = above || diff > eps;
        below = below || diff < -eps;
    }
    return above && below;
}

namespace {

int seniority(const WaterfallDesign& d, const std::vector<int>& members) {
    int rank = std::numeric_limits<int>::max();
    for (int i : members) rank = std::min(rank, d.hc_of_vc(i));
    return rank;
}

std::vector<double> cva_curve(const Series& gross, const std::vector<double>& mean_net, const std::string& name) {
    const Amount th = tail_sums(gross).at(0);
    std::vector<double> out(gross.size(), 0.0);
    if (th == 0) {
        for (std::size_t t = 0; t < gross.size(); ++t)
            if (std::abs(static_cast<double>(gross[t]) - mean_net.at(t)) > 1e-9)
                throw std::domain_error(fmt::format("CVA: position {} has zero thickness but receives {} at month {}",
                                                    name, mean_net.at(t), t));
        return out;
    }
    for (std::size_t t = 0; t < gross.size(); ++t)
        out[t] = (static_cast<double>(gross[t]) - mean_net.at(t)) / static_cast<double>(th);
    return out;
}

}  // namespace

CvaReport cva(const GrossDimensioning& gross, const std::vector<std::vector<double>>& mean_nc,
              const std::vector<std::vector<double>>& mean_nn, const WaterfallDesign& d) {
    CvaReport out;
    struct Curve {
        std::string name;
        int rank;
        const std::vector<double>* values;
    };
    for (std::size_t x = 0; x < gross.gc.size(); ++x)
        out.cost.push_back(cva_curve(gross.gc[x], mean_nc.at(x), fmt::format("C{}", x + 1)));
    for (std::size_t y = 0; y < gross.gn.size(); ++y)
        out.note.push_back(cva_curve(gross.gn[y], mean_nn.at(y), fmt::format("N{}", y + 1)));
    std::vector<Curve> curves;
    for (std::size_t x = 0; x < out.cost.size(); ++x)
        curves.push_back({fmt::format("C{}", x + 1), seniority(d, d.costs[x]), &out.cost[x]});
    for (std::size_t y = 0; y < out.note.size(); ++y)
        curves.push_back({fmt::format("N{}", y + 1), seniority(d, d.notes[y]), &out.note[y]});
    for (std::size_t a = 0; a < curves.size(); ++a) {
        for (std::size_t b = a + 1; b < curves.size(); ++b) {
            if (curves_cross(*curves[a].values, *curves[b].values)) {
                out.crossing = true;
                out.crossings.push_back(fmt::format("{}/{}", curves[a].name, curves[b].name));
            }
            if (curves[a].rank == curves[b].rank) continue;
            const auto& senior = curves[a].rank < curves[b].rank ? curves[a] : curves[b];
            const auto& junior = curves[a].rank < curves[b].rank ? curves[b] : curves[a];
            for (std::size_t t = 1; t < senior.values->size(); ++t)
                if ((*senior.values)[t] > (*junior.values)[t] + 1e-12) out.ordered = false;
        }
    }
    return out;
}

std::vector<double> fair_value_path(std::span<const Amount> nn, double eta) {
    std::vector<double> out(nn.size(), 0.0);
    double running = 0.0;
    for (std::size_t t = nn.size(); t-- > 0;) {
        running += static_cast<double>(nn[t]) / monthly_discount(eta, static_cast<Month>(t));
        out[t] = running;
    }
    return out;
}

FairValue fair_value(std::span<const Series> nn_set, double eta) {
    FairValue out;
    if (nn_set.empty()) return out;
    const std::size_t n = nn_set.front().size();
    out.mean.assign(n, 0.0);
    for (const auto& nn : nn_set) {
        const auto path = fair_value_path(nn, eta);
        for (std::size_t t = 0; t < n; ++t) out.mean[t] += path[t];
        out.at_zero.push_back(path.empty() ? 0.0 : path[0]);
    }
    for (double& v : out.mean) v /= static_cast<double>(nn_set.size());
    std::sort(out.at_zero.begin(), out.at_zero.end());
    return out;
}

double price_quantile(const FairValue& fv, double price) {
    if (fv.at_zero.empty()) return 0.0;
    const auto upto = std::upper_bound(fv.at_zero.begin(), fv.at_zero.end(), price);
    return static_cast<double>(upto - fv.at_zero.begin()) / static_cast<double>(fv.at_zero.size());
}

std::vector<double> quantile_function(const FairValue& fv, int points) {
    std::vector<double> out;
    if (fv.at_zero.empty() || points < 2) return out;
    const std::size_t S = fv.at_zero.size();
    for (int k = 0; k < points; ++k) {
        const double p = static_cast<double>(k) / static_cast<double>(points - 1);
        const auto rank = std::min(S - 1, static_cast<std::size_t>(std::floor(p * static_cast<double>(S))));
        out.push_back(fv.at_zero[rank]);
    }
    return out;
}

double present_value(std::span<const double> cashflows, double monthly_rate) {
    double pv = 0.0;
    for (std::size_t t = 0; t < cashflows.size(); ++t)
        pv += cashflows[t] / std::pow(1.0 + monthly_rate, static_cast<double>(t));
    return pv;
}

IrrResult irr(std::span<const double> cashflows, double price) {
    IrrResult out;
    if (!(price > 0.0)) throw std::invalid_argument("irr: price must be positive");
    if (std::all_of(cashflows.begin(), cashflows.end(), [](double v) { return v == 0.0; }))
        throw std::invalid_argument("irr: cash flows are all zero");
    const auto f = [&](double r) { return present_value(cashflows, r) - price; };
    if (std::abs(f(0.0)) <= 1e-12 * price) {
        out.solved = true;
        return out;
    }
    double lo = -0.99;
    double hi = 10.0;
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) return out;
    boost::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                           boost::math::tools::eps_tolerance<double>(50), iterations);
    out.solved = true;
    out.monthly = 0.5 * (bracket.first + bracket.second);
    out.annual = std::pow(1.0 + out.monthly, 12.0) - 1.0;
    return out;
}

double initial_note_price(double c0, double fvy0) { return std::min(c0, fvy0); }

std::vector<NoteIrr> gross_net_irr(const std::vector<Series>& gn, const std::vector<std::vector<double>>& mean_nn,
                                   double cy0, std::span<const double> cpy) {
    if (cpy.size() != gn.size()) throw std::invalid_argument("gross_net_irr: one price share per note required");
    const double total = std::accumulate(cpy.begin(), cpy.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("gross_net_irr: price shares must sum to 100%");
    std::vector<NoteIrr> out;
    for (std::size_t y = 0; y < gn.size(); ++y) {
        NoteIrr r;
        r.price = cpy[y] * cy0;
        std::vector<double> gross(gn[y].begin(), gn[y].end());
        const bool usable = r.price > 0.0;
        const bool gross_flows = std::any_of(gross.begin(), gross.end(), [](double v) { return v != 0.0; });
        const bool net_flows =
            std::any_of(mean_nn.at(y).begin(), mean_nn.at(y).end(), [](double v) { return v != 0.0; });
        if (usable && gross_flows) r.gross = irr(gross, r.price);
        if (usable && net_flows) r.net = irr(mean_nn[y], r.price);
        out.push_back(r);
    }
    return out;
}

}  // namespace peal
