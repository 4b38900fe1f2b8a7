#include "peal/tranching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

namespace {

std::size_t months(Month tp) { return static_cast<std::size_t>(tp) + 1; }

Amount value_at(std::span<const Amount> s, std::size_t t) { return t < s.size() ? s[t] : 0; }

}  // namespace

Series icf(std::span<const Amount> gross_asset, std::span<const Amount> z_base, Month tp) {
    Series out(months(tp), 0);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = value_at(gross_asset, t) + value_at(z_base, t);
    return out;
}

Series taf(const ScenarioBlocks& blocks, std::span<const Amount> z_scenario, Month tp) {
    Series out(months(tp), 0);
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = value_at(blocks.a, t) + value_at(blocks.e, t) + value_at(z_scenario, t);
    return out;
}

Series total_loss(const ScenarioBlocks& blocks, const Endowment& z, Month tp) {
    const auto& zs = z.scenario.empty() ? z.base : z.scenario;
    Series out(months(tp), 0);
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = value_at(blocks.l, t) + value_at(z.base, t) - value_at(zs, t) + value_at(blocks.sse, t);
    return out;
}

Series net_loss(const ScenarioBlocks& blocks, Month tp) {
    Series out(months(tp), 0);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = value_at(blocks.l, t) - value_at(blocks.e, t);
    return out;
}

Series total_net_loss(std::span<const Amount> icf, std::span<const Amount> taf, std::span<const Amount> sse) {
    Series out(icf.size(), 0);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = icf[t] - value_at(taf, t) + value_at(sse, t);
    return out;
}

std::size_t quantile_rank(std::size_t scenario_count, double alpha) {
    if (scenario_count == 0) throw std::invalid_argument("quantile_rank: no scenarios");
    const auto rank = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(scenario_count)));
    return std::min(rank, scenario_count - 1);
}

Tranching tranche(std::span<const Series> tnl_set, std::span<const Amount> icf, double alpha) {
    if (tnl_set.size() < 2) throw std::invalid_argument("tranche: at least two scenarios required");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("tranche: alpha must lie in (0,1)");
    const std::size_t n = icf.size();
    const std::size_t count = tnl_set.size();
    Tranching tr;
    tr.alpha = alpha;
    tr.mu.assign(n, 0.0);
    tr.var.assign(n, 0);
    tr.flt.assign(n, 0);
    tr.slt.assign(n, 0);
    tr.clt.assign(n, 0);
    const std::size_t rank = quantile_rank(count, alpha);
    std::vector<Amount> column(count);
    for (std::size_t t = 0; t < n; ++t) {
        __int128 total = 0;
        for (std::size_t s = 0; s < count; ++s) {
            if (tnl_set[s].size() != n) throw std::invalid_argument("tranche: TNL series length differs from ICF");
            column[s] = tnl_set[s][t];
            total += column[s];
        }
        tr.mu[t] = static_cast<double>(static_cast<long double>(total) / static_cast<long double>(count));
        const Amount mean = rounded_div(total, static_cast<std::int64_t>(count));
        std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(rank), column.end());
        const Amount q = column[rank];
        __int128 tail = 0;
        std::int64_t tail_count = 0;
        for (std::size_t s = 0; s < count; ++s) {
            if (tnl_set[s][t] >= q) {
                tail += tnl_set[s][t];
                ++tail_count;
            }
        }
        tr.var[t] = rounded_div(tail, tail_count);
        tr.flt[t] = std::max<Amount>(0, mean);
        tr.slt[t] = std::max<Amount>(0, tr.var[t] - tr.flt[t]);
        tr.clt[t] = icf[t] - tr.slt[t] - tr.flt[t];
    }
    return tr;
}

SubstantialMargin substantial_margin(std::span<const Series> tnl_set, std::span<const Amount> flt) {
    SubstantialMargin out;
    if (tnl_set.empty()) return out;
    std::vector<double> totals;
    totals.reserve(tnl_set.size());
    for (const auto& s : tnl_set) totals.push_back(static_cast<double>(sum(s)));
    double mean = 0.0;
    for (double v : totals) mean += v;
    mean /= static_cast<double>(totals.size());
    double var = 0.0;
    for (double v : totals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(totals.size());
    out.tflt = mean;
    out.sigma = std::sqrt(var);
    if (!(mean > 0.0)) return out;
    out.applicable = true;
    out.sm = static_cast<double>(sum(flt)) / mean - 1.0;
    out.pass = out.sm >= out.sigma / mean;
    return out;
}

std::string tranching_to_csv(const Tranching& tr) {
    std::string out = "t,FLT,SLT,CLT,mu,VaR\n";
    for (std::size_t t = 0; t < tr.flt.size(); ++t)
        out += fmt::format("{},{},{},{},{:.10g},{}\n", t, tr.flt[t], tr.slt[t], tr.clt[t], tr.mu[t], tr.var[t]);
    return out;
}

}  // namespace peal
