#include "peal/net.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

int step_indicator(Amount x) { return x > 0 ? 1 : 0; }

NetTotals total_net_position(std::span<const Amount> taf, std::span<const Amount> tgp) {
    const std::size_t n = tgp.size();
    NetTotals out;
    for (auto* s : {&out.paf, &out.tad, &out.adv, &out.dbt, &out.tnp}) s->assign(n, 0);
    Amount adv = 0;
    Amount dbt = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const bool terminal = t + 1 == n;
        const int h = terminal ? 1 : step_indicator(tgp[t]);
        const Amount paf = (t < taf.size() ? taf[t] : 0) + adv;
        const Amount tad = tgp[t] + dbt * h;
        if (terminal) {
            out.tnp[t] = paf;
            adv = 0;
            dbt = std::max<Amount>(tad - paf, 0);
        } else {
            out.tnp[t] = std::min(paf, tad);
            adv = std::max<Amount>(paf - tad, 0);
            dbt = h ? std::max<Amount>(tad - paf, 0) : dbt;
        }
        out.paf[t] = paf;
        out.tad[t] = tad;
        out.adv[t] = adv;
        out.dbt[t] = dbt;
    }
    return out;
}

NetMatrix net_dimensioning_matrix(const NetTotals& totals, const std::vector<Series>& gdm,
                                  std::span<const Amount> buffer) {
    if (gdm.empty()) throw std::invalid_argument("net_dimensioning_matrix: empty GDM");
    const std::size_t H = gdm.size();
    const std::size_t n = gdm.front().size();
    if (totals.tnp.size() != n) throw std::invalid_argument("net_dimensioning_matrix: TNP and GDM lengths differ");
    NetMatrix m;
    m.ndm.assign(H, Series(n, 0));
    m.dbt.assign(H, Series(n, 0));
    m.rnp.assign(H, Series(n, 0));
    const Series tgp = total_gross_position(gdm);
    std::vector<Amount> debt(H, 0);
    std::vector<Amount> due(H, 0);
    Amount reserved = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const bool terminal = t + 1 == n;
        const bool payable = terminal || tgp[t] > 0;
        if (t < buffer.size()) reserved += buffer[t];
        for (std::size_t j = 0; j < H; ++j) due[j] = gdm[j][t] + (payable ? debt[j] : 0);
        const Amount credit = payable ? std::min({reserved, totals.tnp[t], due[H - 1]}) : 0;
        reserved -= credit;
        Amount residual = totals.tnp[t] - credit;
        for (std::size_t j = 0; j < H; ++j) {
            if (j + 1 == H) residual += credit;
            Amount paid = std::min(due[j], residual);
            residual -= paid;
            if (terminal && j + 1 == H) {
                paid += residual;
                residual = 0;
            }
            m.ndm[j][t] = paid;
            if (payable) debt[j] = std::max<Amount>(0, due[j] - paid);
            m.dbt[j][t] = debt[j];
            m.rnp[j][t] = residual;
        }
    }
    return m;
}

std::vector<Series> net_verticals(const NetMatrix& m, const GrossDimensioning& gross, const WaterfallDesign& d) {
    const std::size_t n = m.ndm.empty() ? 0 : m.ndm.front().size();
    std::vector<Series> nv(gross.gv.size(), Series(n, 0));
    for (int j = 1; j <= d.horizontal_count(); ++j) {
        const auto col = static_cast<std::size_t>(j - 1);
        const int first = d.first_vc_of_hc(j);
        const int slices = d.vs[col];
        std::vector<double> weights(static_cast<std::size_t>(slices));
        for (std::size_t t = 0; t < n; ++t) {
            if (gross.gh[col][t] > 0) {
                for (int k = 0; k < slices; ++k)
                    weights[static_cast<std::size_t>(k)] =
                        static_cast<double>(gross.gv[static_cast<std::size_t>(first + k - 1)][t]);
            } else {
                const auto v = d.v_weights(j, static_cast<Month>(t));
                std::copy(v.begin(), v.end(), weights.begin());
            }
            const auto parts = split_proportional(m.ndm[col][t], weights);
            for (int k = 0; k < slices; ++k)
                nv[static_cast<std::size_t>(first + k - 1)][t] = parts[static_cast<std::size_t>(k)];
        }
    }
    return nv;
}

NetPositions net_positions(std::vector<Series> nv, const GrossDimensioning& gross, const WaterfallDesign& d) {
    NetPositions out;
    out.nv = std::move(nv);
    const std::size_t n = out.nv.empty() ? 0 : out.nv.front().size();
    auto sum_over = [&](const std::vector<int>& members) {
        Series s(n, 0);
        for (int i : members) {
            const auto& v = out.nv.at(static_cast<std::size_t>(i - 1));
            for (std::size_t t = 0; t < n; ++t) s[t] += v[t];
        }
        return s;
    };
    for (const auto& c : d.costs) out.nc.push_back(sum_over(c));
    for (const auto& y : d.notes) out.nn.push_back(sum_over(y));
    for (std::size_t x = 0; x < out.nc.size(); ++x) out.lc.push_back(subtract(gross.gc[x], out.nc[x]));
    for (std::size_t y = 0; y < out.nn.size(); ++y) out.ln.push_back(subtract(gross.gn[y], out.nn[y]));
    return out;
}

Allocation allocate(std::span<const Amount> taf, const GrossDimensioning& gross, const WaterfallDesign& d,
                    std::span<const Amount> buffer) {
    Allocation a;
    a.totals = total_net_position(taf, total_gross_position(gross.gh));
    a.matrix = net_dimensioning_matrix(a.totals, gross.gh, buffer);
    a.positions = net_positions(net_verticals(a.matrix, gross, d), gross, d);
    return a;
}

std::string ndm_to_csv(const std::vector<Series>& ndm) {
    std::string out = "t";
    for (std::size_t j = 0; j < ndm.size(); ++j) out += fmt::format(",NDM{}", j + 1);
    out += '\n';
    const std::size_t n = ndm.empty() ? 0 : ndm.front().size();
    for (std::size_t t = 0; t < n; ++t) {
        out += fmt::format("{}", t);
        for (const auto& column : ndm) out += fmt::format(",{}", column[t]);
        out += '\n';
    }
    return out;
}

}  // namespace peal
