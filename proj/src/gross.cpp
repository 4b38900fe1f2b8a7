#include "peal/gross.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace peal {

bool allowed_frequency(int omega) {
    switch (omega) {
    case 1:
    case 2:
    case 3:
    case 4:
    case 6:
    case 12: return true;
    default: return false;
    }
}

int payment_period(int omega) {
    if (!allowed_frequency(omega))
        throw std::invalid_argument(fmt::format("frequency {} is not one of 1,2,3,4,6,12", omega));
    return 12 / omega;
}

FrequencySchedule FrequencySchedule::uniform(const WaterfallDesign& d, int omega) {
    return {std::vector<int>(static_cast<std::size_t>(d.vertical_count()), omega)};
}

FrequencySchedule FrequencySchedule::per_hc(const WaterfallDesign& d, std::span<const int> hc_omega) {
    if (static_cast<int>(hc_omega.size()) != d.horizontal_count())
        throw std::invalid_argument("per_hc: one frequency per horizontal component required");
    FrequencySchedule fs;
    for (std::size_t j = 0; j < hc_omega.size(); ++j)
        for (int k = 0; k < d.vs[j]; ++k) fs.omega.push_back(hc_omega[j]);
    return fs;
}

int FrequencySchedule::hc_frequency(const WaterfallDesign& d, int hc) const {
    return omega.at(static_cast<std::size_t>(d.first_vc_of_hc(hc) - 1));
}

std::vector<Violation> validate_frequencies(const WaterfallDesign& d, const FrequencySchedule& fs, Month tp) {
    std::vector<Violation> out;
    const int V = d.vertical_count();
    if (static_cast<int>(fs.omega.size()) != V) {
        out.push_back({"frequencies", "omega", fmt::format("{} frequencies for V = {}", fs.omega.size(), V)});
        return out;
    }
    for (int i = 1; i <= V; ++i) {
        const int w = fs.omega[static_cast<std::size_t>(i - 1)];
        if (!allowed_frequency(w)) {
            out.push_back({"frequencies", fmt::format("VC{}", i), fmt::format("{} is not one of 1,2,3,4,6,12", w)});
            continue;
        }
        if (tp % payment_period(w) != 0)
            out.push_back({"alignment", fmt::format("VC{}", i),
                           fmt::format("TP = {} is not a multiple of the {}-month payment period", tp,
                                       payment_period(w))});
    }
    if (!out.empty()) return out;
    const int H = d.horizontal_count();
    for (int j = 1; j <= H; ++j) {
        const int first = d.first_vc_of_hc(j);
        for (int i = first + 1; i < first + d.vs[static_cast<std::size_t>(j - 1)]; ++i)
            if (fs.omega[static_cast<std::size_t>(i - 1)] != fs.omega[static_cast<std::size_t>(first - 1)])
                out.push_back({"horizontal rule", fmt::format("HC{}", j),
                               fmt::format("VC{} pays {} times a year, VC{} pays {}", first,
                                           fs.omega[static_cast<std::size_t>(first - 1)], i,
                                           fs.omega[static_cast<std::size_t>(i - 1)])});
    }
    for (int j = 1; j < H; ++j) {
        const int upper = fs.hc_frequency(d, j);
        const int lower = fs.hc_frequency(d, j + 1);
        if (upper < lower)
            out.push_back({"vertical rule", fmt::format("HC{}-HC{}", j, j + 1),
                           fmt::format("f(HC{}) = {} is below f(HC{}) = {}", j, upper, j + 1, lower)});
        else if (upper % lower != 0)
            out.push_back({"multiple rule", fmt::format("HC{}-HC{}", j, j + 1),
                           fmt::format("f(HC{}) = {} is not a multiple of f(HC{}) = {}", j, upper, j + 1, lower)});
    }
    return out;
}

Series freq_transform(std::span<const Amount> cf, int omega) {
    const int tau = payment_period(omega);
    Series out(cf.size(), 0);
    Amount window = 0;
    for (std::size_t t = 0; t < cf.size(); ++t) {
        window += cf[t];
        if (t % static_cast<std::size_t>(tau) == 0) {
            out[t] = window;
            window = 0;
        }
    }
    return out;
}

GrossDimensioning gross_dimension(const WaterfallDesign& d, const DesignSeries& ds, const FrequencySchedule& fs) {
    if (fs.omega.size() != ds.vc.size()) throw std::invalid_argument("gross_dimension: one frequency per VC required");
    GrossDimensioning g;
    for (std::size_t i = 0; i < ds.vc.size(); ++i) g.gv.push_back(freq_transform(ds.vc[i], fs.omega[i]));
    const std::size_t n = ds.vc.empty() ? 0 : ds.vc.front().size();
    auto sum_over = [&](const std::vector<int>& members) {
        Series s(n, 0);
        for (int i : members) {
            const auto& gv = g.gv.at(static_cast<std::size_t>(i - 1));
            for (std::size_t t = 0; t < n; ++t) s[t] += gv[t];
        }
        return s;
    };
    for (const auto& c : d.costs) g.gc.push_back(sum_over(c));
    for (const auto& y : d.notes) g.gn.push_back(sum_over(y));
    for (int j = 1; j <= d.horizontal_count(); ++j) {
        std::vector<int> members;
        const int first = d.first_vc_of_hc(j);
        for (int k = 0; k < d.vs[static_cast<std::size_t>(j - 1)]; ++k) members.push_back(first + k);
        g.gh.push_back(sum_over(members));
    }
    g.hc = ds.hc;
    return g;
}

GCheck g_check(const GrossDimensioning& gross, const WaterfallDesign& d, const FrequencySchedule& fs) {
    GCheck out;
    const std::size_t n = gross.gv.empty() ? 0 : gross.gv.front().size();
    out.g.assign(gross.gv.size(), std::vector<double>(n, 0.0));
    for (int j = 1; j <= d.horizontal_count(); ++j) {
        const int first = d.first_vc_of_hc(j);
        const int slices = d.vs[static_cast<std::size_t>(j - 1)];
        int slack = 0;
        for (int k = 0; k < slices; ++k)
            slack = std::max(slack, payment_period(fs.omega.at(static_cast<std::size_t>(first + k - 1))));
        const auto& gh = gross.gh[static_cast<std::size_t>(j - 1)];
        const bool monthly = gross.hc.size() == gross.gh.size();
        const auto tau = static_cast<std::size_t>(payment_period(fs.omega.at(static_cast<std::size_t>(first - 1))));
        for (std::size_t t = 0; t < n; ++t) {
            auto v = d.v_weights(j, static_cast<Month>(t));
            if (monthly && t > 0 && tau > 1 && t % tau == 0) {
                const auto& hc = gross.hc[static_cast<std::size_t>(j - 1)];
                std::vector<double> acc(v.size(), 0.0);
                double mass = 0.0;
                for (std::size_t s = t - tau + 1; s <= t; ++s) {
                    const auto w = d.v_weights(j, static_cast<Month>(s));
                    const auto x = static_cast<double>(hc[s]);
                    for (std::size_t k = 0; k < v.size(); ++k) acc[k] += w[k] * x;
                    mass += x;
                }
                if (mass != 0.0)
                    for (std::size_t k = 0; k < v.size(); ++k) v[k] = acc[k] / mass;
            }
            for (int k = 0; k < slices; ++k) {
                const auto i = static_cast<std::size_t>(first + k - 1);
                if (gh[t] == 0) {
                    out.g[i][t] = v[static_cast<std::size_t>(k)];
                    continue;
                }
                const double gv = static_cast<double>(gross.gv[i][t]);
                out.g[i][t] = gv / static_cast<double>(gh[t]);
                const double deviation = std::abs(gv - v[static_cast<std::size_t>(k)] * static_cast<double>(gh[t]));
                if (deviation > static_cast<double>(slack)) {
                    out.pass = false;
                    out.failures.push_back({"g-check", fmt::format("VC{} month {}", i + 1, t),
                                            fmt::format("g = {:.10g}, v = {:.10g}", out.g[i][t],
                                                        v[static_cast<std::size_t>(k)])});
                }
            }
        }
    }
    return out;
}

Series total_gross_position(const std::vector<Series>& gdm) {
    Series out(gdm.empty() ? 0 : gdm.front().size(), 0);
    for (const auto& column : gdm)
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += column[t];
    return out;
}

std::string gdm_to_csv(const std::vector<Series>& gdm) {
    std::string out = "t";
    for (std::size_t j = 0; j < gdm.size(); ++j) out += fmt::format(",GH{}", j + 1);
    out += '\n';
    const std::size_t n = gdm.empty() ? 0 : gdm.front().size();
    for (std::size_t t = 0; t < n; ++t) {
        out += fmt::format("{}", t);
        for (const auto& column : gdm) out += fmt::format(",{}", column[t]);
        out += '\n';
    }
    return out;
}

}  // namespace peal
