#include "support.hpp"

#include <algorithm>
#include <numeric>

namespace peal::test {

std::filesystem::path source_dir() { return PEAL_SOURCE_DIR; }
std::filesystem::path deals_dir() { return source_dir() / "deals"; }

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "peal_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

Exposure make_exposure(int k, int n, Series capital, Series interest, Month pooling) {
    Exposure e;
    e.portfolio = k;
    e.index = n;
    e.pooling = pooling;
    e.capital = std::move(capital);
    e.interest = std::move(interest);
    return e;
}

std::shared_ptr<const Deal> d1_deal(bool islamic) {
    Portfolio p;
    p.index = 1;
    p.cluster = "desk";
    const Series i1 = islamic ? Series{0, 0, 0, 0} : Series{0, 10, 5, 0};
    const Series i2 = islamic ? Series{0, 0, 0, 0} : Series{0, 2, 2, 1};
    p.exposures = {make_exposure(1, 1, {0, 50, 50, 0}, i1), make_exposure(1, 2, {0, 30, 30, 40}, i2)};
    return std::make_shared<const Deal>(Deal({p}, 3, islamic));
}

EventOccurrence occurrence(const std::string& code, int k, int n, Month t) {
    EventOccurrence o;
    o.code = code;
    o.exposure = {k, n};
    o.time = t;
    return o;
}

std::shared_ptr<const Deal> level_deal(int exposures, Month duration, Amount capital, Amount interest, Month tp) {
    Portfolio p;
    p.index = 1;
    p.cluster = "pool";
    for (int n = 1; n <= exposures; ++n) {
        Series c(static_cast<std::size_t>(duration) + 1, capital);
        Series i(static_cast<std::size_t>(duration) + 1, interest);
        c[0] = i[0] = 0;
        p.exposures.push_back(make_exposure(1, n, c, i));
    }
    return std::make_shared<const Deal>(Deal({p}, tp, false));
}

namespace {

PercentTable random_table(std::mt19937_64& rng, int slices, Month tp) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    auto values = [&] {
        std::vector<double> w(static_cast<std::size_t>(slices));
        for (auto& x : w) x = u(rng);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w) x /= total;
        double rest = 1.0;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) rest -= w[i];
        w.back() = rest;
        return w;
    };
    PercentTable t;
    t.steps.push_back({0, values()});
    if (tp > 2 && std::bernoulli_distribution(0.3)(rng))
        t.steps.push_back({std::uniform_int_distribution<Month>(1, tp - 1)(rng), values()});
    return t;
}

}  // namespace

WaterfallDesign random_design(std::mt19937_64& rng, int max_h) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    WaterfallDesign d;
    const int h = pick(4, std::max(4, max_h));
    // VP1 holds the SSE slice plus at least one more; the rest is spread over VP2 and VP3.
    int hs1 = 2;
    int hs2 = 1;
    int hs3 = 1;
    for (int extra = h - 4; extra > 0; --extra) {
        switch (pick(0, 2)) {
        case 0: ++hs1; break;
        case 1: ++hs2; break;
        default: ++hs3; break;
        }
    }
    d.hs = {hs1, hs2, hs3};
    const Month horizon = 48;
    d.h.push_back(hs1 > 1 ? random_table(rng, hs1 - 1, horizon) : PercentTable{});
    d.h.push_back(hs2 > 1 ? random_table(rng, hs2, horizon) : PercentTable{});
    d.h.push_back(hs3 > 1 ? random_table(rng, hs3, horizon) : PercentTable{});
    const int H = hs1 + hs2 + hs3;
    d.vs.assign(static_cast<std::size_t>(H), 1);
    for (int j = 1; j < H; ++j) d.vs[static_cast<std::size_t>(j)] = pick(1, 2);
    for (int j = 0; j < H; ++j) {
        const int vs = d.vs[static_cast<std::size_t>(j)];
        d.v.push_back(vs > 1 ? random_table(rng, vs, horizon) : PercentTable{});
    }
    const int V = d.vertical_count();
    d.costs = {{1}};
    std::vector<int> rest;
    for (int i = 2; i <= V; ++i) rest.push_back(i);
    std::shuffle(rest.begin(), rest.end(), rng);
    const int x_extra = V > 2 && pick(0, 1) ? 1 : 0;
    for (int i = 0; i < x_extra; ++i) d.costs[0].push_back(rest[static_cast<std::size_t>(i)]);
    const int y = pick(1, V - 1 - x_extra);
    d.notes.assign(static_cast<std::size_t>(y), {});
    for (std::size_t i = static_cast<std::size_t>(x_extra); i < rest.size(); ++i) {
        const auto slot = i - static_cast<std::size_t>(x_extra);
        const auto target = slot < d.notes.size() ? slot : static_cast<std::size_t>(pick(0, y - 1));
        d.notes[target].push_back(rest[i]);
    }
    for (auto& n : d.notes) std::sort(n.begin(), n.end());
    std::sort(d.costs[0].begin(), d.costs[0].end());
    return d;
}

FrequencySchedule random_frequencies(std::mt19937_64& rng, const WaterfallDesign& d, Month tp) {
    std::vector<int> allowed;
    for (int omega : {12, 6, 4, 3, 2, 1})
        if (tp % (12 / omega) == 0) allowed.push_back(omega);
    std::vector<int> per_hc;
    int current = 12;
    for (int j = 0; j < d.horizontal_count(); ++j) {
        std::vector<int> options;
        for (int omega : allowed)
            if (omega <= current && current % omega == 0) options.push_back(omega);
        if (std::bernoulli_distribution(0.6)(rng)) options = {current};
        current = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        per_hc.push_back(current);
    }
    return FrequencySchedule::per_hc(d, per_hc);
}

DealFile random_deal_file(std::mt19937_64& rng, int max_n, Month max_tp, int max_h, int scenario_count) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int k_count = pick(1, 2);
    const int n_total = pick(k_count, max_n);
    const Month tp = pick(2, max_tp);
    std::vector<Portfolio> portfolios;
    int assigned = 0;
    for (int k = 1; k <= k_count; ++k) {
        Portfolio p;
        p.index = k;
        p.pooling = k == 1 ? 0 : pick(0, 3);
        p.cluster = k == 1 ? "a" : "b";
        const int n_k = k == k_count ? n_total - assigned : pick(1, n_total - assigned - (k_count - k));
        assigned += n_k;
        for (int n = 1; n <= n_k; ++n) {
            const Month duration = k == 1 && n == 1 ? pick(tp, max_tp + 6) : pick(1, max_tp + 6);
            const Amount principal = pick(1000, 500000);
            Series c(static_cast<std::size_t>(duration) + 1, 0);
            Series i(static_cast<std::size_t>(duration) + 1, 0);
            Amount left = principal;
            for (Month t = 1; t <= duration; ++t) {
                const Amount due = t == duration ? left : principal / duration;
                c[static_cast<std::size_t>(t)] = due;
                i[static_cast<std::size_t>(t)] = left * pick(0, 12) / 1200;
                left -= due;
            }
            p.exposures.push_back(make_exposure(k, n, c, i, p.pooling));
        }
        portfolios.push_back(std::move(p));
    }
    DealFile f;
    f.deal = std::make_shared<const Deal>(normalize_timeline(Deal(portfolios, tp, false)));
    f.design = random_design(rng, max_h);
    f.frequencies = random_frequencies(rng, f.design, tp);
    f.alpha = std::uniform_real_distribution<double>(0.5, 0.99)(rng);
    f.features.risk_weights.by_quality = {{Quality::Senior, 0.15}, {Quality::Mezzanine, 0.5}, {Quality::Junior, 1.25}};
    if (pick(0, 2) == 0) f.endowment.base = {pick(0, 100000)};
    f.generator.master_seed = rng();
    f.generator.scenario_count = scenario_count;
    for (const char* cluster : {"a", "b"}) {
        ClusterProfile profile;
        EventRate de;
        de.code = "de";
        de.monthly_hazard = std::uniform_real_distribution<double>(0.0, 0.05)(rng);
        de.recovery_fraction = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
        de.recovery_lag = pick(1, 12);
        de.cost_fraction = std::uniform_real_distribution<double>(0.0, 0.1)(rng);
        profile.events.push_back(de);
        EventRate pe;
        pe.code = "pe";
        pe.monthly_hazard = std::uniform_real_distribution<double>(0.0, 0.01)(rng);
        profile.events.push_back(pe);
        EventRate eu;
        eu.code = "eu";
        eu.monthly_hazard = std::uniform_real_distribution<double>(0.0, 0.01)(rng);
        eu.factor = 0.02;
        profile.events.push_back(eu);
        f.generator.clusters[cluster] = profile;
    }
    return f;
}

DealFile cva_stress_file(const std::vector<int>& omega, Month second_default, bool recovery) {
    DealFile f;
    f.deal = level_deal(10, 12, 900, 100, 12);
    f.design = classical_horizontal_design(0.01);
    f.frequencies.omega = omega;
    f.alpha = 0.9;
    std::vector<Scenario> scenarios;
    for (int s = 1; s <= 20; ++s) {
        std::vector<EventOccurrence> occ{occurrence("de", 1, 1, 2)};
        if (s <= 5) {
            auto o = occurrence("de", 1, 2, second_default);
            if (recovery) {
                o.amount = 5000;
                o.arrival = 7;
            }
            occ.push_back(o);
        }
        scenarios.push_back(make_scenario(*f.deal, s, occ));
    }
    f.scenarios = scenarios;
    f.features.risk_weights.by_quality = {{Quality::Senior, 0.15}, {Quality::Mezzanine, 0.5}, {Quality::Junior, 1.25}};
    return f;
}

Evaluation evaluate_file(const DealFile& f) {
    const auto run = resolve(f, {});
    const auto inbound = build_inbound(f, run);
    return evaluate(f, inbound, candidate_of(f), run.alpha);
}

}  // namespace peal::test
