#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "peal/features.hpp"
#include "peal/net.hpp"
#include "support.hpp"

using namespace peal;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    std::string name;
    double limit_s;  // 0 when unbounded
    std::function<Outcome()> run;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

Tranching flat_tranching(Month tp, Amount flt, Amount slt, Amount clt) {
    const auto n = static_cast<std::size_t>(tp) + 1;
    Tranching tr;
    tr.flt = Series(n, flt);
    tr.slt = Series(n, slt);
    tr.clt = Series(n, clt);
    tr.flt[0] = tr.slt[0] = tr.clt[0] = 0;
    return tr;
}

Outcome scenario_counts() {
    const auto a = scenario_count_when(*test::level_deal(100, 36, 10, 1, 36), 3);
    const auto b = scenario_count_when(*test::level_deal(100, 60, 10, 1, 60), 3);
    if (a != BigInt(oracle::decimal_pow(73, 100))) return fail("T=36 count differs from 73^100");
    if (b != BigInt(oracle::decimal_pow(121, 100))) return fail("T=60 count differs from 121^100");
    return {true, "73^100 and 121^100 exact"};
}

Outcome enumeration() {
    const auto brute = oracle::enumerate_single_event(2, 4, {"de", "pe"});
    const auto formula = scenario_count_when(*test::level_deal(2, 4, 10, 1, 4), 3);
    if (brute != 81) return fail(fmt::format("brute force found {}", brute));
    if (formula != 81) return fail("formula is not 81");
    return {true, "81 distinct scenarios"};
}

Outcome conservation() {
    std::mt19937_64 rng(20240601);
    int deals = 0;
    int refused = 0;
    long long checks = 0;
    while (deals < 1000) {
        const auto f = test::random_deal_file(rng, 20, 48, 5, 50);
        if (!validate_frequencies(f.design, f.frequencies, f.deal->tp()).empty())
            return fail("generator produced frequencies that fail validation");
        const auto run = resolve(f, {});
        const auto inbound = build_inbound(f, run);
        const auto candidate = candidate_of(f);
        Evaluation ev;
        try {
            ev = evaluate(f, inbound, candidate, run.alpha);
        } catch (const StepError&) {
            if (++refused > 5000) return fail("engine refused more than 5000 draws");
            continue;
        }
        ++deals;
        const auto& tr = ev.tranching;
        for (std::size_t t = 0; t < ev.icf.size(); ++t)
            if (tr.flt[t] + tr.slt[t] + tr.clt[t] != ev.icf[t])
                return fail(fmt::format("deal {}: tranche partition broken at t={}", deals, t));
        const Month tp = f.deal->tp();
        const Series& zs = candidate.endowment.scenario.empty() ? candidate.endowment.base : candidate.endowment.scenario;
        for (const auto& b : inbound.blocks) {
            for (std::size_t t = 0; t < b.ga.size(); ++t)
                if (b.a[t] + b.l[t] != b.ga[t]) return fail(fmt::format("deal {}: A+L != GA at t={}", deals, t));
            const auto flows = taf(b, zs, tp);
            const auto alloc = allocate(flows, ev.gross, candidate.design, b.buffer);
            const auto& tnp = alloc.totals.tnp;
            for (std::size_t t = 0; t < tnp.size(); ++t) {
                Amount row = 0;
                for (const auto& col : alloc.matrix.ndm) row += col[t];
                if (row != tnp[t]) return fail(fmt::format("deal {}: row sum != TNP at t={}", deals, t));
            }
            if (sum(tnp) != sum(flows)) return fail(fmt::format("deal {}: TNP total != TAF total", deals));
            ++checks;
        }
    }
    return {true, fmt::format("1000 deals, {} scenario checks, {} draws refused by the engine", checks, refused)};
}

Outcome waterfall_oracle() {
    std::mt19937_64 rng(424242);
    for (int k = 0; k < 500; ++k) {
        const int H = 1 + static_cast<int>(rng() % 5);
        const std::size_t n = 2 + rng() % 24;
        std::vector<Series> gdm(static_cast<std::size_t>(H), Series(n, 0));
        Series flows(n, 0);
        for (std::size_t t = 0; t < n; ++t) {
            const bool payable = rng() % 3 != 0;
            for (auto& col : gdm) col[t] = payable ? static_cast<Amount>(rng() % 100000) : 0;
            flows[t] = static_cast<Amount>(rng() % 300000);
        }
        const auto totals = total_net_position(flows, total_gross_position(gdm));
        const auto m = net_dimensioning_matrix(totals, gdm);
        const auto g = oracle::greedy_waterfall(flows, gdm);
        if (m.ndm != g.ndm) return fail(fmt::format("instance {}: NDM differs", k));
        if (m.dbt != g.debt) return fail(fmt::format("instance {}: DBT differs", k));
        if (totals.adv != g.adv) return fail(fmt::format("instance {}: ADV differs", k));
    }
    return {true, "500 instances identical"};
}

Outcome total_default() {
    std::mt19937_64 rng(77);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int k = 0; k < 100; ++k) {
        const Month tp = pick(1, 48);
        Portfolio p;
        p.index = 1;
        p.cluster = "pool";
        std::vector<EventOccurrence> occ;
        const int n = pick(1, 20);
        for (int i = 1; i <= n; ++i) {
            const Month duration = i == 1 ? pick(tp, tp + 6) : pick(1, tp + 6);
            Series c(static_cast<std::size_t>(duration) + 1, 0);
            Series in(static_cast<std::size_t>(duration) + 1, 0);
            for (Month t = 1; t <= duration; ++t) {
                c[static_cast<std::size_t>(t)] = pick(0, 50000);
                in[static_cast<std::size_t>(t)] = pick(0, 5000);
            }
            p.exposures.push_back(test::make_exposure(1, i, c, in));
            occ.push_back(test::occurrence("de", 1, i, 1));
        }
        const Deal deal({p}, tp, false);
        const auto scn = make_scenario(deal, 1, occ);
        const auto b = scenario_blocks(deal, scn);
        for (std::size_t t = 0; t < b.a.size(); ++t)
            if (b.a[t] != 0 || b.e[t] != 0 || b.sse[t] != 0)
                return fail(fmt::format("deal {}: construction leaves A, E or SSE nonzero", k));
        const auto i = icf(b.ga, {}, tp);
        if (total_net_loss(i, taf(b, {}, tp), b.sse) != i) return fail(fmt::format("deal {}: TNL != ICF", k));
    }
    return {true, "100 deals, TNL = ICF exactly"};
}

Outcome g_check_both_ways() {
    std::mt19937_64 rng(1312);
    int passing = 0;
    int breaches = 0;
    while (passing < 50) {
        const Month tp = 12 * static_cast<Month>(1 + rng() % 4);
        const auto d = test::random_design(rng, 5);
        const auto fs = test::random_frequencies(rng, d, tp);
        if (!validate_frequencies(d, fs, tp).empty()) return fail("generated schedule breaks a rule");
        const auto ds = evaluate_design(d, flat_tranching(tp, 300000, 700000, 9000000), Series(tp + 1, 0));
        const auto g = g_check(gross_dimension(d, ds, fs), d, fs);
        if (!g.pass) return fail(fmt::format("rule-respecting case {} failed", passing + 1));
        ++passing;
    }
    while (breaches < 50) {
        const Month tp = 24;
        const auto d = test::random_design(rng, 5);
        std::vector<int> split;
        for (int j = 1; j <= d.horizontal_count(); ++j)
            if (d.vs[static_cast<std::size_t>(j - 1)] > 1) split.push_back(j);
        if (split.empty()) continue;
        auto fs = test::random_frequencies(rng, d, tp);
        const int hc = split[rng() % split.size()];
        const auto vc = static_cast<std::size_t>(d.first_vc_of_hc(hc) - 1 + static_cast<int>(rng() % 2));
        std::vector<int> other;
        for (int omega : {12, 6, 4, 3, 2, 1})
            if (omega != fs.omega[vc]) other.push_back(omega);
        fs.omega[vc] = other[rng() % other.size()];
        const auto ds = evaluate_design(d, flat_tranching(tp, 300000, 700000, 9000000), Series(tp + 1, 0));
        const auto g = g_check(gross_dimension(d, ds, fs), d, fs);
        if (g.pass) return fail(fmt::format("breach {} at HC{} passed", breaches + 1, hc));
        ++breaches;
    }
    return {true, "50 compliant schedules pass, 50 breaches fail"};
}

WaterfallDesign horizontal_only(std::mt19937_64& rng) {
    auto d = test::random_design(rng, 5);
    const int H = d.horizontal_count();
    d.vs.assign(static_cast<std::size_t>(H), 1);
    d.v.assign(static_cast<std::size_t>(H), PercentTable{});
    d.costs = {{1}};
    d.notes.clear();
    for (int j = 2; j <= H; ++j) {
        if (d.notes.empty() || rng() % 3 == 0)
            d.notes.push_back({j});
        else
            d.notes.back().push_back(j);
    }
    return d;
}

Outcome thickness_equivalence() {
    std::mt19937_64 rng(9090);
    for (int k = 0; k < 200; ++k) {
        const auto d = k == 0 ? classical_horizontal_design() : horizontal_only(rng);
        if (!validate_design(d).empty()) return fail("horizontal design failed validation");
        const Month tp = 12 * static_cast<Month>(1 + rng() % 4);
        const auto fs = test::random_frequencies(rng, d, tp);
        const auto ds = evaluate_design(d, flat_tranching(tp, 1000 + static_cast<Amount>(rng() % 9000), 40000, 900000),
                                        Series(tp + 1, 0));
        const auto gross = gross_dimension(d, ds, fs);
        const auto reg = thickness_regulatory(gross.gh, d);
        const auto peal = thickness_peal(gross);
        for (std::size_t p = 0; p < reg.th.size(); ++p)
            if (reg.th[p] != reg.ob[p]) return fail(fmt::format("design {}: TH != OB for column {}", k, p + 1));
        for (std::size_t y = 0; y < d.notes.size(); ++y) {
            Series expected(reg.th.front().size(), 0);
            for (int j : d.notes[y]) expected = add(expected, reg.th[static_cast<std::size_t>(j - 1)]);
            if (peal.thn[y] != expected) return fail(fmt::format("design {}: note {} thickness differs", k, y + 1));
        }
    }
    return {true, "200 horizontal designs, identity exact"};
}

Outcome irr_closed_form() {
    std::vector<double> cf(13, 0.0);
    cf[12] = 110.0;
    const auto r = irr(cf, 100.0);
    if (!r.solved || std::abs(r.annual - 0.10) > 1e-8 * 0.10)
        return fail(fmt::format("annual rate {:.12f}", r.annual));
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        std::vector<double> flows(2 + rng() % 120, 0.0);
        for (std::size_t t = 1; t < flows.size(); ++t) flows[t] = rng() % 4 == 0 ? 0.0 : u(rng);
        flows.back() += 1.0;
        double total = 0.0;
        for (double x : flows) total += x;
        const double price = total * std::uniform_real_distribution<double>(0.3, 1.2)(rng);
        const auto s = irr(flows, price);
        if (!s.solved) return fail(fmt::format("set {} unsolved", k));
        const double rel = std::abs(present_value(flows, s.monthly) - price) / price;
        worst = std::max(worst, rel);
        if (rel > 1e-8) return fail(fmt::format("set {}: PV off by {:.3e} relative", k, rel));
    }
    return {true, fmt::format("10% exact to {:.1e}, worst PV error {:.1e}", std::abs(r.annual - 0.10) / 0.10, worst)};
}

Outcome monte_carlo() {
    const double p = 0.02;
    const Month T = 36;
    const auto deal = test::level_deal(1, T, 2000, 150, T);
    GeneratorConfig g;
    g.master_seed = 31337;
    g.scenario_count = 100000;
    EventRate de;
    de.code = "de";
    de.monthly_hazard = p;
    g.clusters["pool"].events = {de};
    double s1 = 0.0;
    double s2 = 0.0;
    for (int id = 1; id <= g.scenario_count; ++id) {
        const auto x = static_cast<double>(cumulative_loss(*deal, generate_scenario(*deal, g, id)));
        s1 += x;
        s2 += x * x;
    }
    const double n = g.scenario_count;
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    Series inst(static_cast<std::size_t>(T) + 1, 2150);
    inst[0] = 0;
    const double expected = oracle::expected_cumulative_loss(inst, p);
    const double z = std::abs(mean - expected) / se;
    const std::string detail = fmt::format("mean {:.1f} vs {:.1f}, {:.2f} SE", mean, expected, z);
    return {z < 3.0, detail};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto parsed = parse_deal_file(test::deals_dir() / "desk.json");
    if (!parsed.ok()) return fail("desk deal does not parse");
    RunOptions o;
    o.scenarios = 10000;
    const auto a = run_pipeline(*parsed.deal, o, test::scratch_dir("acceptance_det_a"));
    const auto b = run_pipeline(*parsed.deal, o, test::scratch_dir("acceptance_det_b"));
    if (a.record.digests != b.record.digests) return fail("digests differ");
    for (const auto& [file, digest] : a.record.digests)
        if (slurp(a.record.dir / file) != slurp(b.record.dir / file)) return fail(file + " differs");
    return {true, fmt::format("{} reports byte identical over {} scenarios", a.record.digests.size(), a.record.scenarios)};
}

Outcome cva_regression() {
    const auto canonical = test::evaluate_file(test::cva_stress_file({12, 12, 12, 12, 1}, 12, false));
    if (!canonical.cva) return fail("no CVA report");
    if (canonical.compliance.cva != "pass" || canonical.cva->crossing) return fail("bullet junior crosses");
    const auto& n = canonical.cva->note;
    for (std::size_t t = 0; t < n[0].size(); ++t)
        if (!(n[2][t] >= n[1][t] && n[1][t] >= n[0][t])) return fail(fmt::format("order broken at t={}", t));
    const auto fast = test::evaluate_file(test::cva_stress_file({12, 12, 4, 4, 12}, 2, true));
    if (fast.compliance.cva != "crossing") return fail("junior fast pay verdict is " + fast.compliance.cva);
    return {true, fmt::format("ordered; junior fast pay crosses ({})", fast.compliance.cva_detail)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"scenario-count anchors", 1.0, scenario_counts},
        {"enumeration oracle", 1.0, enumeration},
        {"conservation suite", 60.0, conservation},
        {"waterfall oracle equivalence", 30.0, waterfall_oracle},
        {"degenerate total default", 0.0, total_default},
        {"g-check bidirectional", 0.0, g_check_both_ways},
        {"thickness equivalence", 0.0, thickness_equivalence},
        {"IRR closed form", 0.0, irr_closed_form},
        {"Monte Carlo sanity", 60.0, monte_carlo},
        {"determinism", 0.0, determinism},
        {"compliance regression", 0.0, cva_regression},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && c.limit_s > 0 && secs >= c.limit_s) o = fail(fmt::format("{} (over {:.0f} s)", o.detail, c.limit_s));
        if (!o.pass) ++failures;
        fmt::print("{} {} [{:.3f} s] {}\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
