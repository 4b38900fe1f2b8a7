#include "doctest.h"

#include <cmath>
#include <random>

#include "peal/features.hpp"
#include "support.hpp"

using namespace peal;
using test::occurrence;

namespace {

GrossDimensioning gross_of(const WaterfallDesign& d, std::vector<Series> gv) {
    GrossDimensioning g;
    g.gv = std::move(gv);
    const std::size_t n = g.gv.front().size();
    auto sum_over = [&](const std::vector<int>& members) {
        Series s(n, 0);
        for (int i : members)
            for (std::size_t t = 0; t < n; ++t) s[t] += g.gv[static_cast<std::size_t>(i - 1)][t];
        return s;
    };
    for (const auto& c : d.costs) g.gc.push_back(sum_over(c));
    for (const auto& y : d.notes) g.gn.push_back(sum_over(y));
    for (int j = 1; j <= d.horizontal_count(); ++j) {
        std::vector<int> members;
        for (int k = 0; k < d.vs[static_cast<std::size_t>(j - 1)]; ++k) members.push_back(d.first_vc_of_hc(j) + k);
        g.gh.push_back(sum_over(members));
    }
    return g;
}

RiskWeights standard_weights() {
    RiskWeights rw;
    rw.by_quality = {{Quality::Senior, 0.15}, {Quality::Mezzanine, 0.5}, {Quality::Junior, 1.25}};
    return rw;
}

}  // namespace

TEST_SUITE("features") {
    TEST_CASE("exposure performance") {
        const auto deal = test::d1_deal();
        const double eta = 0.02;
        const auto& e1 = deal->exposures()[0];

        const auto clean = exposure_performance(exposure_flows(*deal, e1, {}), 3, eta);
        CHECK(clean.value == 0.0);
        CHECK(clean.state == PerformanceState::FullPerforming);

        auto de = occurrence("de", 1, 1, 2);
        de.amount = 40;
        de.arrival = 3;
        de.recovery_costs.push_back({3, 5});
        const auto hit = exposure_performance(exposure_flows(*deal, e1, {de}), 3, eta);
        const double r = 1.0 + eta / 12.0;
        CHECK(hit.value == doctest::Approx(-55.0 / (r * r) + 35.0 / (r * r * r)).epsilon(1e-12));
        CHECK(hit.state == PerformanceState::NonPerforming);

        auto pe = occurrence("pe", 1, 1, 2);
        pe.amount = 60;
        const auto gain = exposure_performance(exposure_flows(*deal, e1, {pe}), 3, eta);
        CHECK(gain.value > 0.0);
        CHECK(gain.state == PerformanceState::SuperPerforming);
        CHECK(state_name(PerformanceState::SuperPerforming).size() > 0);
        CHECK(monthly_discount(0.12, 2) == doctest::Approx(1.01 * 1.01));
    }

    TEST_CASE("regulatory thickness") {
        const auto d = classical_horizontal_design();
        const std::vector<Series> gdm{{0, 0}, {0, 0}, {0, 60}, {0, 40}, {0, 0}};
        const auto th = thickness_regulatory(gdm, d);
        CHECK(th.obp[0] == 100);
        CHECK(th.ap[2][0].value() == doctest::Approx(0.4));
        CHECK(th.ap[3][0].value() == 0.0);
        CHECK(th.dp[2][0].value() == doctest::Approx(1.0));
        CHECK(th.dp[3][0].value() == doctest::Approx(0.4));
        CHECK(th.thp[2][0].value() == doctest::Approx(0.6));
        CHECK(th.thp[3][0].value() == doctest::Approx(0.4));
        for (std::size_t p = 0; p < gdm.size(); ++p) CHECK(th.th[p] == th.ob[p]);

        const std::vector<Series> single{{0, 0}, {0, 0}, {0, 70}, {0, 0}, {0, 0}};
        const auto one = thickness_regulatory(single, d);
        CHECK(one.thp[2][0].value() == 1.0);
        CHECK(one.th[2] == one.obp);

        CHECK_THROWS(thickness_regulatory(gdm, retention_design()));
    }

    TEST_CASE("peal thickness and its regulatory equivalent") {
        const auto d = retention_design(0.05);
        Tranching tr;
        tr.flt = {0, 20, 20, 20};
        tr.slt = {0, 40, 40, 40};
        tr.clt = {0, 940, 940, 940};
        const Series sse(4, 0);
        const auto gross = gross_dimension(d, evaluate_design(d, tr, sse), FrequencySchedule::uniform(d, 12));
        const auto th = thickness_peal(gross);
        CHECK(th.thn[3] == tail_sums(gross.gn[3]));
        for (const auto& s : th.thn) CHECK(s.back() == 0);
        for (const auto& s : th.thc) CHECK(s.back() == 0);

        const auto h = classical_horizontal_design();
        const auto hg = gross_dimension(h, evaluate_design(h, tr, sse), FrequencySchedule::uniform(h, 12));
        const auto reg = thickness_regulatory(hg.gh, h);
        const auto peal = thickness_peal(hg);
        for (std::size_t y = 0; y < h.notes.size(); ++y) CHECK(peal.thn[y] == reg.th[static_cast<std::size_t>(y + 2)]);
    }

    TEST_CASE("regulatory capital") {
        const auto d = classical_horizontal_design();
        const auto g = gross_of(d, {{0, 0}, {0, 0}, {0, 1000}, {0, 0}, {0, 0}});
        const auto rcn = regulatory_capital(d, g, standard_weights(), 0.08);
        CHECK(rcn[0][0] == doctest::Approx(12.0));
        CHECK(rcn[0][1] == 0.0);

        RiskWeights zero;
        zero.by_quality = {{Quality::Senior, 0.0}, {Quality::Mezzanine, 0.0}, {Quality::Junior, 0.0}};
        for (const auto& row : regulatory_capital(d, g, zero, 0.08))
            for (double v : row) CHECK(v == 0.0);

        const auto r = retention_design();
        const auto rg = gross_of(r, {{0, 1}, {0, 2}, {0, 300}, {0, 30}, {0, 50}, {0, 5}, {0, 20}, {0, 2}});
        const auto rr = regulatory_capital(r, rg, standard_weights(), 0.08);
        CHECK(rr[3][0] == doctest::Approx((30 * 0.15 + 5 * 0.5 + 2 * 1.25) * 0.08));

        auto overridden = standard_weights();
        overridden.by_vc[8][Quality::Junior] = 2.5;
        CHECK(overridden.lookup(8, Quality::Junior) == 2.5);
        CHECK(overridden.lookup(7, Quality::Junior) == 1.25);
        CHECK_THROWS(RiskWeights{}.lookup(1, Quality::Senior));
    }

    TEST_CASE("curve crossing") {
        const std::vector<double> a{0, 1, 2, 3};
        const std::vector<double> b{0, 2, 2, 1};
        const std::vector<double> c{0, 0.5, 1, 3};
        CHECK(curves_cross(a, b));
        CHECK_FALSE(curves_cross(a, c));
        const std::vector<double> z{9, 0, 0, 0};
        const std::vector<double> tip{0, 0, 0, 1};
        CHECK_FALSE(curves_cross(z, tip));
    }

    TEST_CASE("loss-free scenario set has flat zero CVA") {
        auto f = test::cva_stress_file({12, 12, 12, 12, 12}, 12, false);
        std::vector<Scenario> clean;
        for (int s = 1; s <= 5; ++s) clean.push_back(make_scenario(*f.deal, s, {}));
        f.scenarios = clean;
        const auto ev = test::evaluate_file(f);
        REQUIRE(ev.cva);
        for (const auto& c : ev.cva->cost)
            for (double v : c) CHECK(v == 0.0);
        for (const auto& c : ev.cva->note)
            for (double v : c) CHECK(v == 0.0);
        CHECK(ev.compliance.cva == "pass");
    }

    TEST_CASE("bullet junior keeps the CVA curves ordered") {
        const auto ev = test::evaluate_file(test::cva_stress_file({12, 12, 12, 12, 1}, 12, false));
        REQUIRE(ev.cva);
        CHECK(ev.compliance.cva == "pass");
        CHECK_FALSE(ev.cva->crossing);
        CHECK(ev.cva->ordered);
        const auto& n = ev.cva->note;
        for (std::size_t t = 0; t < n[0].size(); ++t) {
            CHECK(n[2][t] >= n[1][t]);
            CHECK(n[1][t] >= n[0][t]);
        }
        CHECK(n[2].back() > 0.0);
    }

    TEST_CASE("junior paid ahead of senior crosses") {
        const auto ev = test::evaluate_file(test::cva_stress_file({12, 12, 4, 4, 12}, 2, true));
        REQUIRE(ev.cva);
        CHECK(ev.cva->crossing);
        CHECK(ev.compliance.cva == "crossing");
        CHECK_FALSE(ev.compliance.pass());
    }

    TEST_CASE("fair value") {
        Series nn(13, 0);
        nn[12] = 100;
        const std::vector<Series> one{nn};
        CHECK(fair_value(one, 0.0).mean[0] == doctest::Approx(100.0));
        CHECK(fair_value(one, 0.02).mean[0] == doctest::Approx(100.0 / std::pow(1.0 + 0.02 / 12.0, 12)));
        const auto path = fair_value_path(nn, 0.0);
        CHECK(path[12] == 100.0);
        CHECK(path.size() == 13);

        const std::vector<Series> two{nn, Series(13, 0)};
        const auto fv = fair_value(two, 0.0);
        CHECK(fv.mean[0] == doctest::Approx(50.0));
        CHECK(price_quantile(fv, 100.0) == 1.0);
        CHECK(price_quantile(fv, 50.0) == 0.5);
        CHECK(price_quantile(fv, -1.0) == 0.0);
        const auto q = quantile_function(fv, 3);
        CHECK(q == std::vector<double>{0.0, 100.0, 100.0});
    }

    TEST_CASE("internal rate of return") {
        std::vector<double> cf(13, 0.0);
        cf[12] = 110.0;
        const auto r = irr(cf, 100.0);
        REQUIRE(r.solved);
        CHECK(r.annual == doctest::Approx(0.10).epsilon(1e-10));
        CHECK(r.monthly == doctest::Approx(std::pow(1.1, 1.0 / 12.0) - 1.0).epsilon(1e-10));

        const std::vector<double> now{25.0, 0.0};
        const auto zero = irr(now, 25.0);
        REQUIRE(zero.solved);
        CHECK(std::abs(zero.monthly) < 1e-9);

        std::vector<double> flows(13, 10.0);
        flows[0] = 0.0;
        const auto neg = irr(flows, 130.0);
        REQUIRE(neg.solved);
        CHECK(neg.annual < 0.0);
        CHECK(present_value(flows, neg.monthly) == doctest::Approx(130.0));

        const std::vector<double> nothing{0.0, 0.0};
        CHECK_THROWS(irr(nothing, 10.0));
    }

    TEST_CASE("note prices and gross versus net returns") {
        CHECK(initial_note_price(1000.0, 900.0) == 900.0);
        CHECK(initial_note_price(1000.0, 1200.0) == 1000.0);
        const std::vector<Series> gn{{0, 0, 110}, {0, 0, 55}};
        const std::vector<std::vector<double>> nn{{0, 0, 110}, {0, 0, 44}};
        const std::vector<double> cpy{2.0 / 3.0, 1.0 / 3.0};
        const auto out = gross_net_irr(gn, nn, 150.0, cpy);
        REQUIRE(out.size() == 2);
        CHECK(out[0].price == doctest::Approx(100.0));
        CHECK(out[0].gross.monthly == doctest::Approx(out[0].net.monthly));
        CHECK(out[1].net.monthly < out[1].gross.monthly);
    }
}
