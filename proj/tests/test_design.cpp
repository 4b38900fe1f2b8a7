#include "doctest.h"

#include <random>

#include "peal/design.hpp"
#include "support.hpp"

using namespace peal;

namespace {

Tranching toy_tranching() {
    Tranching tr;
    tr.flt = {0, 100, 120, 80};
    tr.slt = {0, 200, 240, 160};
    tr.clt = {1000, 9700, 9640, 7760};
    return tr;
}

Series icf_of(const Tranching& tr) {
    Series out(tr.flt.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = tr.flt[t] + tr.slt[t] + tr.clt[t];
    return out;
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule, const std::string& location) {
    for (const auto& x : v)
        if (x.rule == rule && x.location == location) return true;
    return false;
}

}  // namespace

TEST_SUITE("design") {
    TEST_CASE("virtual positions partition the inbound flows") {
        const auto tr = toy_tranching();
        const auto vp = virtual_positions(tr);
        CHECK(vp.size() == 3);
        CHECK(vp[0] == tr.clt);
        CHECK(vp[1] == tr.slt);
        CHECK(vp[2] == tr.flt);
        Tranching clean;
        clean.flt = {0, 0};
        clean.slt = {0, 0};
        clean.clt = {5, 9};
        const auto z = virtual_positions(clean);
        CHECK(z[1] == Series{0, 0});
        CHECK(z[2] == Series{0, 0});
        CHECK(z[0] == clean.clt);
    }

    TEST_CASE("qualities follow the virtual positions") {
        const auto d = retention_design();
        CHECK(d.horizontal_count() == 5);
        CHECK(d.vertical_count() == 8);
        CHECK(d.quality_of_vc(1) == Quality::Senior);
        CHECK(d.quality_of_vc(4) == Quality::Senior);
        CHECK(d.quality_of_vc(6) == Quality::Mezzanine);
        CHECK(d.quality_of_vc(8) == Quality::Junior);
        CHECK(d.hc_of_vc(7) == 5);
        CHECK(d.vp_of_hc(3) == 1);
        CHECK(d.first_vc_of_hc(4) == 5);
        CHECK_THROWS(d.hc_of_vc(9));
        CHECK(quality_code(Quality::Mezzanine) == "MZ");
    }

    TEST_CASE("horizontal components") {
        const auto tr = toy_tranching();
        const auto d = retention_design(0.05, 0.5);
        const Series sse{0, 40, 0, 60};
        const auto hc = horizontal_components(virtual_positions(tr), d, sse);
        REQUIRE(hc.size() == 5);
        CHECK(hc[0] == sse);
        CHECK(hc[1] == hc[2]);
        CHECK(hc[3] == tr.slt);
        CHECK(hc[4] == tr.flt);
        const Series none{0, 0, 0, 0};
        CHECK(horizontal_components(virtual_positions(tr), d, none)[0] == none);
    }

    TEST_CASE("mean SSE above VP1 is infeasible") {
        const auto tr = toy_tranching();
        const Series sse{2000, 0, 0, 0};
        CHECK_THROWS_AS(horizontal_components(virtual_positions(tr), retention_design(), sse), std::domain_error);
    }

    TEST_CASE("vertical components and positions") {
        const auto tr = toy_tranching();
        const auto d = retention_design(0.5);
        const Series sse{0, 0, 0, 0};
        const auto ds = evaluate_design(d, tr, sse);
        REQUIRE(ds.vc.size() == 8);
        for (std::size_t t = 0; t < 4; ++t) {
            CHECK(ds.vc[2][t] + ds.vc[3][t] == ds.hc[2][t]);
            CHECK(ds.vc[2][t] - ds.vc[3][t] == ds.hc[2][t] % 2);
        }
        REQUIRE(ds.notes.size() == 4);
        for (std::size_t t = 0; t < 4; ++t) {
            CHECK(ds.notes[3][t] == ds.vc[3][t] + ds.vc[5][t] + ds.vc[7][t]);
            CHECK(ds.costs[0][t] == ds.vc[0][t] + ds.vc[1][t]);
        }
        const auto plain = evaluate_design(classical_horizontal_design(), tr, sse);
        CHECK(plain.vc == plain.hc);
        CHECK(plain.notes[0] == plain.vc[2]);
    }

    TEST_CASE("positions sum to the inbound flows") {
        std::mt19937_64 rng(3);
        const auto tr = toy_tranching();
        const auto i = icf_of(tr);
        const Series sse{0, 10, 0, 3};
        for (int k = 0; k < 200; ++k) {
            const auto d = test::random_design(rng, 5);
            REQUIRE(validate_design(d).empty());
            DesignSeries ds;
            try {
                ds = evaluate_design(d, tr, sse);
            } catch (const std::domain_error&) {
                continue;  // mean SSE above VP1
            }
            for (std::size_t t = 0; t < i.size(); ++t) {
                Amount total = 0;
                for (const auto& c : ds.costs) total += c[t];
                for (const auto& n : ds.notes) total += n[t];
                CHECK(total == i[t]);
                Amount vcs = 0;
                for (const auto& v : ds.vc) vcs += v[t];
                CHECK(vcs == i[t]);
            }
        }
    }

    TEST_CASE("design validation") {
        CHECK(validate_design(retention_design()).empty());
        CHECK(validate_design(classical_horizontal_design()).empty());

        auto bad = retention_design();
        bad.v[2] = PercentTable::constant({0.5, 0.4});
        const auto v = validate_design(bad);
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "partition");
        CHECK(v[0].location == "HC3");
        CHECK(v[0].detail.find("90") != std::string::npos);

        auto unmapped = retention_design();
        unmapped.notes[3] = {4, 8};
        const auto u = validate_design(unmapped);
        REQUIRE(u.size() == 1);
        CHECK(u[0].rule == "coverage");
        CHECK(u[0].location == "VC6");

        auto twice = retention_design();
        twice.notes[0] = {3, 5};
        CHECK(has_rule(validate_design(twice), "coverage", "VC5"));

        auto split_first = retention_design();
        split_first.vs[0] = 2;
        CHECK_FALSE(validate_design(split_first).empty());

        WaterfallDesign two_vp;
        two_vp.hs = {1, 1};
        CHECK(validate_design(two_vp).front().rule == "NP");
    }

    TEST_CASE("percentage steps") {
        PercentTable t;
        t.steps = {{0, {0.5, 0.5}}, {6, {0.2, 0.8}}};
        CHECK(t.at(5)[0] == 0.5);
        CHECK(t.at(6)[0] == 0.2);
        CHECK(t.at(40)[1] == 0.8);
        auto d = retention_design();
        d.v[2] = t;
        CHECK(validate_design(d).empty());
        CHECK(d.v_weights(3, 7) == std::vector<double>{0.2, 0.8});
        CHECK(d.v_weights(1, 7) == std::vector<double>{1.0});
        d.v[2].steps[1].from = 0;
        CHECK(has_rule(validate_design(d), "steps", "HC3"));
        CHECK(retention_design().horizontal_only() == false);
        CHECK(classical_horizontal_design().horizontal_only());
    }
}
