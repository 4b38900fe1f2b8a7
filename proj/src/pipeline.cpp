#include "peal/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "peal/embedded.hpp"
#include "peal/optimizer.hpp"

namespace peal {

using nlohmann::json;

namespace {

template <class F>
auto step(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StepError&) {
        throw;
    } catch (const std::exception& e) {
        throw StepError(name, e.what());
    }
}

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::vector<double> to_double(const Series& s) { return {s.begin(), s.end()}; }

// Scenario mean of one column across per-scenario matrices, in scenario order.
void accumulate(std::vector<std::vector<double>>& acc, const std::vector<Series>& m) {
    if (acc.empty()) acc.assign(m.size(), std::vector<double>(m.empty() ? 0 : m.front().size(), 0.0));
    for (std::size_t j = 0; j < m.size(); ++j)
        for (std::size_t t = 0; t < m[j].size(); ++t) acc[j][t] += static_cast<double>(m[j][t]);
}

void divide(std::vector<std::vector<double>>& acc, std::size_t count) {
    for (auto& row : acc)
        for (double& v : row) v /= static_cast<double>(count);
}

std::string table_csv(const std::vector<std::pair<std::string, const std::vector<double>*>>& columns, std::size_t n) {
    std::string out = "t";
    for (const auto& [name, _] : columns) out += "," + name;
    out += '\n';
    for (std::size_t t = 0; t < n; ++t) {
        out += fmt::format("{}", t);
        for (const auto& [_, values] : columns) out += "," + num(t < values->size() ? (*values)[t] : 0.0);
        out += '\n';
    }
    return out;
}

json irr_json(const IrrResult& r) {
    if (!r.solved) return nullptr;
    return {{"monthly", r.monthly}, {"annual", r.annual}};
}

json matrix_json(const std::vector<std::vector<double>>& m) {
    json out = json::array();
    for (const auto& row : m) out.push_back(row);
    return out;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
    out << content;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace

std::vector<Violation> Compliance::violations() const {
    std::vector<Violation> out = frequency;
    out.insert(out.end(), gcheck.failures.begin(), gcheck.failures.end());
    if (cva == "crossing") out.push_back({"cva crossing", "cva", cva_detail});
    return out;
}

ResolvedRun resolve(const DealFile& f, const RunOptions& o) {
    ResolvedRun r;
    r.seed = o.seed.value_or(f.generator.master_seed);
    r.alpha = o.alpha.value_or(f.alpha);
    if (!(r.alpha > 0.0 && r.alpha < 1.0)) throw StepError("configuration", "alpha must lie in (0,1)");
    if (f.scenarios && !o.scenarios) {
        r.explicit_scenarios = true;
        r.scenarios = static_cast<int>(f.scenarios->size());
    } else {
        r.scenarios = o.scenarios.value_or(f.generator.scenario_count);
    }
    if (r.scenarios <= 0) throw StepError("configuration", "at least one scenario is required");
    return r;
}

InboundSet build_inbound(const DealFile& f, const ResolvedRun& run) {
    const Deal& deal = *f.deal;
    InboundSet in;
    in.scenarios = step("scenario generation", [&] {
        if (run.explicit_scenarios) return *f.scenarios;
        GeneratorConfig config = f.generator;
        config.master_seed = run.seed;
        config.scenario_count = run.scenarios;
        return generate_scenarios(deal, config).scenarios;
    });
    step("inbound blocks", [&] {
        in.blocks.reserve(in.scenarios.size());
        in.ep_histogram.assign(deal.exposures().size(), {0, 0, 0, 0});
        for (const auto& scn : in.scenarios) {
            in.blocks.push_back(scenario_blocks(deal, scn));
            for (std::size_t i = 0; i < deal.exposures().size(); ++i) {
                const auto flows = exposure_flows(deal, deal.exposures()[i], scn.per_exposure[i]);
                const auto ep = exposure_performance(flows, deal.tp(), f.features.inflation);
                ++in.ep_histogram[i][static_cast<std::size_t>(ep.state)];
            }
        }
        std::vector<Series> sse;
        sse.reserve(in.blocks.size());
        for (const auto& b : in.blocks) sse.push_back(fitted(b.sse, static_cast<std::size_t>(deal.tp()) + 1));
        in.sse_mean = peal::sse_mean(sse);
        return 0;
    });
    return in;
}

Candidate candidate_of(const DealFile& f) { return {f.design, f.frequencies, f.endowment}; }

Evaluation evaluate(const DealFile& f, const InboundSet& inbound, const Candidate& c, double alpha, bool keep_ndm) {
    const Deal& deal = *f.deal;
    const Month tp = deal.tp();
    const std::size_t S = inbound.blocks.size();
    Evaluation ev;
    const Series& zs = c.endowment.scenario.empty() ? c.endowment.base : c.endowment.scenario;

    std::vector<Series> tafs;
    step("tranching", [&] {
        ev.icf = icf(inbound.blocks.front().ga, c.endowment.base, tp);
        std::vector<Series> tnl;
        tafs.reserve(S);
        tnl.reserve(S);
        for (const auto& b : inbound.blocks) {
            tafs.push_back(taf(b, zs, tp));
            tnl.push_back(total_net_loss(ev.icf, tafs.back(), b.sse));
        }
        ev.tranching = tranche(tnl, ev.icf, alpha);
        ev.margin = substantial_margin(tnl, ev.tranching.flt);
        return 0;
    });

    step("design", [&] {
        const auto errors = validate_design(c.design);
        if (!errors.empty()) throw std::invalid_argument(errors.front().rule + " at " + errors.front().location + ": " +
                                                         errors.front().detail);
        ev.positions = evaluate_design(c.design, ev.tranching, inbound.sse_mean);
        return 0;
    });

    step("gross dimensioning", [&] {
        for (auto& v : validate_frequencies(c.design, c.frequencies, tp)) {
            if (v.rule == "frequencies" || v.rule == "alignment") throw std::invalid_argument(v.detail);
            ev.compliance.frequency.push_back(std::move(v));
        }
        ev.gross = gross_dimension(c.design, ev.positions, c.frequencies);
        ev.compliance.gcheck = g_check(ev.gross, c.design, c.frequencies);
        return 0;
    });

    step("net dimensioning", [&] {
        ev.nn_by_note.assign(ev.gross.gn.size(), {});
        for (auto& v : ev.nn_by_note) v.reserve(S);
        for (std::size_t s = 0; s < S; ++s) {
            const auto a = allocate(tafs[s], ev.gross, c.design, inbound.blocks[s].buffer);
            accumulate(ev.ndm_mean, a.matrix.ndm);
            accumulate(ev.nc_mean, a.positions.nc);
            accumulate(ev.nn_mean, a.positions.nn);
            accumulate(ev.lc_mean, a.positions.lc);
            accumulate(ev.ln_mean, a.positions.ln);
            for (std::size_t y = 0; y < a.positions.nn.size(); ++y) ev.nn_by_note[y].push_back(a.positions.nn[y]);
            if (keep_ndm) ev.ndm_by_scenario.push_back(a.matrix.ndm);
        }
        for (auto* m : {&ev.ndm_mean, &ev.nc_mean, &ev.nn_mean, &ev.lc_mean, &ev.ln_mean}) divide(*m, S);
        return 0;
    });

    step("features", [&] {
        if (c.design.horizontal_only()) ev.regulatory = thickness_regulatory(ev.gross.gh, c.design);
        ev.thickness = thickness_peal(ev.gross);
        ev.rcn = regulatory_capital(c.design, ev.gross, f.features.risk_weights, f.features.car);
        try {
            ev.cva = cva(ev.gross, ev.nc_mean, ev.nn_mean, c.design);
            if (ev.cva->crossing) {
                ev.compliance.cva = "crossing";
                std::string pairs;
                for (const auto& p : ev.cva->crossings) pairs += (pairs.empty() ? "" : " ") + p;
                ev.compliance.cva_detail = "curves cross: " + pairs;
            }
        } catch (const std::domain_error& e) {
            ev.compliance.cva = "undefined";
            ev.compliance.cva_detail = e.what();
        }
        double fvy0 = 0.0;
        for (const auto& set : ev.nn_by_note) {
            ev.fair_values.push_back(fair_value(set, f.features.inflation));
            fvy0 += ev.fair_values.back().mean.empty() ? 0.0 : ev.fair_values.back().mean.front();
        }
        ev.c0 = static_cast<double>(deal.total_capital());
        ev.cy0 = initial_note_price(ev.c0, fvy0);
        const std::size_t Y = ev.gross.gn.size();
        ev.cpy = f.features.price_split.empty() ? std::vector<double>(Y, 1.0 / static_cast<double>(Y))
                                                : f.features.price_split;
        ev.irr = gross_net_irr(ev.gross.gn, ev.nn_mean, ev.cy0, ev.cpy);
        return 0;
    });
    return ev;
}

ReportSet render_reports(const DealFile& f, const ResolvedRun& run, const InboundSet& inbound, const Evaluation& ev) {
    ReportSet out;
    const Deal& deal = *f.deal;
    const std::size_t n = ev.icf.size();
    const auto& d = f.design;

    out["tranching.csv"] = tranching_to_csv(ev.tranching);
    json summary = {{"alpha", run.alpha},
                    {"scenarios", run.scenarios},
                    {"seed", run.seed},
                    {"icf_total", sum(ev.icf)},
                    {"flt_total", sum(ev.tranching.flt)},
                    {"slt_total", sum(ev.tranching.slt)},
                    {"clt_total", sum(ev.tranching.clt)},
                    {"substantial_margin",
                     {{"tflt", ev.margin.tflt},
                      {"sigma", ev.margin.sigma},
                      {"sm", ev.margin.sm},
                      {"applicable", ev.margin.applicable},
                      {"pass", ev.margin.pass}}}};
    out["tranching_summary.json"] = summary.dump(2) + "\n";
    out["gdm.csv"] = gdm_to_csv(ev.gross.gh);

    {
        std::vector<std::pair<std::string, const std::vector<double>*>> cols;
        for (std::size_t j = 0; j < ev.ndm_mean.size(); ++j) cols.emplace_back(fmt::format("NDM{}", j + 1), &ev.ndm_mean[j]);
        out["ndm_mean.csv"] = table_csv(cols, n);
    }

    std::vector<std::vector<double>> gc, gn;
    for (const auto& s : ev.gross.gc) gc.push_back(to_double(s));
    for (const auto& s : ev.gross.gn) gn.push_back(to_double(s));
    {
        std::vector<std::pair<std::string, const std::vector<double>*>> cols;
        for (std::size_t x = 0; x < gc.size(); ++x) {
            cols.emplace_back(fmt::format("GC{}", x + 1), &gc[x]);
            cols.emplace_back(fmt::format("NC{}", x + 1), &ev.nc_mean[x]);
            cols.emplace_back(fmt::format("LC{}", x + 1), &ev.lc_mean[x]);
        }
        for (std::size_t y = 0; y < gn.size(); ++y) {
            cols.emplace_back(fmt::format("GN{}", y + 1), &gn[y]);
            cols.emplace_back(fmt::format("NN{}", y + 1), &ev.nn_mean[y]);
            cols.emplace_back(fmt::format("LN{}", y + 1), &ev.ln_mean[y]);
        }
        out["positions.csv"] = table_csv(cols, n);
    }

    if (ev.cva) {
        std::vector<std::pair<std::string, const std::vector<double>*>> cols;
        for (std::size_t x = 0; x < ev.cva->cost.size(); ++x) cols.emplace_back(fmt::format("CVAC{}", x + 1), &ev.cva->cost[x]);
        for (std::size_t y = 0; y < ev.cva->note.size(); ++y) cols.emplace_back(fmt::format("CVAN{}", y + 1), &ev.cva->note[y]);
        out["cva.csv"] = table_csv(cols, n);
    } else {
        out["cva.csv"] = "t\n";
    }

    std::vector<std::vector<double>> thc, thn, ob, th;
    for (const auto& s : ev.thickness.thc) thc.push_back(to_double(s));
    for (const auto& s : ev.thickness.thn) thn.push_back(to_double(s));
    if (ev.regulatory) {
        for (const auto& s : ev.regulatory->ob) ob.push_back(to_double(s));
        for (const auto& s : ev.regulatory->th) th.push_back(to_double(s));
    }
    {
        std::vector<std::pair<std::string, const std::vector<double>*>> cols;
        for (std::size_t x = 0; x < thc.size(); ++x) cols.emplace_back(fmt::format("THC{}", x + 1), &thc[x]);
        for (std::size_t y = 0; y < thn.size(); ++y) cols.emplace_back(fmt::format("THN{}", y + 1), &thn[y]);
        for (std::size_t p = 0; p < ob.size(); ++p) cols.emplace_back(fmt::format("OB{}", p + 1), &ob[p]);
        for (std::size_t p = 0; p < th.size(); ++p) cols.emplace_back(fmt::format("TH{}", p + 1), &th[p]);
        for (std::size_t y = 0; y < ev.rcn.size(); ++y) cols.emplace_back(fmt::format("RCN{}", y + 1), &ev.rcn[y]);
        out["thickness.csv"] = table_csv(cols, n);
    }

    {
        std::vector<std::pair<std::string, const std::vector<double>*>> cols;
        for (std::size_t y = 0; y < ev.fair_values.size(); ++y)
            cols.emplace_back(fmt::format("FVY{}", y + 1), &ev.fair_values[y].mean);
        out["fair_value.csv"] = table_csv(cols, n);
        std::vector<std::vector<double>> q;
        for (const auto& fv : ev.fair_values) q.push_back(quantile_function(fv, 101));
        std::string csv = "p";
        for (std::size_t y = 0; y < q.size(); ++y) csv += fmt::format(",FVY{}", y + 1);
        csv += '\n';
        for (int k = 0; k <= 100; ++k) {
            csv += num(k / 100.0);
            for (const auto& col : q) csv += "," + num(col.empty() ? 0.0 : col[static_cast<std::size_t>(k)]);
            csv += '\n';
        }
        out["fv_quantiles.csv"] = csv;
    }

    json ep = json::array();
    for (std::size_t i = 0; i < deal.exposures().size(); ++i) {
        const auto& e = deal.exposures()[i];
        const auto& h = inbound.ep_histogram[i];
        json states = json::object();
        for (std::size_t s = 0; s < h.size(); ++s) states[std::string(state_name(static_cast<PerformanceState>(s)))] = h[s];
        ep.push_back({{"k", e.portfolio}, {"n", e.index}, {"states", states}});
    }
    json notes = json::array();
    for (std::size_t y = 0; y < ev.irr.size(); ++y) {
        const auto& fv = ev.fair_values[y];
        notes.push_back({{"note", fmt::format("N{}", y + 1)},
                         {"quality", std::string(quality_code(d.quality_of_vc(d.notes[y].front())))},
                         {"price", ev.irr[y].price},
                         {"price_share", ev.cpy[y]},
                         {"fvy0_mean", fv.mean.empty() ? 0.0 : fv.mean.front()},
                         {"price_quantile", price_quantile(fv, ev.irr[y].price)},
                         {"girr", irr_json(ev.irr[y].gross)},
                         {"nirr", irr_json(ev.irr[y].net)},
                         {"rcn0", ev.rcn[y].empty() ? 0.0 : ev.rcn[y].front()}});
    }
    json verdicts = {{"frequency", {{"pass", ev.compliance.frequency_pass()},
                                    {"violations", violations_to_json(ev.compliance.frequency)}}},
                     {"g_check", {{"pass", ev.compliance.gcheck.pass},
                                  {"violations", violations_to_json(ev.compliance.gcheck.failures)}}},
                     {"cva", {{"status", ev.compliance.cva},
                              {"pass", ev.compliance.cva_pass()},
                              {"detail", ev.compliance.cva_detail},
                              {"ordered", ev.cva ? json(ev.cva->ordered) : json(nullptr)},
                              {"crossings", ev.cva ? json(ev.cva->crossings) : json::array()}}},
                     {"pass", ev.compliance.pass()}};
    json features = {{"inflation", f.features.inflation},
                     {"car", f.features.car},
                     {"c0", ev.c0},
                     {"cy0", ev.cy0},
                     {"exposure_performance", ep},
                     {"notes", notes},
                     {"positions",
                      {{"nc_mean", matrix_json(ev.nc_mean)},
                       {"nn_mean", matrix_json(ev.nn_mean)},
                       {"lc_mean", matrix_json(ev.lc_mean)},
                       {"ln_mean", matrix_json(ev.ln_mean)}}},
                     {"regulatory_thickness", ev.regulatory.has_value()},
                     {"compliance", verdicts}};
    out["features.json"] = features.dump(2) + "\n";
    out["compliance.json"] = verdicts.dump(2) + "\n";
    return out;
}

std::string render_audit_scenarios(const DealFile& f, const ResolvedRun& run, const InboundSet& inbound) {
    ScenarioSet set;
    set.config = f.generator;
    set.config.master_seed = run.seed;
    set.scenarios = inbound.scenarios;
    return scenarios_to_csv(set);
}

std::string run_id(const DealFile& f, const ResolvedRun& run) {
    const auto deal_hash = sha256_hex(to_json(f).dump());
    const auto key = fmt::format("{}|{}|{}|{}|{}|{}", deal_hash, run.seed, run.scenarios, num(run.alpha),
                                 run.explicit_scenarios, kEngineVersion);
    return sha256_hex(key).substr(0, 16);
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("PEAL_OUT_DIR"); env && *env) return env;
    return "peal_out";
}

RunRecord persist_run(const std::filesystem::path& out_root, const DealFile& f, const ResolvedRun& run,
                      const ReportSet& reports, bool compliant) {
    RunRecord r;
    r.id = run_id(f, run);
    r.deal_hash = sha256_hex(to_json(f).dump());
    r.seed = run.seed;
    r.scenarios = run.scenarios;
    r.dir = out_root / "runs" / r.id;
    r.compliant = compliant;
    for (const auto& [name, content] : reports) {
        write_file(r.dir / name, content);
        r.digests[name] = sha256_hex(content);
    }
    json manifest = {{"run_id", r.id},
                     {"deal_hash", r.deal_hash},
                     {"seed", r.seed},
                     {"scenarios", r.scenarios},
                     {"alpha", run.alpha},
                     {"engine", kEngineVersion},
                     {"digests", r.digests}};
    write_file(r.dir / "manifest.json", manifest.dump(2) + "\n");
    write_file(r.dir / "deal.json", to_json(f).dump(2) + "\n");
    json meta = {{"run_id", r.id}, {"finished_at", utc_now()}, {"status", "done"}, {"compliant", compliant}};
    write_file(r.dir / "run.json", meta.dump(2) + "\n");
    return r;
}

PipelineResult run_pipeline(const DealFile& f, const RunOptions& o, const std::filesystem::path& out_root) {
    PipelineResult result;
    const auto notify = [&](const char* stage) {
        if (o.on_step) o.on_step(stage);
    };
    result.run = resolve(f, o);
    notify("inbound");
    const auto inbound = build_inbound(f, result.run);
    ReportSet extra;
    Candidate chosen = candidate_of(f);
    if (f.optimization) {
        notify("optimization");
        const auto opt = step("optimization", [&] { return optimize(f, inbound, *f.optimization, result.run.alpha); });
        extra["optimization_trace.csv"] = trace_to_csv(opt);
        extra["optimization.json"] = optimization_summary(opt).dump(2) + "\n";
        if (opt.found) chosen = opt.best;
    }
    DealFile effective = f;
    effective.design = chosen.design;
    effective.frequencies = chosen.frequencies;
    effective.endowment = chosen.endowment;
    notify("evaluation");
    result.evaluation = evaluate(effective, inbound, chosen, result.run.alpha, o.audit);
    notify("reports");
    auto reports = render_reports(effective, result.run, inbound, result.evaluation);
    reports.merge(extra);
    if (o.audit) {
        reports["audit/scenarios.csv"] = render_audit_scenarios(f, result.run, inbound);
        for (std::size_t s = 0; s < inbound.blocks.size(); ++s) {
            const int id = inbound.scenarios[s].id;
            reports[fmt::format("audit/blocks_{:06d}.csv", id)] = blocks_to_csv(inbound.blocks[s]);
            reports[fmt::format("audit/ndm_{:06d}.csv", id)] = ndm_to_csv(result.evaluation.ndm_by_scenario[s]);
        }
    }
    result.record = persist_run(out_root, f, result.run, reports, result.evaluation.compliance.pass());
    return result;
}

}  // namespace peal
