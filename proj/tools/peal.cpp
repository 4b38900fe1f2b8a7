#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "peal/deal_io.hpp"
#include "peal/pipeline.hpp"
#include "peal/service.hpp"

namespace {

struct Flags {
    std::string deal;
    std::optional<std::uint64_t> seed;
    std::optional<int> scenarios;
    std::optional<double> alpha;
    bool enforce = false;
    bool audit = false;
    std::string out_dir;
    std::string run;
    std::string file;
    std::string host = "127.0.0.1";
    int port = 8080;
};

std::filesystem::path out_root(const Flags& f) {
    return f.out_dir.empty() ? peal::default_out_dir() : std::filesystem::path(f.out_dir);
}

std::optional<peal::DealFile> load(const Flags& f) {
    auto parsed = peal::parse_deal_file(f.deal);
    if (!parsed.ok()) {
        std::cerr << peal::violations_to_json(parsed.errors).dump(2) << "\n";
        return std::nullopt;
    }
    return std::move(parsed.deal);
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_verb(const Flags& flags, const std::string& verb) {
    const auto deal = load(flags);
    if (!deal) return 1;
    if (verb == "optimize" && !deal->optimization) {
        std::cerr << "deal has no optimization block\n";
        return 1;
    }
    peal::RunOptions options;
    options.seed = flags.seed;
    options.scenarios = flags.scenarios;
    options.alpha = flags.alpha;
    options.audit = flags.audit;
    peal::PipelineResult result;
    try {
        result = peal::run_pipeline(*deal, options, out_root(flags));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const auto& dir = result.record.dir;
    if (verb == "tranche") {
        std::cout << read_text(dir / "tranching.csv");
    } else if (verb == "features") {
        std::cout << read_text(dir / "features.json");
    } else if (verb == "optimize") {
        std::cout << read_text(dir / "optimization.json");
    } else {
        std::cout << fmt::format("run {}\ndir {}\nscenarios {}\nseed {}\n", result.record.id, dir.string(),
                                 result.record.scenarios, result.record.seed);
    }
    const auto& c = result.evaluation.compliance;
    std::cerr << fmt::format("compliance: frequency {}, g-check {}, cva {}\n", c.frequency_pass() ? "pass" : "fail",
                             c.gcheck.pass ? "pass" : "fail", c.cva);
    if (flags.enforce && !c.pass()) {
        for (const auto& v : c.violations()) std::cerr << fmt::format("  {} at {}: {}\n", v.rule, v.location, v.detail);
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PEAL securitization structuring engine"};
    app.require_subcommand(1);
    Flags flags;

    auto add_deal = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--deal", flags.deal, "deal file (JSON)")->check(CLI::ExistingFile);
        if (required) opt->required();
    };
    auto add_run_flags = [&](CLI::App* cmd) {
        add_deal(cmd, true);
        cmd->add_option("--seed", flags.seed, "master seed");
        cmd->add_option("--scenarios", flags.scenarios, "scenario count");
        cmd->add_option("--alpha", flags.alpha, "tranching confidence level");
        cmd->add_flag("--enforce", flags.enforce, "exit nonzero when a compliance verdict fails");
        cmd->add_flag("--audit", flags.audit, "also write scenario, block and NDM dumps");
        cmd->add_option("--out-dir", flags.out_dir, "output root (default $PEAL_OUT_DIR or ./peal_out)");
    };

    auto* validate = app.add_subcommand("validate", "check a deal file");
    add_deal(validate, true);
    std::map<std::string, CLI::App*> runs;
    runs["simulate"] = app.add_subcommand("simulate", "run the full pipeline and write reports");
    runs["tranche"] = app.add_subcommand("tranche", "run and print the tranching table");
    runs["features"] = app.add_subcommand("features", "run and print the feature report");
    runs["optimize"] = app.add_subcommand("optimize", "run the optimization block");
    for (auto& [_, cmd] : runs) add_run_flags(cmd);
    auto* serve = app.add_subcommand("serve", "start the HTTP service");
    add_deal(serve, false);
    serve->add_option("--host", flags.host);
    serve->add_option("--port", flags.port);
    serve->add_option("--out-dir", flags.out_dir);
    auto* report = app.add_subcommand("report", "print a stored run report");
    report->add_option("--run", flags.run, "run id")->required();
    report->add_option("--file", flags.file, "report file name (default manifest.json)");
    report->add_option("--out-dir", flags.out_dir);

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) {
        auto parsed = peal::parse_deal_file(flags.deal);
        if (!parsed.ok()) {
            std::cout << peal::violations_to_json(parsed.errors).dump(2) << "\n";
            return 1;
        }
        const auto& d = *parsed.deal;
        std::cout << fmt::format("valid: K={} N={} TP={} H={} V={} X={} Y={}\n", d.deal->portfolios().size(),
                                 d.deal->exposures().size(), d.deal->tp(), d.design.horizontal_count(),
                                 d.design.vertical_count(), d.design.cost_count(), d.design.note_count());
        return 0;
    }
    for (const auto& [verb, cmd] : runs)
        if (cmd->parsed()) return run_verb(flags, verb);
    if (serve->parsed()) {
        std::optional<peal::DealFile> deal;
        if (!flags.deal.empty()) {
            deal = load(flags);
            if (!deal) return 1;
        }
        peal::Service service(out_root(flags), std::move(deal));
        std::cerr << fmt::format("listening on {}:{}\n", flags.host, flags.port);
        return service.listen(flags.host, flags.port) ? 0 : 1;
    }
    if (report->parsed()) {
        const auto dir = out_root(flags) / "runs" / flags.run;
        const auto path = dir / (flags.file.empty() ? "manifest.json" : flags.file);
        if (!std::filesystem::exists(path)) {
            std::cerr << fmt::format("no such report: {}\n", path.string());
            return 1;
        }
        std::cout << read_text(path);
        return 0;
    }
    return 0;
}
