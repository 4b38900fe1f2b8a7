#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peal/deal_io.hpp"
#include "peal/gross.hpp"

namespace peal {

inline constexpr const char* kEngineVersion = "peal-engine 1.0.0";

// A module failure tagged with the pipeline step that raised it.
struct StepError : std::runtime_error {
    std::string step;
    StepError(std::string s, const std::string& what)
        : std::runtime_error(s + ": " + what), step(std::move(s)) {}
};

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> scenarios;
    std::optional<double> alpha;
    bool audit = false;
    std::function<void(const std::string&)> on_step;  // called as each stage starts
};

struct ResolvedRun {
    std::uint64_t seed = 0;
    int scenarios = 0;
    double alpha = 0.99;
    bool explicit_scenarios = false;
};

ResolvedRun resolve(const DealFile& f, const RunOptions& o);

// Scenario set and inbound blocks; independent of the waterfall design.
struct InboundSet {
    std::vector<Scenario> scenarios;
    std::vector<ScenarioBlocks> blocks;
    std::vector<std::array<int, 4>> ep_histogram;  // per exposure, indexed by PerformanceState
    Series sse_mean;                               // months 0..TP
};

InboundSet build_inbound(const DealFile& f, const ResolvedRun& run);

// The design-dependent part of a deal.
struct Candidate {
    WaterfallDesign design;
    FrequencySchedule frequencies;
    Endowment endowment;
};

Candidate candidate_of(const DealFile& f);

struct Compliance {
    std::vector<Violation> frequency;  // vertical, multiple, horizontal rules
    GCheck gcheck;
    std::string cva = "pass";  // pass, crossing or undefined
    std::string cva_detail;

    bool frequency_pass() const { return frequency.empty(); }
    bool cva_pass() const { return cva != "crossing"; }
    bool pass() const { return frequency_pass() && gcheck.pass && cva_pass(); }
    std::vector<Violation> violations() const;
};

struct Evaluation {
    Series icf;
    Tranching tranching;
    SubstantialMargin margin;
    DesignSeries positions;
    GrossDimensioning gross;

    // Scenario means of the net dimensioning.
    std::vector<std::vector<double>> ndm_mean;
    std::vector<std::vector<double>> nc_mean;
    std::vector<std::vector<double>> nn_mean;
    std::vector<std::vector<double>> lc_mean;
    std::vector<std::vector<double>> ln_mean;
    std::vector<std::vector<Series>> nn_by_note;  // [note][scenario]
    std::vector<std::vector<Series>> ndm_by_scenario;  // kept only on request

    std::optional<RegulatoryThickness> regulatory;
    PealThickness thickness;
    std::vector<std::vector<double>> rcn;
    std::optional<CvaReport> cva;
    std::vector<FairValue> fair_values;
    double c0 = 0.0;
    double cy0 = 0.0;
    std::vector<double> cpy;
    std::vector<NoteIrr> irr;

    Compliance compliance;
};

// Tranching through features on a fixed inbound set. Throws StepError.
Evaluation evaluate(const DealFile& f, const InboundSet& inbound, const Candidate& c, double alpha,
                    bool keep_ndm = false);

// File name to content, in a fixed order.
using ReportSet = std::map<std::string, std::string>;

ReportSet render_reports(const DealFile& f, const ResolvedRun& run, const InboundSet& inbound,
                         const Evaluation& ev);
std::string render_audit_scenarios(const DealFile& f, const ResolvedRun& run, const InboundSet& inbound);

// Content address of a run: deal content, seed, scenario count, alpha and engine version.
std::string run_id(const DealFile& f, const ResolvedRun& run);

std::filesystem::path default_out_dir();

struct RunRecord {
    std::string id;
    std::string deal_hash;
    std::uint64_t seed = 0;
    int scenarios = 0;
    std::filesystem::path dir;
    std::map<std::string, std::string> digests;  // file name to sha256
    bool compliant = true;
};

// Writes the reports, a digest manifest and run.json (timestamps; not digested).
RunRecord persist_run(const std::filesystem::path& out_root, const DealFile& f, const ResolvedRun& run,
                      const ReportSet& reports, bool compliant);

struct PipelineResult {
    RunRecord record;
    ResolvedRun run;
    Evaluation evaluation;
};

// Full run: inbound, evaluation, optional optimization, reports on disk.
PipelineResult run_pipeline(const DealFile& f, const RunOptions& o, const std::filesystem::path& out_root);

}  // namespace peal
