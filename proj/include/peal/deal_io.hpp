#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "peal/features.hpp"
#include "peal/scenario.hpp"
#include "peal/tranching.hpp"

namespace peal {

inline constexpr const char* kDealVersion = "1.0";

struct FeatureConfig {
    double inflation = 0.02;
    double car = 0.08;
    RiskWeights risk_weights;
    std::vector<double> price_split;  // cpy per note; empty means equal shares
};

// A search variable over one percentage slice.
struct PercentVariable {
    enum class Kind { Horizontal, Vertical } kind = Kind::Vertical;
    int component = 1;  // VP index for Horizontal, HC index for Vertical
    int slice = 1;      // 1-based position inside the percentage table
    double min = 0.0;
    double max = 1.0;
};

struct OptimizationSpec {
    std::string objective = "min_tflt";
    double z_max = 0.0;  // upper bound of z_b(0) in minor units; 0 disables the variable
    std::vector<PercentVariable> percents;
    std::vector<std::vector<int>> frequency_candidates;  // per-VC frequency sets
    int grid_points = 5;
    int rounds = 3;
    int budget = 200;
};

struct DealFile {
    std::shared_ptr<const Deal> deal;
    WaterfallDesign design;
    FrequencySchedule frequencies;
    double alpha = 0.99;
    Endowment endowment;
    GeneratorConfig generator;
    // Explicit scenarios replace the generator when present.
    std::optional<std::vector<Scenario>> scenarios;
    FeatureConfig features;
    std::optional<OptimizationSpec> optimization;
};

struct ParseResult {
    std::optional<DealFile> deal;
    std::vector<Violation> errors;

    bool ok() const { return deal.has_value(); }
};

// Schema and structural validation. Frequency rules are compliance verdicts
// and are reported by the engine, not rejected here; unknown frequency values
// and misaligned periods are rejected.
ParseResult parse_deal(const nlohmann::json& doc);
ParseResult parse_deal_text(const std::string& text);
ParseResult parse_deal_file(const std::filesystem::path& path);

nlohmann::json to_json(const DealFile& deal);
nlohmann::json violations_to_json(const std::vector<Violation>& violations);

// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace peal
