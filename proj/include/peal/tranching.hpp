#pragma once

#include <span>
#include <string>
#include <vector>

#include "peal/inbound.hpp"

namespace peal {

// Optimization endowment. Empty series mean z = 0.
struct Endowment {
    Series base;      // z_b(t)
    Series scenario;  // z_s(t); defaults to z_b when empty
};

// Composite blocks are evaluated on months 0..TP.
Series icf(std::span<const Amount> gross_asset, std::span<const Amount> z_base, Month tp);
Series taf(const ScenarioBlocks& blocks, std::span<const Amount> z_scenario, Month tp);

// TL(t) = L(t) + [z_b(t) - z_s(t)] + SSE(t)
Series total_loss(const ScenarioBlocks& blocks, const Endowment& z, Month tp);
// NL(t) = L(t) - E(t)
Series net_loss(const ScenarioBlocks& blocks, Month tp);
// TNL(t) = ICF(t) - TAF(t) + SSE(t)
Series total_net_loss(std::span<const Amount> icf, std::span<const Amount> taf, std::span<const Amount> sse);

struct Tranching {
    double alpha = 0.99;
    std::vector<double> mu;  // exact scenario mean of TNL(t)
    Series var;              // VaR_alpha(t), rounded
    Series flt;
    Series slt;
    Series clt;
};

// Lower nearest rank: the 0-based order statistic used as the alpha quantile.
std::size_t quantile_rank(std::size_t scenario_count, double alpha);

Tranching tranche(std::span<const Series> tnl_set, std::span<const Amount> icf, double alpha);

struct SubstantialMargin {
    double tflt = 0.0;
    double sigma = 0.0;
    double sm = 0.0;
    bool applicable = false;
    bool pass = false;
};

SubstantialMargin substantial_margin(std::span<const Series> tnl_set, std::span<const Amount> flt);

// t,FLT,SLT,CLT,mu,VaR
std::string tranching_to_csv(const Tranching& tr);

}  // namespace peal
