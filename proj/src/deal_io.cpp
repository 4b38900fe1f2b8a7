#include "peal/deal_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "peal/gross.hpp"

namespace peal {

using nlohmann::json;

namespace {

struct SchemaError : std::runtime_error {
    std::string location;
    SchemaError(std::string where, const std::string& what) : std::runtime_error(what), location(std::move(where)) {}
};

const json& field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + "/" + key, "required field missing");
    return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

long long integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw SchemaError(where, "expected an integer");
    return v.get<long long>();
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where, "expected a number");
    return v.get<double>();
}

bool boolean(const json& v, const std::string& where) {
    if (!v.is_boolean()) throw SchemaError(where, "expected a boolean");
    return v.get<bool>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) throw SchemaError(where, "expected a string");
    return v.get<std::string>();
}

const json& array(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where, "expected an array");
    return v;
}

Series amounts(const json& v, const std::string& where) {
    Series out;
    for (std::size_t i = 0; i < array(v, where).size(); ++i)
        out.push_back(integer(v[i], fmt::format("{}/{}", where, i)));
    return out;
}

std::vector<int> ints(const json& v, const std::string& where) {
    std::vector<int> out;
    for (std::size_t i = 0; i < array(v, where).size(); ++i)
        out.push_back(static_cast<int>(integer(v[i], fmt::format("{}/{}", where, i))));
    return out;
}

std::vector<double> numbers(const json& v, const std::string& where) {
    std::vector<double> out;
    for (std::size_t i = 0; i < array(v, where).size(); ++i) out.push_back(number(v[i], fmt::format("{}/{}", where, i)));
    return out;
}

// Either a plain list of shares or a list of {from, values} steps.
PercentTable percent_table(const json& v, const std::string& where) {
    if (v.is_null()) return {};
    array(v, where);
    if (v.empty() || v.front().is_number()) return PercentTable::constant(numbers(v, where));
    PercentTable table;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto at = fmt::format("{}/{}", where, i);
        table.steps.push_back({static_cast<Month>(integer(field(v[i], "from", at), at + "/from")),
                               numbers(field(v[i], "values", at), at + "/values")});
    }
    return table;
}

json percent_table_json(const PercentTable& t) {
    if (t.steps.empty()) return nullptr;
    if (t.steps.size() == 1 && t.steps.front().from == 0) return t.steps.front().values;
    json out = json::array();
    for (const auto& s : t.steps) out.push_back({{"from", s.from}, {"values", s.values}});
    return out;
}

std::vector<DatedAmount> dated_amounts(const json& v, const std::string& where) {
    std::vector<DatedAmount> out;
    for (std::size_t i = 0; i < array(v, where).size(); ++i) {
        const auto at = fmt::format("{}/{}", where, i);
        out.push_back({static_cast<Month>(integer(field(v[i], "month", at), at + "/month")),
                       integer(field(v[i], "amount", at), at + "/amount")});
    }
    return out;
}

json dated_amounts_json(const std::vector<DatedAmount>& v) {
    json out = json::array();
    for (const auto& d : v) out.push_back({{"month", d.month}, {"amount", d.amount}});
    return out;
}

Quality quality_from(const std::string& code, const std::string& where) {
    if (code == "SN") return Quality::Senior;
    if (code == "MZ") return Quality::Mezzanine;
    if (code == "JR") return Quality::Junior;
    throw SchemaError(where, "quality must be SN, MZ or JR");
}

GeneratorConfig parse_generator(const json& g, const std::string& where) {
    GeneratorConfig c;
    if (const auto* v = optional_field(g, "master_seed"))
        c.master_seed = static_cast<std::uint64_t>(integer(*v, where + "/master_seed"));
    if (const auto* v = optional_field(g, "scenarios")) c.scenario_count = static_cast<int>(integer(*v, where + "/scenarios"));
    if (const auto* v = optional_field(g, "allow_extreme")) c.allow_extreme = boolean(*v, where + "/allow_extreme");
    if (const auto* v = optional_field(g, "excessive_costs")) c.excessive_costs = dated_amounts(*v, where + "/excessive_costs");
    if (const auto* clusters = optional_field(g, "clusters")) {
        if (!clusters->is_object()) throw SchemaError(where + "/clusters", "expected an object");
        for (const auto& [name, body] : clusters->items()) {
            const auto at = where + "/clusters/" + name;
            ClusterProfile p;
            if (const auto* v = optional_field(body, "default_correlation"))
                p.default_correlation = number(*v, at + "/default_correlation");
            const auto& events = array(field(body, "events", at), at + "/events");
            for (std::size_t i = 0; i < events.size(); ++i) {
                const auto ev = fmt::format("{}/events/{}", at, i);
                EventRate r;
                r.code = text(field(events[i], "code", ev), ev + "/code");
                r.monthly_hazard = number(field(events[i], "monthly_hazard", ev), ev + "/monthly_hazard");
                if (const auto* v = optional_field(events[i], "recovery_fraction"))
                    r.recovery_fraction = number(*v, ev + "/recovery_fraction");
                if (const auto* v = optional_field(events[i], "recovery_lag"))
                    r.recovery_lag = static_cast<Month>(integer(*v, ev + "/recovery_lag"));
                if (const auto* v = optional_field(events[i], "cost_fraction"))
                    r.cost_fraction = number(*v, ev + "/cost_fraction");
                if (const auto* v = optional_field(events[i], "factor")) r.factor = number(*v, ev + "/factor");
                if (const auto* v = optional_field(events[i], "delay"))
                    r.delay = static_cast<Month>(integer(*v, ev + "/delay"));
                p.events.push_back(std::move(r));
            }
            c.clusters[name] = std::move(p);
        }
    }
    return c;
}

json generator_json(const GeneratorConfig& c) {
    json clusters = json::object();
    for (const auto& [name, p] : c.clusters) {
        json events = json::array();
        for (const auto& r : p.events)
            events.push_back({{"code", r.code},
                              {"monthly_hazard", r.monthly_hazard},
                              {"recovery_fraction", r.recovery_fraction},
                              {"recovery_lag", r.recovery_lag},
                              {"cost_fraction", r.cost_fraction},
                              {"factor", r.factor},
                              {"delay", r.delay}});
        clusters[name] = {{"default_correlation", p.default_correlation}, {"events", events}};
    }
    return {{"master_seed", c.master_seed},
            {"scenarios", c.scenario_count},
            {"allow_extreme", c.allow_extreme},
            {"clusters", clusters},
            {"excessive_costs", dated_amounts_json(c.excessive_costs)}};
}

EventOccurrence parse_occurrence(const json& o, const std::string& at) {
    EventOccurrence occ;
    occ.code = text(field(o, "code", at), at + "/code");
    occ.exposure.k = static_cast<int>(integer(field(o, "k", at), at + "/k"));
    occ.exposure.n = static_cast<int>(integer(field(o, "n", at), at + "/n"));
    occ.time = static_cast<Month>(integer(field(o, "t", at), at + "/t"));
    if (const auto* v = optional_field(o, "capital_time")) occ.capital_time = static_cast<Month>(integer(*v, at + "/capital_time"));
    if (const auto* v = optional_field(o, "interest_time"))
        occ.interest_time = static_cast<Month>(integer(*v, at + "/interest_time"));
    if (const auto* v = optional_field(o, "amount")) occ.amount = integer(*v, at + "/amount");
    if (const auto* v = optional_field(o, "arrival")) occ.arrival = static_cast<Month>(integer(*v, at + "/arrival"));
    if (const auto* v = optional_field(o, "factor")) occ.factor = number(*v, at + "/factor");
    if (const auto* v = optional_field(o, "delay")) occ.delay = static_cast<Month>(integer(*v, at + "/delay"));
    if (const auto* v = optional_field(o, "recovery_costs")) occ.recovery_costs = dated_amounts(*v, at + "/recovery_costs");
    try {
        event_kind(occ.code);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(at + "/code", e.what());
    }
    return occ;
}

json occurrence_json(const EventOccurrence& occ) {
    json o = {{"code", occ.code}, {"k", occ.exposure.k}, {"n", occ.exposure.n}, {"t", occ.time}};
    if (occ.capital_time) o["capital_time"] = *occ.capital_time;
    if (occ.interest_time) o["interest_time"] = *occ.interest_time;
    if (occ.amount) o["amount"] = *occ.amount;
    if (occ.arrival) o["arrival"] = *occ.arrival;
    if (occ.factor != 0.0) o["factor"] = occ.factor;
    if (occ.delay != 0) o["delay"] = occ.delay;
    if (!occ.recovery_costs.empty()) o["recovery_costs"] = dated_amounts_json(occ.recovery_costs);
    return o;
}

WaterfallDesign parse_design(const json& d, const std::string& where) {
    WaterfallDesign w;
    w.hs = ints(field(d, "hs", where), where + "/hs");
    w.vs = ints(field(d, "vs", where), where + "/vs");
    if (const auto* h = optional_field(d, "h"))
        for (std::size_t i = 0; i < array(*h, where + "/h").size(); ++i)
            w.h.push_back(percent_table((*h)[i], fmt::format("{}/h/{}", where, i)));
    if (const auto* v = optional_field(d, "v"))
        for (std::size_t i = 0; i < array(*v, where + "/v").size(); ++i)
            w.v.push_back(percent_table((*v)[i], fmt::format("{}/v/{}", where, i)));
    const auto& costs = array(field(d, "costs", where), where + "/costs");
    for (std::size_t i = 0; i < costs.size(); ++i) w.costs.push_back(ints(costs[i], fmt::format("{}/costs/{}", where, i)));
    const auto& notes = array(field(d, "notes", where), where + "/notes");
    for (std::size_t i = 0; i < notes.size(); ++i) w.notes.push_back(ints(notes[i], fmt::format("{}/notes/{}", where, i)));
    return w;
}

json design_json(const WaterfallDesign& w) {
    json h = json::array();
    for (const auto& t : w.h) h.push_back(percent_table_json(t));
    json v = json::array();
    for (const auto& t : w.v) v.push_back(percent_table_json(t));
    return {{"hs", w.hs}, {"h", h}, {"vs", w.vs}, {"v", v}, {"costs", w.costs}, {"notes", w.notes}};
}

OptimizationSpec parse_optimization(const json& o, const std::string& where) {
    OptimizationSpec s;
    if (const auto* v = optional_field(o, "objective")) s.objective = text(*v, where + "/objective");
    if (const auto* v = optional_field(o, "z_max")) s.z_max = number(*v, where + "/z_max");
    if (const auto* v = optional_field(o, "grid_points")) s.grid_points = static_cast<int>(integer(*v, where + "/grid_points"));
    if (const auto* v = optional_field(o, "rounds")) s.rounds = static_cast<int>(integer(*v, where + "/rounds"));
    if (const auto* v = optional_field(o, "budget")) s.budget = static_cast<int>(integer(*v, where + "/budget"));
    if (const auto* v = optional_field(o, "percents")) {
        for (std::size_t i = 0; i < array(*v, where + "/percents").size(); ++i) {
            const auto at = fmt::format("{}/percents/{}", where, i);
            const auto& p = (*v)[i];
            PercentVariable var;
            const auto kind = text(field(p, "target", at), at + "/target");
            if (kind == "h") var.kind = PercentVariable::Kind::Horizontal;
            else if (kind == "v") var.kind = PercentVariable::Kind::Vertical;
            else throw SchemaError(at + "/target", "target must be \"h\" or \"v\"");
            var.component = static_cast<int>(integer(field(p, "component", at), at + "/component"));
            var.slice = static_cast<int>(integer(field(p, "slice", at), at + "/slice"));
            var.min = number(field(p, "min", at), at + "/min");
            var.max = number(field(p, "max", at), at + "/max");
            if (!(0.0 <= var.min && var.min <= var.max && var.max <= 1.0))
                throw SchemaError(at, "bounds must satisfy 0 <= min <= max <= 1");
            s.percents.push_back(var);
        }
    }
    if (const auto* v = optional_field(o, "frequency_candidates"))
        for (std::size_t i = 0; i < array(*v, where + "/frequency_candidates").size(); ++i)
            s.frequency_candidates.push_back(ints((*v)[i], fmt::format("{}/frequency_candidates/{}", where, i)));
    if (s.grid_points < 2) throw SchemaError(where + "/grid_points", "at least 2 grid points required");
    if (s.rounds < 1 || s.budget < 1) throw SchemaError(where, "rounds and budget must be positive");
    return s;
}

json optimization_json(const OptimizationSpec& s) {
    json percents = json::array();
    for (const auto& p : s.percents)
        percents.push_back({{"target", p.kind == PercentVariable::Kind::Horizontal ? "h" : "v"},
                            {"component", p.component},
                            {"slice", p.slice},
                            {"min", p.min},
                            {"max", p.max}});
    return {{"objective", s.objective},
            {"z_max", s.z_max},
            {"percents", percents},
            {"frequency_candidates", s.frequency_candidates},
            {"grid_points", s.grid_points},
            {"rounds", s.rounds},
            {"budget", s.budget}};
}

}  // namespace

ParseResult parse_deal(const json& doc) {
    ParseResult result;
    DealFile file;
    try {
        const auto version = text(field(doc, "peal_version", ""), "/peal_version");
        if (version != kDealVersion)
            throw SchemaError("/peal_version", fmt::format("unknown version '{}', expected '{}'", version, kDealVersion));
        const auto type = optional_field(doc, "type") ? text(doc["type"], "/type") : std::string("CL");
        const auto tp = static_cast<Month>(integer(field(doc, "tp", ""), "/tp"));
        const bool islamic = optional_field(doc, "islamic") ? boolean(doc["islamic"], "/islamic") : false;
        std::vector<Portfolio> portfolios;
        const auto& ps = array(field(doc, "portfolios", ""), "/portfolios");
        for (std::size_t k = 0; k < ps.size(); ++k) {
            const auto at = fmt::format("/portfolios/{}", k);
            Portfolio p;
            p.index = optional_field(ps[k], "index") ? static_cast<int>(integer(ps[k]["index"], at + "/index"))
                                                     : static_cast<int>(k) + 1;
            if (const auto* v = optional_field(ps[k], "pooling_month"))
                p.pooling = static_cast<Month>(integer(*v, at + "/pooling_month"));
            if (const auto* v = optional_field(ps[k], "cluster")) p.cluster = text(*v, at + "/cluster");
            const auto& exposures = array(field(ps[k], "exposures", at), at + "/exposures");
            for (std::size_t n = 0; n < exposures.size(); ++n) {
                const auto en = fmt::format("{}/exposures/{}", at, n);
                Exposure e;
                e.capital = amounts(field(exposures[n], "capital", en), en + "/capital");
                if (const auto* v = optional_field(exposures[n], "interest")) e.interest = amounts(*v, en + "/interest");
                p.exposures.push_back(std::move(e));
            }
            portfolios.push_back(std::move(p));
        }
        if (portfolios.empty()) throw SchemaError("/portfolios", "K >= 1 required");
        try {
            Deal deal(std::move(portfolios), tp, islamic, type);
            type_events(type);
            file.deal = std::make_shared<const Deal>(deal.normalized() ? deal : normalize_timeline(deal));
        } catch (const std::invalid_argument& e) {
            throw SchemaError("/portfolios", e.what());
        }

        if (const auto* v = optional_field(doc, "alpha")) file.alpha = number(*v, "/alpha");
        if (!(file.alpha > 0.0 && file.alpha < 1.0)) throw SchemaError("/alpha", "alpha must lie in (0,1)");
        if (const auto* z = optional_field(doc, "endowment")) {
            if (const auto* v = optional_field(*z, "base")) file.endowment.base = amounts(*v, "/endowment/base");
            if (const auto* v = optional_field(*z, "scenario")) file.endowment.scenario = amounts(*v, "/endowment/scenario");
            for (Amount a : file.endowment.base)
                if (a < 0) throw SchemaError("/endowment/base", "endowment must be non-negative");
            for (Amount a : file.endowment.scenario)
                if (a < 0) throw SchemaError("/endowment/scenario", "endowment must be non-negative");
        }
        if (const auto* g = optional_field(doc, "generator")) file.generator = parse_generator(*g, "/generator");
        if (const auto* s = optional_field(doc, "scenarios")) {
            std::vector<Scenario> scenarios;
            for (std::size_t i = 0; i < array(*s, "/scenarios").size(); ++i) {
                const auto at = fmt::format("/scenarios/{}", i);
                const auto& body = (*s)[i];
                const int id = optional_field(body, "id") ? static_cast<int>(integer(body["id"], at + "/id"))
                                                          : static_cast<int>(i) + 1;
                std::vector<EventOccurrence> occs;
                if (const auto* o = optional_field(body, "occurrences"))
                    for (std::size_t j = 0; j < array(*o, at + "/occurrences").size(); ++j)
                        occs.push_back(parse_occurrence((*o)[j], fmt::format("{}/occurrences/{}", at, j)));
                std::vector<DatedAmount> ec;
                if (const auto* v = optional_field(body, "excessive_costs")) ec = dated_amounts(*v, at + "/excessive_costs");
                try {
                    scenarios.push_back(make_scenario(*file.deal, id, std::move(occs), std::move(ec)));
                } catch (const std::exception& e) {
                    throw SchemaError(at, e.what());
                }
            }
            file.scenarios = std::move(scenarios);
        }
        file.design = parse_design(field(doc, "design", ""), "/design");
        if (const auto* v = optional_field(doc, "frequencies")) {
            file.frequencies.omega = ints(*v, "/frequencies");
        } else {
            file.frequencies = FrequencySchedule::uniform(file.design, 12);
        }
        if (const auto* f = optional_field(doc, "features")) {
            if (const auto* v = optional_field(*f, "inflation")) file.features.inflation = number(*v, "/features/inflation");
            if (const auto* v = optional_field(*f, "car")) file.features.car = number(*v, "/features/car");
            if (const auto* v = optional_field(*f, "price_split")) file.features.price_split = numbers(*v, "/features/price_split");
            if (const auto* rw = optional_field(*f, "risk_weights")) {
                for (const auto& code : {"SN", "MZ", "JR"})
                    if (const auto* v = optional_field(*rw, code))
                        file.features.risk_weights.by_quality[quality_from(code, "")] =
                            number(*v, std::string("/features/risk_weights/") + code);
                if (const auto* o = optional_field(*rw, "overrides")) {
                    if (!o->is_object()) throw SchemaError("/features/risk_weights/overrides", "expected an object");
                    for (const auto& [vc, qs] : o->items()) {
                        const auto at = "/features/risk_weights/overrides/" + vc;
                        int index = 0;
                        try {
                            index = std::stoi(vc);
                        } catch (const std::exception&) {
                            throw SchemaError(at, "keys must be VC indices");
                        }
                        if (!qs.is_object()) throw SchemaError(at, "expected an object");
                        for (const auto& [code, value] : qs.items())
                            file.features.risk_weights.by_vc[index][quality_from(code, at)] = number(value, at + "/" + code);
                    }
                }
            }
        }
        if (file.features.risk_weights.by_quality.empty())
            file.features.risk_weights.by_quality = {
                {Quality::Senior, 0.15}, {Quality::Mezzanine, 0.5}, {Quality::Junior, 1.25}};
        if (const auto* o = optional_field(doc, "optimization")) file.optimization = parse_optimization(*o, "/optimization");
    } catch (const SchemaError& e) {
        result.errors.push_back({"schema", e.location.empty() ? "/" : e.location, e.what()});
        return result;
    } catch (const json::exception& e) {
        result.errors.push_back({"schema", "/", e.what()});
        return result;
    }

    auto design_errors = validate_design(file.design);
    if (!design_errors.empty()) {
        result.errors = std::move(design_errors);
        return result;
    }
    for (auto& v : validate_frequencies(file.design, file.frequencies, file.deal->tp()))
        if (v.rule == "frequencies" || v.rule == "alignment") result.errors.push_back(std::move(v));
    if (!file.features.price_split.empty() &&
        static_cast<int>(file.features.price_split.size()) != file.design.note_count())
        result.errors.push_back({"features", "/features/price_split", "one price share per note required"});
    if (!result.errors.empty()) return result;
    result.deal = std::move(file);
    return result;
}

ParseResult parse_deal_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        ParseResult r;
        r.errors.push_back({"schema", "/", fmt::format("invalid JSON: {}", e.what())});
        return r;
    }
    return parse_deal(doc);
}

ParseResult parse_deal_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back({"io", path.string(), "cannot open deal file"});
        return r;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_deal_text(buffer.str());
}

json to_json(const DealFile& f) {
    const Deal& deal = *f.deal;
    json portfolios = json::array();
    for (const auto& p : deal.portfolios()) {
        json exposures = json::array();
        for (const auto& e : p.exposures) exposures.push_back({{"capital", e.capital}, {"interest", e.interest}});
        portfolios.push_back(
            {{"index", p.index}, {"pooling_month", p.pooling}, {"cluster", p.cluster}, {"exposures", exposures}});
    }
    json doc = {{"peal_version", kDealVersion},
                {"type", deal.type()},
                {"tp", deal.tp()},
                {"islamic", deal.islamic()},
                {"portfolios", portfolios},
                {"alpha", f.alpha},
                {"endowment", {{"base", f.endowment.base}, {"scenario", f.endowment.scenario}}},
                {"generator", generator_json(f.generator)},
                {"design", design_json(f.design)},
                {"frequencies", f.frequencies.omega}};
    json rw = json::object();
    for (const auto& [q, w] : f.features.risk_weights.by_quality) rw[std::string(quality_code(q))] = w;
    json overrides = json::object();
    for (const auto& [vc, qs] : f.features.risk_weights.by_vc)
        for (const auto& [q, w] : qs) overrides[std::to_string(vc)][std::string(quality_code(q))] = w;
    rw["overrides"] = overrides;
    doc["features"] = {{"inflation", f.features.inflation},
                       {"car", f.features.car},
                       {"risk_weights", rw},
                       {"price_split", f.features.price_split}};
    if (f.scenarios) {
        json scenarios = json::array();
        for (const auto& s : *f.scenarios) {
            json occs = json::array();
            for (const auto& list : s.per_exposure)
                for (const auto& occ : list) occs.push_back(occurrence_json(occ));
            scenarios.push_back(
                {{"id", s.id}, {"occurrences", occs}, {"excessive_costs", dated_amounts_json(s.excessive_costs)}});
        }
        doc["scenarios"] = scenarios;
    }
    if (f.optimization) doc["optimization"] = optimization_json(*f.optimization);
    return doc;
}

json violations_to_json(const std::vector<Violation>& violations) {
    json out = json::array();
    for (const auto& v : violations) out.push_back({{"rule", v.rule}, {"location", v.location}, {"detail", v.detail}});
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
    std::string out;
    for (unsigned int i = 0; i < length; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

}  // namespace peal
