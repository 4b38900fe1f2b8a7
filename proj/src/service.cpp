#include "peal/service.hpp"

#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "httplib.h"

#include "peal/pipeline.hpp"

namespace peal {

using nlohmann::json;

namespace {

struct Job {
    std::string status = "queued";  // queued, running, done, failed
    std::string stage;
    std::string error;
    std::filesystem::path dir;
    bool compliant = true;
};

void reply(httplib::Response& res, int code, const json& body) {
    res.status = code;
    res.set_content(body.dump(2), "application/json");
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// CSV with a header row and numeric cells to {columns, rows}.
json csv_to_json(const std::string& csv) {
    json out = {{"columns", json::array()}, {"rows", json::array()}};
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (header) {
            out["columns"] = cells;
            header = false;
            continue;
        }
        json row = json::array();
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                const double v = std::stod(c, &used);
                row.push_back(used == c.size() ? json(v) : json(c));
            } catch (const std::exception&) {
                row.push_back(c);
            }
        }
        out["rows"].push_back(row);
    }
    return out;
}

}  // namespace

struct Service::Impl {
    std::filesystem::path root;
    httplib::Server server;
    std::mutex mu;
    std::condition_variable idle;
    std::optional<DealFile> draft;
    std::map<std::string, Job> jobs;
    std::vector<std::thread> workers;
    int active = 0;
    std::thread listener;

    Impl(std::filesystem::path r, std::optional<DealFile> initial) : root(std::move(r)), draft(std::move(initial)) {
        routes();
    }

    std::optional<Job> lookup(const std::string& id) {
        {
            std::lock_guard lock(mu);
            if (const auto it = jobs.find(id); it != jobs.end()) return it->second;
        }
        const auto dir = root / "runs" / id;
        if (id.find_first_of("/\\.") == std::string::npos && std::filesystem::exists(dir / "manifest.json")) {
            Job j;
            j.status = "done";
            j.dir = dir;
            if (const auto meta = read_file(dir / "run.json")) {
                const auto m = json::parse(*meta, nullptr, false);
                if (m.is_object()) j.compliant = m.value("compliant", true);
            }
            return j;
        }
        return std::nullopt;
    }

    void simulate(DealFile deal, RunOptions options, const std::string& id) {
        options.on_step = [this, id](const std::string& stage) {
            std::lock_guard lock(mu);
            jobs[id].status = "running";
            jobs[id].stage = stage;
        };
        Job done;
        try {
            const auto result = run_pipeline(deal, options, root);
            done.status = "done";
            done.stage = "reports";
            done.dir = result.record.dir;
            done.compliant = result.record.compliant;
        } catch (const std::exception& e) {
            done.status = "failed";
            done.error = e.what();
        }
        std::lock_guard lock(mu);
        jobs[id] = done;
        --active;
        idle.notify_all();
    }

    void report(const httplib::Request& req, httplib::Response& res, const std::string& kind) {
        const auto id = req.matches[1].str();
        const auto job = lookup(id);
        if (!job) return reply(res, 404, {{"error", fmt::format("unknown run '{}'", id)}});
        if (job->status != "done")
            return reply(res, 409, {{"run_id", id}, {"status", job->status}, {"error", job->error}});
        auto file = [&](const char* name) { return read_file(job->dir / name).value_or(""); };
        json body = {{"run_id", id}};
        if (kind == "tranching") {
            body["summary"] = json::parse(file("tranching_summary.json"), nullptr, false);
            body["table"] = csv_to_json(file("tranching.csv"));
        } else if (kind == "features") {
            body["features"] = json::parse(file("features.json"), nullptr, false);
        } else if (kind == "ndm") {
            body["gdm"] = csv_to_json(file("gdm.csv"));
            body["ndm_mean"] = csv_to_json(file("ndm_mean.csv"));
            body["positions"] = csv_to_json(file("positions.csv"));
        } else if (kind == "cva") {
            const auto compliance = json::parse(file("compliance.json"), nullptr, false);
            const bool known = compliance.is_object() && compliance.contains("cva");
            body["verdict"] = known ? compliance["cva"]["status"] : json(nullptr);
            body["detail"] = known ? compliance["cva"] : json(nullptr);
            body["table"] = csv_to_json(file("cva.csv"));
        }
        reply(res, 200, body);
    }

    void routes() {
        server.Get("/deal", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mu);
            if (!draft) return reply(res, 404, {{"error", "no deal loaded"}});
            reply(res, 200, to_json(*draft));
        });
        server.Put("/deal", [this](const httplib::Request& req, httplib::Response& res) {
            auto parsed = parse_deal_text(req.body);
            if (!parsed.ok())
                return reply(res, 400, {{"valid", false}, {"violations", violations_to_json(parsed.errors)}});
            const auto doc = to_json(*parsed.deal);
            std::filesystem::create_directories(root);
            std::ofstream(root / "draft.json", std::ios::trunc) << doc.dump(2) << "\n";
            {
                std::lock_guard lock(mu);
                draft = std::move(parsed.deal);
            }
            reply(res, 200, {{"valid", true}, {"deal_hash", sha256_hex(doc.dump())}, {"violations", json::array()}});
        });
        server.Post("/simulate", [this](const httplib::Request& req, httplib::Response& res) {
            RunOptions options;
            if (!req.body.empty()) {
                const auto body = json::parse(req.body, nullptr, false);
                if (!body.is_object()) return reply(res, 400, {{"error", "body must be a JSON object"}});
                try {
                    if (body.contains("scenarios")) options.scenarios = body["scenarios"].get<int>();
                    if (body.contains("seed")) options.seed = body["seed"].get<std::uint64_t>();
                    if (body.contains("alpha")) options.alpha = body["alpha"].get<double>();
                } catch (const json::exception& e) {
                    return reply(res, 400, {{"error", e.what()}});
                }
            }
            std::lock_guard lock(mu);
            if (!draft) return reply(res, 409, {{"error", "no deal loaded"}});
            std::string id;
            try {
                id = run_id(*draft, resolve(*draft, options));
            } catch (const std::exception& e) {
                return reply(res, 400, {{"error", e.what()}});
            }
            if (const auto it = jobs.find(id); it != jobs.end() && it->second.status != "failed")
                return reply(res, 202, {{"run_id", id}, {"status", it->second.status}});
            jobs[id] = Job{};
            ++active;
            workers.emplace_back(&Impl::simulate, this, *draft, options, id);
            reply(res, 202, {{"run_id", id}, {"status", "queued"}});
        });
        server.Get(R"(/runs/([^/]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
            const auto id = req.matches[1].str();
            const auto job = lookup(id);
            if (!job) return reply(res, 404, {{"error", fmt::format("unknown run '{}'", id)}});
            reply(res, 200,
                  {{"run_id", id},
                   {"status", job->status},
                   {"stage", job->stage},
                   {"error", job->error},
                   {"compliant", job->status == "done" ? json(job->compliant) : json(nullptr)}});
        });
        for (const char* kind : {"tranching", "features", "ndm", "cva"}) {
            server.Get(fmt::format(R"(/runs/([^/]+)/{})", kind),
                       [this, k = std::string(kind)](const httplib::Request& req, httplib::Response& res) {
                           report(req, res, k);
                       });
        }
    }

    void join() {
        std::vector<std::thread> pending;
        {
            std::lock_guard lock(mu);
            pending.swap(workers);
        }
        for (auto& t : pending)
            if (t.joinable()) t.join();
    }
};

Service::Service(std::filesystem::path out_root, std::optional<DealFile> initial)
    : impl_(std::make_unique<Impl>(std::move(out_root), std::move(initial))) {}

Service::~Service() {
    stop();
    impl_->join();
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::start(const std::string& host) {
    const int port = impl_->server.bind_to_any_port(host);
    if (port <= 0) return port;
    impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void Service::stop() {
    impl_->server.stop();
    if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::wait_idle() {
    std::unique_lock lock(impl_->mu);
    impl_->idle.wait(lock, [this] { return impl_->active == 0; });
}

}  // namespace peal
