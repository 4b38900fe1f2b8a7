#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "peal/deal_io.hpp"

namespace peal {

// HTTP/JSON front end: draft deal, asynchronous simulations and run reports.
class Service {
public:
    explicit Service(std::filesystem::path out_root, std::optional<DealFile> initial = std::nullopt);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Blocks until stop(). Returns false when the address cannot be bound.
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and serves on a background thread.
    int start(const std::string& host = "127.0.0.1");
    void stop();
    // Waits for every simulation started so far.
    void wait_idle();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace peal
