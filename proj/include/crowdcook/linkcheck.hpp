// Link liveness checking behind a capability interface.
//
// Builds are deterministic when backed by ManifestLinkChecker, which
// resolves URLs from a JSON map instead of the network. The live HTTP
// checker lives in linkcheck_live.hpp so that only the CLI pulls in the
// HTTP client dependency.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace crowdcook {

struct LinkStatus {
    std::string url;
    bool alive = false;
    std::optional<int> status; // HTTP status; absent when the check never connected
    std::string checked_at;    // ISO-8601; empty for manifest-backed checks
};

// Cached URL checker. probe() supplies the policy; results are cached for
// the lifetime of the checker, so a URL is checked at most once per run.
class LinkChecker {
public:
    virtual ~LinkChecker() = default;

    LinkStatus check(const std::string& url) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const auto it = cache_.find(url);
            if (it != cache_.end()) return it->second;
        }
        LinkStatus status = safe_probe(url);
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(url, std::move(status)).first->second;
    }

    // One status per input URL, same order. Uncached URLs are probed with
    // at most max_in_flight() concurrent checks; results merge by URL, so
    // the outcome does not depend on completion order.
    std::vector<LinkStatus> check_all(const std::vector<std::string>& urls) {
        std::vector<std::string> pending;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            for (const std::string& url : urls)
                if (!cache_.count(url)) pending.push_back(url);
        }
        std::sort(pending.begin(), pending.end());
        pending.erase(std::unique(pending.begin(), pending.end()), pending.end());

        const std::size_t workers =
            std::min<std::size_t>(std::max<std::size_t>(max_in_flight(), 1), pending.size());
        if (workers > 1) {
            std::vector<LinkStatus> results(pending.size());
            std::atomic<std::size_t> cursor{0};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    while (true) {
                        const std::size_t i = cursor.fetch_add(1);
                        if (i >= pending.size()) return;
                        results[i] = safe_probe(pending[i]);
                    }
                });
            }
            for (std::thread& t : pool) t.join();
            std::lock_guard<std::mutex> lock(mutex_);
            for (std::size_t i = 0; i < pending.size(); ++i)
                cache_.emplace(pending[i], std::move(results[i]));
        } else {
            for (const std::string& url : pending) check(url);
        }

        std::vector<LinkStatus> out;
        out.reserve(urls.size());
        std::lock_guard<std::mutex> lock(mutex_);
        for (const std::string& url : urls) out.push_back(cache_.at(url));
        return out;
    }

    bool all_alive(const std::vector<std::string>& urls) {
        for (const LinkStatus& status : check_all(urls))
            if (!status.alive) return false;
        return true;
    }

protected:
    virtual LinkStatus probe(const std::string& url) = 0;
    virtual std::size_t max_in_flight() const { return 1; }

private:
    // a throwing probe counts as a failed check, never as a crash
    LinkStatus safe_probe(const std::string& url) {
        try {
            return probe(url);
        } catch (const std::exception&) {
            LinkStatus failed;
            failed.url = url;
            failed.alive = false;
            return failed;
        }
    }

    std::mutex mutex_;
    std::unordered_map<std::string, LinkStatus> cache_;
};

// Offline checker over a URL -> HTTP status map. A status below 100 means
// "connection failed". URLs absent from the manifest count as alive, so a
// manifest only has to enumerate the known-dead ones; unknowns are tallied
// for reporting.
class ManifestLinkChecker : public LinkChecker {
public:
    explicit ManifestLinkChecker(std::unordered_map<std::string, int> manifest)
        : manifest_(std::move(manifest)) {}

    explicit ManifestLinkChecker(const std::string& path)
        : ManifestLinkChecker(load_manifest(path)) {}

    static std::unordered_map<std::string, int> load_manifest(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open link manifest: " + path);
        nlohmann::json doc = nlohmann::json::parse(in);
        if (!doc.is_object()) throw std::runtime_error("link manifest must be a JSON object");
        std::unordered_map<std::string, int> manifest;
        for (const auto& [url, status] : doc.items())
            manifest[url] = status.get<int>();
        return manifest;
    }

    std::uint64_t unknown_urls() const { return unknown_; }

protected:
    LinkStatus probe(const std::string& url) override {
        LinkStatus result;
        result.url = url;
        const auto it = manifest_.find(url);
        if (it == manifest_.end()) {
            ++unknown_;
            result.alive = true;
            return result;
        }
        if (it->second < 100) {
            result.alive = false; // recorded connection failure
            return result;
        }
        result.status = it->second;
        result.alive = it->second < 400;
        return result;
    }

private:
    std::unordered_map<std::string, int> manifest_;
    std::atomic<std::uint64_t> unknown_{0};
};

} // namespace crowdcook
