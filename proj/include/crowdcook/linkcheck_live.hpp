// Live HTTP link checker. HEAD with GET fallback, 10-second timeout, up to
// three redirects. Only the CLI includes this header; library code and
// tests stay on the manifest-backed checker.

#pragma once

#ifndef CPPHTTPLIB_REDIRECT_MAX_COUNT
#define CPPHTTPLIB_REDIRECT_MAX_COUNT 3
#endif
#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>

#include "crowdcook/linkcheck.hpp"

namespace crowdcook {

class LiveLinkChecker : public LinkChecker {
public:
    explicit LiveLinkChecker(std::size_t max_in_flight = 8) : max_in_flight_(max_in_flight) {}

protected:
    LinkStatus probe(const std::string& url) override {
        LinkStatus result;
        result.url = url;
        result.checked_at = now_iso8601();

        std::string origin, path;
        if (!split_url(url, origin, path)) return result; // unsupported scheme: dead
        httplib::Client client(origin);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(10, 0);
        client.set_follow_location(true);

        httplib::Result response = client.Head(path);
        const bool head_unusable =
            !response || response->status == 405 || response->status == 501;
        if (head_unusable) response = client.Get(path);
        if (!response) return result; // never connected: alive=false, no status
        result.status = response->status;
        result.alive = response->status < 400;
        return result;
    }

    std::size_t max_in_flight() const override { return max_in_flight_; }

private:
    std::size_t max_in_flight_;

    static bool split_url(const std::string& url, std::string& origin, std::string& path) {
        std::size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return false;
        const std::string scheme = url.substr(0, scheme_end);
        if (scheme != "http"
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
            && scheme != "https"
#endif
        )
            return false;
        const std::size_t host_begin = scheme_end + 3;
        const std::size_t path_begin = url.find('/', host_begin);
        if (path_begin == std::string::npos) {
            origin = url;
            path = "/";
        } else {
            origin = url.substr(0, path_begin);
            path = url.substr(path_begin);
        }
        return true;
    }

    static std::string now_iso8601() {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        char buffer[40];
        std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02dT%02d:%02d:%02dZ", utc.tm_year + 1900,
                      utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec);
        return buffer;
    }
};

} // namespace crowdcook
