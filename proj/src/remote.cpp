#include "entail/remote.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "entail/errors.hpp"

namespace entail {
namespace {

struct Endpoint {
    std::string host;
    int port = 80;
    std::string path_prefix;
};

Endpoint parse_endpoint(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (!url.starts_with(scheme)) {
        throw UsageError("remote endpoint must be an http:// URL: " + url);
    }
    std::string rest = url.substr(scheme.size());
    Endpoint ep;
    const auto slash = rest.find('/');
    if (slash != std::string::npos) {
        ep.path_prefix = rest.substr(slash);
        while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') {
            ep.path_prefix.pop_back();
        }
        rest.resize(slash);
    }
    const auto colon = rest.rfind(':');
    if (colon != std::string::npos) {
        try {
            std::size_t used = 0;
            ep.port = std::stoi(rest.substr(colon + 1), &used);
            if (used != rest.size() - colon - 1 || ep.port <= 0 || ep.port > 65535) {
                throw std::invalid_argument("port");
            }
        } catch (const std::exception&) {
            throw UsageError("remote endpoint has an invalid port: " + url);
        }
        rest.resize(colon);
    }
    if (rest.empty()) {
        throw UsageError("remote endpoint has no host: " + url);
    }
    ep.host = rest;
    return ep;
}

struct Pair {
    const Entry* entry;
    const Candidate* candidate;
};

std::string pair_name(const Pair& pair) {
    return "(" + pair.entry->id + ", " + pair.candidate->id + ")";
}

double parse_remote_score(const std::string& body, const Pair& pair) {
    nlohmann::json response;
    try {
        response = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        throw DataError("remote scorer returned a malformed response for pair " + pair_name(pair));
    }
    double score = 0.0;
    const auto it = response.is_object() ? response.find("score") : response.end();
    if (it == response.end()) {
        throw DataError("remote scorer response for pair " + pair_name(pair) + " has no score");
    }
    if (it->is_number()) {
        score = it->get<double>();
    } else if (it->is_string()) {
        auto parsed = parse_score(it->get<std::string>());
        if (!parsed) {
            throw DataError("remote scorer returned a non-numeric score for pair " + pair_name(pair));
        }
        score = *parsed;
    } else {
        throw DataError("remote scorer returned a non-numeric score for pair " + pair_name(pair));
    }
    if (!std::isfinite(score)) {
        throw DataError("remote scorer returned a non-finite score for pair " + pair_name(pair));
    }
    if (score < 0.0 || score > 1.0) {
        throw DataError("remote scorer returned score " + format_score(score) + " outside [0, 1] for pair " +
                        pair_name(pair));
    }
    return score;
}

}  // namespace

void RemoteClientConfig::validate() const {
    parse_endpoint(endpoint);
    if (max_in_flight == 0) {
        throw UsageError("remote: max_in_flight must be at least 1");
    }
    if (timeout.count() <= 0) {
        throw UsageError("remote: timeout must be positive");
    }
    if (retries < 0) {
        throw UsageError("remote: retries must be nonnegative");
    }
}

Run remote_score_dataset(const Dataset& dataset, const RemoteClientConfig& config, std::string model_id) {
    config.validate();
    const Endpoint ep = parse_endpoint(config.endpoint);
    const std::string path = ep.path_prefix + "/v1/score";

    std::vector<Pair> pairs;
    for (const auto& entry : dataset.entries) {
        for (const auto& candidate : entry.candidates) {
            pairs.push_back({&entry, &candidate});
        }
    }
    std::vector<double> scores(pairs.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto score_one = [&](httplib::Client& client, const Pair& pair) {
        const std::string body =
            nlohmann::json{{"query", pair.entry->fragment}, {"document", pair.candidate->text}}.dump();
        std::string last_problem;
        for (int attempt = 0; attempt <= config.retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(config.retry_backoff * attempt);
            }
            auto res = client.Post(path, body, "application/json");
            if (!res) {
                last_problem = httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                return parse_remote_score(res->body, pair);
            }
            if (res->status >= 500 || res->status == 429) {
                last_problem = "HTTP " + std::to_string(res->status);
                continue;
            }
            throw DataError("remote scorer rejected pair " + pair_name(pair) + " with HTTP " +
                            std::to_string(res->status));
        }
        throw TransportError("remote scorer at " + config.endpoint + " failed for pair " + pair_name(pair) +
                             " after " + std::to_string(config.retries + 1) + " attempts: " + last_problem);
    };

    auto worker = [&] {
        httplib::Client client(ep.host, ep.port);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        client.set_keep_alive(true);
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= pairs.size()) {
                return;
            }
            try {
                scores[i] = score_one(client, pairs[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                failed = true;
            }
        }
    };

    {
        const std::size_t n_workers = std::min(config.max_in_flight, std::max<std::size_t>(pairs.size(), 1));
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_workers; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    Run run;
    run.model_id = std::move(model_id);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        run.insert(pairs[i].entry->id, pairs[i].candidate->id, scores[i]);
    }
    return run;
}

}  // namespace entail
