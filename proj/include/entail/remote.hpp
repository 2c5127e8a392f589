#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include "entail/corpus.hpp"
#include "entail/run.hpp"

namespace entail {

/// Client side of the relevance-scoring service. Each (fragment, paragraph)
/// pair is sent raw as `POST <endpoint>/v1/score` with body
/// `{"query": ..., "document": ...}`; the service builds the model prompt and
/// answers `{"score": s, "model_name": ..., "truncated": ...}` with s in [0,1].
struct RemoteClientConfig {
    std::string endpoint;  // e.g. "http://127.0.0.1:8080"
    std::size_t max_in_flight = 4;
    std::chrono::milliseconds timeout{30000};
    int retries = 2;
    std::chrono::milliseconds retry_backoff{200};

    void validate() const;
};

/// All-or-nothing: returns a Run covering every pair of the dataset, or
/// throws. TransportError when a request still fails after `retries` extra
/// attempts; DataError when the service returns a malformed, non-finite or
/// out-of-range score. No partial run is ever returned.
Run remote_score_dataset(const Dataset& dataset, const RemoteClientConfig& config,
                         std::string model_id);

}  // namespace entail
