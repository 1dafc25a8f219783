#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "webcas/webid/verify.hpp"

namespace webcas::testing {

/// Serves canned responses and records every requested IRI.
class FakeFetcher final : public webid::ProfileFetcher {
public:
    void serve(const rdf::Iri& document, std::string body, std::string media_type = "text/turtle") {
        responses_[document.str()] = webid::FetchResult::success(std::move(media_type), std::move(body));
    }
    void fail(const rdf::Iri& document, std::string message) {
        responses_[document.str()] = webid::FetchResult::failure(std::move(message));
    }

    webid::FetchResult get(const rdf::Iri& document) const override {
        std::lock_guard lock(mutex_);
        requests_.push_back(document.str());
        const auto it = responses_.find(document.str());
        if (it == responses_.end()) return webid::FetchResult::failure("connection refused");
        return it->second;
    }

    std::vector<std::string> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    std::map<std::string, webid::FetchResult> responses_;
    mutable std::mutex mutex_;
    mutable std::vector<std::string> requests_;
};

}  // namespace webcas::testing
