#pragma once

#include <string>

#include "webcas/webid/verify.hpp"

namespace webcas::webid {

struct HttpFetcherOptions {
    /// PEM bundle of trusted server certificates; empty means system default.
    std::string ca_file;
    bool verify_server_certificate = true;
    int timeout_seconds = 5;
};

/// Plain HTTP(S) GET with `Accept: text/turtle`.
class HttpProfileFetcher final : public ProfileFetcher {
public:
    explicit HttpProfileFetcher(HttpFetcherOptions options = {}) : options_(std::move(options)) {}
    FetchResult get(const rdf::Iri& document) const override;

private:
    HttpFetcherOptions options_;
};

}  // namespace webcas::webid
