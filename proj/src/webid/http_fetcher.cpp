#include <httplib.h>


#include "webcas/webid/http_fetcher.hpp"

namespace webcas::webid {

FetchResult HttpProfileFetcher::get(const rdf::Iri& document) const {
    const std::string& url = document.str();
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return FetchResult::failure("unsupported IRI " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    if (!client.is_valid()) return FetchResult::failure("cannot create client for " + origin);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    client.enable_server_certificate_verification(options_.verify_server_certificate);
    if (!options_.ca_file.empty()) client.set_ca_cert_path(options_.ca_file.c_str());

    auto res = client.Get(path, {{"Accept", "text/turtle"}});
    if (!res) return FetchResult::failure(httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        return FetchResult::failure("HTTP status " + std::to_string(res->status), res->status);
    return FetchResult::success(res->get_header_value("Content-Type"), res->body, res->status);
}

}  // namespace webcas::webid
