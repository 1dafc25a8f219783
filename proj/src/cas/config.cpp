#include "webcas/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "webcas/cas/config.hpp"
#include "webcas/error.hpp"
#include "webcas/rdf/persistence.hpp"

namespace webcas {
namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no, 1);
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no, 1);
        if (!cfg.values_.emplace(key, value).second) throw ParseError("duplicate key '" + key + "'", line_no, 1);
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    try {
        return parse(rdf::read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::require(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) throw ValidationError("missing setting '" + key + "'");
    return *v;
}

std::string KeyValueConfig::get_or(const std::string& key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
    if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
    throw ValidationError("setting '" + key + "' is not a boolean: " + *v);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    int out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size())
        throw ValidationError("setting '" + key + "' is not an integer: " + *v);
    return out;
}

void KeyValueConfig::reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (!allowed.contains(k)) throw ParseError("unknown setting '" + k + "'");
}

std::pair<std::string, int> split_host_port(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw ValidationError("expected host:port, got '" + std::string(text) + "'");
    std::string host(text.substr(0, colon));
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    auto port_text = text.substr(colon + 1);
    int port = -1;
    auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc() || p != port_text.data() + port_text.size() || port < 0 || port > 65535)
        throw ValidationError("bad port in '" + std::string(text) + "'");
    return {host, port};
}

bool is_loopback_host(std::string_view host) noexcept {
    return host == "localhost" || host == "::1" || host.starts_with("127.");
}

namespace cas {

ServiceConfig ServiceConfig::from(const KeyValueConfig& kv) {
    kv.reject_unknown({"base_iri", "data_dir", "listen", "tls_cert", "tls_key", "transport", "enforce_cert_expiry",
                       "static_dir", "trust_ca_file", "verify_remote_tls", "verification_cache_seconds"});
    ServiceConfig c;
    c.base_iri = rdf::Iri(kv.require("base_iri"));
    c.data_dir = kv.require("data_dir");
    if (auto listen = kv.get("listen")) std::tie(c.listen_host, c.listen_port) = split_host_port(*listen);
    c.tls_cert = kv.get_or("tls_cert", "");
    c.tls_key = kv.get_or("tls_key", "");
    auto transport = kv.get_or("transport", "tls");
    if (transport != "tls" && transport != "plain") throw ValidationError("transport must be tls or plain");
    c.plain_transport = transport == "plain";
    c.enforce_cert_expiry = kv.get_bool("enforce_cert_expiry", false);
    c.static_dir = kv.get_or("static_dir", "");
    c.trust_ca_file = kv.get_or("trust_ca_file", "");
    c.verify_remote_tls = kv.get_bool("verify_remote_tls", true);
    c.verification_cache_seconds = kv.get_int("verification_cache_seconds", 60);
    c.validate();
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    auto c = from(KeyValueConfig::load(path));
    auto dir = path.parent_path();
    auto rebase = [&](std::filesystem::path& p) {
        if (!p.empty() && p.is_relative()) p = dir / p;
    };
    rebase(c.data_dir);
    rebase(c.tls_cert);
    rebase(c.tls_key);
    rebase(c.static_dir);
    rebase(c.trust_ca_file);
    return c;
}

void ServiceConfig::validate() const {
    if (data_dir.empty()) throw ValidationError("data_dir is required");
    if (listen_port < 0 || listen_port > 65535) throw ValidationError("listen port out of range");
    if (tls_cert.empty() != tls_key.empty()) throw ValidationError("tls_cert and tls_key must be given together");
    if (verification_cache_seconds < 0) throw ValidationError("verification_cache_seconds must not be negative");
    const auto& scheme = base_iri.scheme();
    if (plain_transport) {
        if (!is_loopback_host(listen_host))
            throw ValidationError("plain transport refuses non-loopback listen address " + listen_host);
        if (scheme != "http" && scheme != "https") throw ValidationError("base_iri must be http(s)");
    } else if (scheme != "https") {
        throw ValidationError("base_iri must use https");
    }
    if (base_iri.has_fragment() || base_iri.str().find('?') != std::string::npos)
        throw ValidationError("base_iri must not carry a query or fragment");
}

}  // namespace cas
}  // namespace webcas
