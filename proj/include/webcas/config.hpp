#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace webcas {

/// `key = value` lines; `#` starts a comment line. Keys are unique.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    std::string require(const std::string& key) const;
    std::string get_or(const std::string& key, std::string fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    int get_int(const std::string& key, int fallback) const;

    /// Throws ParseError naming the first key outside `allowed`.
    void reject_unknown(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Splits "host:port"; the port must be 0..65535.
std::pair<std::string, int> split_host_port(std::string_view text);

bool is_loopback_host(std::string_view host) noexcept;

}  // namespace webcas
