#include "webcas/rdf/iri.hpp"

#include <optional>
#include <vector>

#include "webcas/error.hpp"

namespace webcas::rdf {
namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool forbidden_char(unsigned char c) {
    if (c <= 0x20) return true;
    switch (c) {
        case '<': case '>': case '"': case '{': case '}':
        case '|': case '^': case '`': case '\\':
            return true;
        default:
            return false;
    }
}

/// Length of a valid scheme prefix (excluding ':'), or 0.
std::size_t scheme_length(std::string_view text) {
    if (text.empty() || !is_alpha(text[0])) return 0;
    for (std::size_t i = 1; i < text.size(); ++i) {
        const char c = text[i];
        if (c == ':') return i;
        if (!(is_alpha(c) || is_digit(c) || c == '+' || c == '-' || c == '.')) return 0;
    }
    return 0;
}

struct Reference {
    std::optional<std::string> scheme;
    std::optional<std::string> authority;
    std::string path;
    std::optional<std::string> query;
    std::optional<std::string> fragment;
};

Reference split(std::string_view text) {
    Reference ref;
    std::size_t pos = 0;
    const auto first_delim = text.find_first_of(":/?#");
    if (first_delim != std::string_view::npos && text[first_delim] == ':') {
        const auto len = scheme_length(text);
        if (len == 0) throw ParseError("invalid IRI scheme in '" + std::string(text) + "'");
        ref.scheme = std::string(text.substr(0, len));
        pos = len + 1;
    }
    if (text.substr(pos).starts_with("//")) {
        pos += 2;
        const auto end = text.find_first_of("/?#", pos);
        const auto stop = end == std::string_view::npos ? text.size() : end;
        ref.authority = std::string(text.substr(pos, stop - pos));
        pos = stop;
    }
    const auto path_end = text.find_first_of("?#", pos);
    const auto path_stop = path_end == std::string_view::npos ? text.size() : path_end;
    ref.path = std::string(text.substr(pos, path_stop - pos));
    pos = path_stop;
    if (pos < text.size() && text[pos] == '?') {
        const auto end = text.find('#', pos);
        const auto stop = end == std::string_view::npos ? text.size() : end;
        ref.query = std::string(text.substr(pos + 1, stop - pos - 1));
        pos = stop;
    }
    if (pos < text.size() && text[pos] == '#') ref.fragment = std::string(text.substr(pos + 1));
    return ref;
}

std::string remove_dot_segments(std::string_view input) {
    std::string in(input);
    std::string out;
    while (!in.empty()) {
        if (in.starts_with("../")) {
            in.erase(0, 3);
        } else if (in.starts_with("./")) {
            in.erase(0, 2);
        } else if (in.starts_with("/./")) {
            in.replace(0, 3, "/");
        } else if (in == "/.") {
            in = "/";
        } else if (in.starts_with("/../") || in == "/..") {
            if (in == "/..") in = "/";
            else in.replace(0, 4, "/");
            const auto last = out.rfind('/');
            out.erase(last == std::string::npos ? 0 : last);
        } else if (in == "." || in == "..") {
            in.clear();
        } else {
            const auto next = in.find('/', in.front() == '/' ? 1 : 0);
            const auto take = next == std::string::npos ? in.size() : next;
            out += in.substr(0, take);
            in.erase(0, take);
        }
    }
    return out;
}

std::string merge(const Reference& base, const std::string& ref_path) {
    if (base.authority && base.path.empty()) return "/" + ref_path;
    const auto last = base.path.rfind('/');
    if (last == std::string::npos) return ref_path;
    return base.path.substr(0, last + 1) + ref_path;
}

std::string recompose(const Reference& r) {
    std::string out;
    if (r.scheme) out += *r.scheme + ":";
    if (r.authority) out += "//" + *r.authority;
    out += r.path;
    if (r.query) out += "?" + *r.query;
    if (r.fragment) out += "#" + *r.fragment;
    return out;
}

}  // namespace

bool is_absolute_iri(std::string_view text) noexcept {
    if (scheme_length(text) == 0) return false;
    for (unsigned char c : text)
        if (forbidden_char(c)) return false;
    return true;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
    if (!is_absolute_iri(value_)) throw ParseError("not an absolute IRI: '" + value_ + "'");
}

std::string_view Iri::scheme() const noexcept {
    return std::string_view(value_).substr(0, scheme_length(value_));
}

bool Iri::has_fragment() const noexcept { return value_.find('#') != std::string::npos; }

Iri Iri::without_fragment() const {
    const auto hash = value_.find('#');
    if (hash == std::string::npos) return *this;
    return Iri(value_.substr(0, hash));
}

Iri resolve_iri(const Iri& base_iri, std::string_view reference) {
    const Reference ref = split(reference);
    const Reference base = split(base_iri.str());
    Reference target;
    if (ref.scheme) {
        target.scheme = ref.scheme;
        target.authority = ref.authority;
        target.path = remove_dot_segments(ref.path);
        target.query = ref.query;
    } else {
        if (ref.authority) {
            target.authority = ref.authority;
            target.path = remove_dot_segments(ref.path);
            target.query = ref.query;
        } else {
            if (ref.path.empty()) {
                target.path = base.path;
                target.query = ref.query ? ref.query : base.query;
            } else {
                if (ref.path.front() == '/') {
                    target.path = remove_dot_segments(ref.path);
                } else {
                    target.path = remove_dot_segments(merge(base, ref.path));
                }
                target.query = ref.query;
            }
            target.authority = base.authority;
        }
        target.scheme = base.scheme;
    }
    target.fragment = ref.fragment;
    std::string result = recompose(target);
    if (!is_absolute_iri(result))
        throw ParseError("reference '" + std::string(reference) + "' does not resolve to an absolute IRI");
    return Iri(std::move(result));
}

}  // namespace webcas::rdf
