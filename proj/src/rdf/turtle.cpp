#include "webcas/rdf/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "webcas/error.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::rdf {
namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_non_ascii(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

bool is_name_start(char c) { return is_alpha(c) || is_non_ascii(c); }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || is_non_ascii(c) || c == '_' || c == '-'; }

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Parser {
public:
    Parser(std::string_view text, const std::optional<Iri>& base) : text_(text), base_(base) {}

    TurtleDocument run() {
        skip_ws();
        while (!at_end()) {
            statement();
            skip_ws();
        }
        return std::move(doc_);
    }

private:
    // -- cursor ---------------------------------------------------------

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++column_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column_); }

    void skip_ws() {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            if (at_end()) fail(std::string("expected '") + c + "' but reached end of input");
            fail(std::string("expected '") + c + "', found '" + peek() + "'");
        }
        advance();
    }

    bool keyword_ahead(std::string_view word, bool case_insensitive) const {
        if (text_.size() - pos_ < word.size()) return false;
        for (std::size_t i = 0; i < word.size(); ++i) {
            char a = text_[pos_ + i];
            char b = word[i];
            if (case_insensitive) {
                a = static_cast<char>(std::tolower(static_cast<unsigned char>(a)));
                b = static_cast<char>(std::tolower(static_cast<unsigned char>(b)));
            }
            if (a != b) return false;
        }
        const char after = pos_ + word.size() < text_.size() ? text_[pos_ + word.size()] : ' ';
        return !is_name_char(after) && after != ':';
    }

    // -- grammar --------------------------------------------------------

    void statement() {
        if (peek() == '@') {
            advance();
            if (keyword_ahead("prefix", false)) {
                pos_ += 6, column_ += 6;
                prefix_declaration();
                expect('.');
            } else if (keyword_ahead("base", false)) {
                pos_ += 4, column_ += 4;
                base_declaration();
                expect('.');
            } else {
                fail("unknown directive");
            }
            return;
        }
        if (keyword_ahead("PREFIX", true)) {
            pos_ += 6, column_ += 6;
            prefix_declaration();
            return;
        }
        if (keyword_ahead("BASE", true)) {
            pos_ += 4, column_ += 4;
            base_declaration();
            return;
        }
        triples();
        expect('.');
    }

    void prefix_declaration() {
        skip_ws();
        std::string label;
        if (is_name_start(peek())) label = prefix_label();
        if (peek() != ':') fail("expected ':' after prefix label");
        advance();
        skip_ws();
        if (peek() != '<') fail("expected IRI in prefix declaration");
        doc_.prefixes.insert_or_assign(label, iri_ref());
    }

    void base_declaration() {
        skip_ws();
        if (peek() != '<') fail("expected IRI in base declaration");
        base_ = iri_ref();
    }

    void triples() {
        const Term subject = subject_term();
        predicate_object_list(subject);
    }

    Term subject_term() {
        skip_ws();
        const char c = peek();
        if (c == '<') return iri_ref();
        if (c == '_' && peek(1) == ':') return blank_node();
        if (c == '[') fail("unsupported syntax: blank node property list");
        if (c == '(') fail("unsupported syntax: collection");
        if (c == '"' || c == '\'' || is_digit(c) || c == '+' || c == '-') fail("literal in subject position");
        if (is_name_start(c) || c == ':') return prefixed_name();
        if (at_end()) fail("unexpected end of input");
        fail(std::string("unexpected character '") + c + "'");
    }

    void predicate_object_list(const Term& subject) {
        for (;;) {
            const Iri predicate = verb();
            object_list(subject, predicate);
            skip_ws();
            if (peek() != ';') return;
            while (peek() == ';') {
                advance();
                skip_ws();
            }
            // A trailing ';' before the terminating '.' is legal.
            if (peek() == '.' || peek() == ']') return;
        }
    }

    Iri verb() {
        skip_ws();
        if (peek() == 'a' && !is_name_char(peek(1)) && peek(1) != ':' &&
            !(peek(1) == '.' && is_name_char(peek(2)))) {
            advance();
            return vocab::rdf_type();
        }
        if (peek() == '<') return iri_ref();
        if (peek() == '_' && peek(1) == ':') fail("blank node in predicate position");
        if (peek() == '"' || peek() == '\'') fail("literal in predicate position");
        if (is_name_start(peek()) || peek() == ':') return prefixed_name();
        if (at_end()) fail("unexpected end of input, expected predicate");
        fail(std::string("unexpected character '") + peek() + "', expected predicate");
    }

    void object_list(const Term& subject, const Iri& predicate) {
        for (;;) {
            doc_.graph.insert(Triple(subject, predicate, object_term()));
            skip_ws();
            if (peek() != ',') return;
            advance();
        }
    }

    Term object_term() {
        skip_ws();
        const char c = peek();
        if (c == '<') return iri_ref();
        if (c == '_' && peek(1) == ':') return blank_node();
        if (c == '"' || c == '\'') return string_literal();
        if (is_digit(c) || c == '+' || c == '-' || (c == '.' && is_digit(peek(1)))) return numeric_literal();
        if (c == '[') fail("unsupported syntax: blank node property list");
        if (c == '(') fail("unsupported syntax: collection");
        if (keyword_ahead("true", false) || keyword_ahead("false", false))
            fail("unsupported syntax: boolean literal");
        if (is_name_start(c) || c == ':') return prefixed_name();
        if (at_end()) fail("unexpected end of input, expected object");
        fail(std::string("unexpected character '") + c + "', expected object");
    }

    // -- terminals ------------------------------------------------------

    char32_t hex_escape(int digits) {
        char32_t cp = 0;
        for (int i = 0; i < digits; ++i) {
            const char h = peek();
            if (!is_hex(h)) fail("invalid hex digit in \\u escape");
            advance();
            cp = cp * 16 + static_cast<char32_t>(is_digit(h) ? h - '0' : (std::tolower(h) - 'a' + 10));
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("escape outside the Unicode scalar range");
        return cp;
    }

    Iri iri_ref() {
        const std::size_t start_line = line_, start_col = column_;
        advance();  // '<'
        std::string raw;
        for (;;) {
            if (at_end()) throw ParseError("unterminated IRI", start_line, start_col);
            const char c = advance();
            if (c == '>') break;
            if (c == '\\') {
                const char kind = at_end() ? '\0' : advance();
                if (kind == 'u') append_utf8(raw, hex_escape(4));
                else if (kind == 'U') append_utf8(raw, hex_escape(8));
                else fail("invalid escape in IRI");
                continue;
            }
            if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
                c == '|' || c == '^' || c == '`')
                fail("invalid character in IRI");
            raw += c;
        }
        try {
            if (is_absolute_iri(raw)) return Iri(raw);
            if (!base_) throw ParseError("relative IRI <" + raw + "> with no base", start_line, start_col);
            return resolve_iri(*base_, raw);
        } catch (const ParseError& e) {
            if (e.line() != 0) throw;
            throw ParseError(e.what(), start_line, start_col);
        }
    }

    std::string prefix_label() {
        std::string label;
        while (!at_end() && (is_name_char(peek()) || peek() == '.')) label += advance();
        while (!label.empty() && label.back() == '.') {
            label.pop_back();
            --pos_;
            --column_;
        }
        return label;
    }

    Iri prefixed_name() {
        const std::size_t start_line = line_, start_col = column_;
        std::string label;
        if (peek() != ':') label = prefix_label();
        if (peek() != ':') {
            if (label == "true" || label == "false") fail("unsupported syntax: boolean literal");
            throw ParseError("expected prefixed name, found '" + label + "'", start_line, start_col);
        }
        advance();
        std::string local;
        while (!at_end()) {
            const char c = peek();
            if (is_name_char(c) || c == ':' || c == '.') {
                local += advance();
            } else if (c == '%' && is_hex(peek(1)) && is_hex(peek(2))) {
                local += advance();
                local += advance();
                local += advance();
            } else if (c == '\\' && peek(1) != '\0' && std::string_view("_~.-!$&'()*+,;=/?#@%").find(peek(1)) != std::string_view::npos) {
                advance();
                local += advance();
            } else {
                break;
            }
        }
        while (!local.empty() && local.back() == '.') {
            local.pop_back();
            --pos_;
            --column_;
        }
        const auto it = doc_.prefixes.find(label);
        if (it == doc_.prefixes.end())
            throw ParseError("undeclared prefix '" + label + ":'", start_line, start_col);
        try {
            return Iri(it->second.str() + local);
        } catch (const ParseError&) {
            throw ParseError("prefixed name does not form a valid IRI", start_line, start_col);
        }
    }

    Term blank_node() {
        advance();
        advance();  // "_:"
        std::string label;
        if (!(is_name_char(peek()) || is_digit(peek())) || peek() == '-') fail("invalid blank node label");
        while (!at_end() && (is_name_char(peek()) || peek() == '.')) label += advance();
        while (!label.empty() && label.back() == '.') {
            label.pop_back();
            --pos_;
            --column_;
        }
        return BlankNode{std::move(label)};
    }

    Term string_literal() {
        const std::size_t start_line = line_, start_col = column_;
        const char quote = advance();
        if (peek() == quote && peek(1) == quote) fail("unsupported syntax: long string literal");
        std::string value;
        for (;;) {
            if (at_end()) throw ParseError("unterminated string literal", start_line, start_col);
            const char c = advance();
            if (c == quote) break;
            if (c == '\n' || c == '\r') throw ParseError("line break inside string literal", start_line, start_col);
            if (c != '\\') {
                value += c;
                continue;
            }
            const char e = at_end() ? '\0' : advance();
            switch (e) {
                case 't': value += '\t'; break;
                case 'b': value += '\b'; break;
                case 'n': value += '\n'; break;
                case 'r': value += '\r'; break;
                case 'f': value += '\f'; break;
                case '"': value += '"'; break;
                case '\'': value += '\''; break;
                case '\\': value += '\\'; break;
                case 'u': append_utf8(value, hex_escape(4)); break;
                case 'U': append_utf8(value, hex_escape(8)); break;
                default: fail("invalid escape sequence in string literal");
            }
        }
        if (peek() == '@') {
            advance();
            std::string lang;
            if (!is_alpha(peek())) fail("invalid language tag");
            while (is_alpha(peek())) lang += advance();
            while (peek() == '-' && (is_alpha(peek(1)) || is_digit(peek(1)))) {
                lang += advance();
                while (is_alpha(peek()) || is_digit(peek())) lang += advance();
            }
            return Literal::with_language(std::move(value), std::move(lang));
        }
        if (peek() == '^' && peek(1) == '^') {
            advance();
            advance();
            Iri datatype = peek() == '<' ? iri_ref() : prefixed_name();
            if (datatype == vocab::rdf_lang_string()) fail("rdf:langString requires a language tag");
            return Literal(std::move(value), std::move(datatype));
        }
        return Literal(std::move(value));
    }

    Term numeric_literal() {
        std::string lexical;
        if (peek() == '+' || peek() == '-') lexical += advance();
        while (is_digit(peek())) lexical += advance();
        const bool fraction = peek() == '.' && is_digit(peek(1));
        if (fraction || peek() == 'e' || peek() == 'E' || (lexical.empty() && peek() == '.'))
            fail("unsupported syntax: decimal or double literal");
        if (lexical.empty() || lexical == "+" || lexical == "-") fail("malformed numeric literal");
        return Literal(std::move(lexical), vocab::xsd_integer());
    }

    std::string_view text_;
    std::optional<Iri> base_;
    TurtleDocument doc_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool safe_local_name(std::string_view local) {
    if (local.empty()) return true;
    const auto ok = [](char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '-'; };
    if (local.front() == '-') return false;
    return std::all_of(local.begin(), local.end(), ok);
}

std::string write_iri(const Iri& iri, const PrefixMap& prefixes) {
    const std::string* best_label = nullptr;
    std::size_t best_len = 0;
    for (const auto& [label, ns] : prefixes) {
        const std::string& n = ns.str();
        if (n.size() >= best_len && iri.str().starts_with(n) &&
            safe_local_name(std::string_view(iri.str()).substr(n.size()))) {
            if (best_label == nullptr || n.size() > best_len) {
                best_label = &label;
                best_len = n.size();
            }
        }
    }
    if (best_label) return *best_label + ":" + iri.str().substr(best_len);
    return "<" + iri.str() + ">";
}

bool plain_integer(const std::string& lexical) {
    static const std::regex pattern("[+-]?[0-9]+");
    return std::regex_match(lexical, pattern);
}

std::string write_term(const Term& term, const PrefixMap& prefixes) {
    if (const Iri* iri = term.if_iri()) return write_iri(*iri, prefixes);
    if (term.is_blank()) return "_:" + term.blank().label;
    const Literal& lit = term.literal();
    if (lit.datatype() == vocab::xsd_integer() && plain_integer(lit.lexical())) return lit.lexical();
    std::string out = "\"" + escape_string(lit.lexical()) + "\"";
    if (lit.language()) return out + "@" + *lit.language();
    if (lit.datatype() != vocab::xsd_string()) out += "^^" + write_iri(lit.datatype(), prefixes);
    return out;
}

}  // namespace

TurtleDocument parse_turtle(std::string_view text, const std::optional<Iri>& base) {
    return Parser(text, base).run();
}

std::string serialize_turtle(const Graph& graph, const PrefixMap& prefixes) {
    std::string out;
    for (const auto& [label, ns] : prefixes) out += "@prefix " + label + ": <" + ns.str() + "> .\n";
    if (graph.empty()) return out;
    if (!prefixes.empty()) out += "\n";

    const std::vector<Triple> triples = sorted_triples(graph);
    const Term* subject = nullptr;
    const Iri* predicate = nullptr;
    for (const Triple& t : triples) {
        if (subject == nullptr || !(*subject == t.subject)) {
            if (subject != nullptr) out += " .\n";
            out += write_term(t.subject, prefixes) + " ";
            subject = &t.subject;
            predicate = nullptr;
        }
        if (predicate == nullptr || !(*predicate == t.predicate)) {
            if (predicate != nullptr) out += " ;\n    ";
            out += t.predicate == vocab::rdf_type() ? std::string("a") : write_iri(t.predicate, prefixes);
            out += " ";
            predicate = &t.predicate;
        } else {
            out += ", ";
        }
        out += write_term(t.object, prefixes);
    }
    out += " .\n";
    return out;
}

const PrefixMap& standard_prefixes() {
    static const PrefixMap prefixes = {
        {"cas", Iri(vocab::kCasNs)},   {"cert", Iri(vocab::kCertNs)}, {"foaf", Iri(vocab::kFoafNs)},
        {"rdf", Iri(vocab::kRdfNs)},   {"s", Iri(vocab::kStudentNs)}, {"xsd", Iri(vocab::kXsdNs)},
    };
    return prefixes;
}

}  // namespace webcas::rdf

namespace webcas::rdf::vocab {

Iri expand(std::string_view name) {
    if (name.size() > 2 && name.front() == '<' && name.back() == '>') return Iri(std::string(name.substr(1, name.size() - 2)));
    const auto colon = name.find(':');
    if (colon != std::string_view::npos) {
        auto it = standard_prefixes().find(std::string(name.substr(0, colon)));
        if (it != standard_prefixes().end()) return Iri(it->second.str() + std::string(name.substr(colon + 1)));
    }
    throw ParseError("'" + std::string(name) + "' is neither <iri> nor a rdf:, xsd:, foaf:, cert:, s: or cas: name", 0, 0);
}

}  // namespace webcas::rdf::vocab
