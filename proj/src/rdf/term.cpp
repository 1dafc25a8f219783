#include "webcas/rdf/term.hpp"

#include <cstdio>

#include "webcas/error.hpp"
#include "webcas/rdf/graph.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::rdf {

Literal::Literal(std::string lexical) : lexical_(std::move(lexical)), datatype_(vocab::xsd_string()) {}

Literal::Literal(std::string lexical, Iri datatype)
    : lexical_(std::move(lexical)), datatype_(std::move(datatype)) {
    if (datatype_ == vocab::rdf_lang_string())
        throw ValidationError("rdf:langString literal requires a language tag");
}

Literal Literal::with_language(std::string lexical, std::string language) {
    if (language.empty()) throw ValidationError("empty language tag");
    Literal lit(std::move(lexical));
    lit.datatype_ = vocab::rdf_lang_string();
    lit.language_ = std::move(language);
    return lit;
}

Literal Literal::integer(long long value) { return Literal(std::to_string(value), vocab::xsd_integer()); }

std::string escape_string(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned char>(c));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string to_ntriples(const Term& term) {
    if (const Iri* iri = term.if_iri()) return "<" + iri->str() + ">";
    if (term.is_blank()) return "_:" + term.blank().label;
    const Literal& lit = term.literal();
    std::string out = "\"" + escape_string(lit.lexical()) + "\"";
    if (lit.language()) return out + "@" + *lit.language();
    if (lit.datatype() != vocab::xsd_string()) out += "^^<" + lit.datatype().str() + ">";
    return out;
}

Triple::Triple(Term s, Iri p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (subject.is_literal()) throw ValidationError("literal in subject position");
}

}  // namespace webcas::rdf
