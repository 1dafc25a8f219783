#include "webcas/webid/profile.hpp"

#include <charconv>

#include "webcas/error.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::webid {

using namespace webcas::rdf;

Graph build_profile(const Iri& webid, const RsaPublicKey& key, const Attributes& attributes) {
    if (!webid.has_fragment()) throw ValidationError("WebID <" + webid.str() + "> has no fragment");
    Graph g;
    g.insert(Triple(webid, vocab::rdf_type(), vocab::foaf("Person")));
    for (const auto& [predicate, value] : attributes) g.insert(Triple(webid, predicate, value));
    const BlankNode k{"key"};
    g.insert(Triple(webid, vocab::cert("key"), k));
    g.insert(Triple(k, vocab::rdf_type(), vocab::cert("RSAPublicKey")));
    g.insert(Triple(k, vocab::cert("modulus"), Literal(key.modulus_hex(), vocab::xsd("hexBinary"))));
    g.insert(Triple(k, vocab::cert("exponent"), Literal(std::to_string(key.exponent()), vocab::xsd_integer())));
    return g;
}

ProfileKeys keys_in_profile(const Graph& profile, const Iri& webid) {
    ProfileKeys out;
    for (const Term& node : profile.objects(webid, vocab::cert("key"))) {
        const std::string name = to_ntriples(node);
        if (node.is_literal()) {
            out.diagnostics.push_back("cert:key object " + name + " is a literal");
            continue;
        }
        const auto moduli = profile.objects(node, vocab::cert("modulus"));
        const auto exponents = profile.objects(node, vocab::cert("exponent"));
        if (moduli.size() != 1 || exponents.size() != 1 || !moduli[0].is_literal() || !exponents[0].is_literal()) {
            out.diagnostics.push_back("key " + name + " needs exactly one literal modulus and exponent");
            continue;
        }
        std::string modulus;
        try {
            modulus = canonical_hex(moduli[0].literal().lexical());
        } catch (const ValidationError& e) {
            out.diagnostics.push_back("key " + name + ": modulus is not hex (" + e.what() + ")");
            continue;
        }
        std::string exp_text = exponents[0].literal().lexical();
        while (!exp_text.empty() && (exp_text.front() == ' ' || exp_text.front() == '+')) exp_text.erase(0, 1);
        while (!exp_text.empty() && exp_text.back() == ' ') exp_text.pop_back();
        std::uint64_t exponent = 0;
        const auto [end, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (exp_text.empty() || ec != std::errc{} || end != exp_text.data() + exp_text.size()) {
            out.diagnostics.push_back("key " + name + ": exponent '" + exponents[0].literal().lexical() +
                                      "' is not a non-negative integer");
            continue;
        }
        out.keys.emplace_back(modulus, exponent);
    }
    return out;
}

}  // namespace webcas::webid
