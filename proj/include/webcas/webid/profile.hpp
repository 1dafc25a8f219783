#pragma once

#include <string>
#include <utility>
#include <vector>

#include "webcas/rdf/graph.hpp"
#include "webcas/webid/key.hpp"

namespace webcas::webid {

using Attributes = std::vector<std::pair<rdf::Iri, rdf::Literal>>;

/// FOAF profile for `webid`: type foaf:Person, one triple per attribute and
/// a cert:RSAPublicKey block (hexBinary modulus, integer exponent) behind a
/// blank node. Throws ValidationError when `webid` has no fragment.
rdf::Graph build_profile(const rdf::Iri& webid, const RsaPublicKey& key, const Attributes& attributes = {});

struct ProfileKeys {
    std::vector<RsaPublicKey> keys;
    /// One message per skipped, malformed key block.
    std::vector<std::string> diagnostics;
};

/// Every well-formed cert:key block attached to `webid`.
ProfileKeys keys_in_profile(const rdf::Graph& profile, const rdf::Iri& webid);

}  // namespace webcas::webid
