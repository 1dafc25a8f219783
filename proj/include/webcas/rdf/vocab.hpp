#pragma once

#include <string>

#include "webcas/rdf/iri.hpp"

namespace webcas::rdf::vocab {

inline constexpr const char* kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr const char* kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr const char* kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr const char* kFoafNs = "http://xmlns.com/foaf/0.1/";
inline constexpr const char* kCertNs = "http://www.w3.org/ns/auth/cert#";
inline constexpr const char* kStudentNs = "http://persemid.bfh.ch/vocab/student#";
inline constexpr const char* kCasNs = "http://persemid.bfh.ch/vocab/cas#";

inline Iri rdf(const char* local) { return Iri(std::string(kRdfNs) + local); }
inline Iri xsd(const char* local) { return Iri(std::string(kXsdNs) + local); }
inline Iri foaf(const char* local) { return Iri(std::string(kFoafNs) + local); }
inline Iri cert(const char* local) { return Iri(std::string(kCertNs) + local); }
inline Iri student(const char* local) { return Iri(std::string(kStudentNs) + local); }
inline Iri cas(const char* local) { return Iri(std::string(kCasNs) + local); }

inline const Iri& rdf_type() {
    static const Iri iri = rdf("type");
    return iri;
}
inline const Iri& xsd_string() {
    static const Iri iri = xsd("string");
    return iri;
}
inline const Iri& xsd_integer() {
    static const Iri iri = xsd("integer");
    return iri;
}
inline const Iri& rdf_lang_string() {
    static const Iri iri = rdf("langString");
    return iri;
}
/// s:permission, the grant predicate.
inline const Iri& permission() {
    static const Iri iri = student("permission");
    return iri;
}
/// s:webid, links an actor node to its WebID.
inline const Iri& webid() {
    static const Iri iri = student("webid");
    return iri;
}

/// `<iri>` or a name with one of the prefixes rdf, xsd, foaf, cert, s, cas.
/// Throws ParseError otherwise.
Iri expand(std::string_view name);

}  // namespace webcas::rdf::vocab
