#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "webcas/cas/service.hpp"
#include "webcas/exchange/package.hpp"
#include "webcas/rdf/isomorphism.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"
#include "webcas/webid/identity.hpp"
#include "webcas/webid/verify.hpp"
#include "webcas/workflow/procedures.hpp"
#include "webcas/workflow/scenario.hpp"
#include "webcas/workflow/state_machine.hpp"

namespace py = pybind11;
using namespace webcas;

namespace {

// Profiles served from a dict keyed by document IRI.
class DictFetcher final : public webid::ProfileFetcher {
public:
    explicit DictFetcher(std::map<std::string, std::string> profiles) : profiles_(std::move(profiles)) {}
    webid::FetchResult get(const rdf::Iri& document) const override {
        const auto it = profiles_.find(document.str());
        if (it == profiles_.end()) return webid::FetchResult::failure("no profile for " + document.str());
        return webid::FetchResult::success("text/turtle", it->second);
    }

private:
    std::map<std::string, std::string> profiles_;
};

using Triples = std::vector<std::tuple<std::string, std::string, std::string>>;

Triples triples_of(const rdf::Graph& g) {
    Triples out;
    for (const auto& t : g) out.emplace_back(rdf::to_ntriples(t.subject), rdf::to_ntriples(rdf::Term(t.predicate)),
                                             rdf::to_ntriples(t.object));
    return out;
}

struct Identity {
    std::string webid;
    std::string certificate_pem;
    std::string private_key_pem;
    std::string fingerprint;
    rdf::Graph profile;
};

Identity identity_of(const webid::IdentityBundle& b) {
    return {b.webid.str(), b.certificate.to_pem(), b.private_key.to_pem(), b.certificate.fingerprint(), b.profile};
}

webid::Attributes attributes_of(const std::map<std::string, std::string>& attrs) {
    webid::Attributes out;
    for (const auto& [k, v] : attrs) out.emplace_back(rdf::vocab::expand(k), rdf::Literal(v));
    return out;
}

template <class E>
py::object enum_names(const auto& all) {
    py::list out;
    for (const auto v : all) out.append(std::string(workflow::to_string(v)));
    return out;
}

template <class E>
E enum_from(const auto& all, const std::string& name) {
    for (const auto v : all)
        if (workflow::to_string(v) == name) return v;
    throw py::value_error("unknown name " + name);
}

py::dict report_dict(const exchange::ImportReport& r) {
    py::dict d;
    d["triples_added"] = r.triples_added;
    d["documents_added"] = r.documents_added;
    d["kind"] = r.package_kind.str();
    d["source"] = r.source.str();
    d["local"] = r.local.str();
    d["warnings"] = r.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(webcas, m) {
    m.doc() = "Content access service: RDF, WebID, access control, packages and the enrollment workflow.";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", error);
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<exchange::PackageError>(m, "PackageError", validation);
    py::register_exception<NotFoundError>(m, "NotFoundError", error);
    py::register_exception<ConflictError>(m, "ConflictError", error);
    py::register_exception<IoError>(m, "IoError", error);
    py::register_exception<PermissionError>(m, "PermissionDenied", error);
    py::register_exception<CryptoError>(m, "CryptoError", error);

    py::class_<rdf::Graph>(m, "Graph")
        .def(py::init<>())
        .def_static(
            "parse",
            [](std::string_view text, std::optional<std::string> base) {
                return rdf::parse_turtle(text, base ? std::optional<rdf::Iri>(rdf::Iri(*base)) : std::nullopt).graph;
            },
            py::arg("text"), py::arg("base") = py::none())
        .def("to_turtle", [](const rdf::Graph& g) { return rdf::serialize_turtle(g, rdf::standard_prefixes()); })
        .def("triples", &triples_of, "Triples as N-Triples terms.")
        .def("isomorphic", [](const rdf::Graph& a, const rdf::Graph& b) { return rdf::graph_isomorphic(a, b); })
        .def("__len__", &rdf::Graph::size)
        .def("__eq__", [](const rdf::Graph& a, const rdf::Graph& b) { return a == b; });

    py::class_<Identity>(m, "Identity")
        .def_readonly("webid", &Identity::webid)
        .def_readonly("certificate_pem", &Identity::certificate_pem)
        .def_readonly("private_key_pem", &Identity::private_key_pem)
        .def_readonly("fingerprint", &Identity::fingerprint)
        .def_readonly("profile", &Identity::profile);

    m.def(
        "generate_identity",
        [](const std::string& name, const std::string& webid, int days) {
            return identity_of(webid::generate_identity(name, rdf::Iri(webid), days));
        },
        py::arg("name"), py::arg("webid"), py::arg("days") = 365);

    m.def(
        "verify_webid",
        [](const std::string& certificate_pem, std::map<std::string, std::string> profiles) {
            const auto cert = webid::WebIdCertificate::from_pem(certificate_pem);
            const auto r = webid::verify_webid(cert, DictFetcher(std::move(profiles)));
            py::dict d;
            d["ok"] = r.ok();
            d["webid"] = r.ok() ? py::object(py::str(r.webid->str())) : py::object(py::none());
            d["reason"] = r.ok() ? py::object(py::none()) : py::object(py::str(std::string(webid::to_string(r.reason))));
            d["detail"] = r.detail;
            return d;
        },
        py::arg("certificate_pem"), py::arg("profiles"),
        "Verifies a client certificate against profiles keyed by document IRI.");

    py::class_<cas::Service>(m, "Service")
        .def(py::init([](const std::string& base_iri, const std::filesystem::path& data_dir) {
                 cas::ServiceConfig c;
                 c.base_iri = rdf::Iri(base_iri);
                 c.data_dir = data_dir;
                 return std::make_unique<cas::Service>(c);
             }),
             py::arg("base_iri"), py::arg("data_dir"))
        .def_property_readonly("base", [](const cas::Service& s) { return s.base().str(); })
        .def(
            "create_actor",
            [](cas::Service& s, const std::string& slug, const std::map<std::string, std::string>& attrs,
               const std::string& type) {
                return identity_of(s.create_actor(slug, attributes_of(attrs), rdf::vocab::expand(type)).second);
            },
            py::arg("slug"), py::arg("attributes") = std::map<std::string, std::string>{},
            py::arg("type") = "s:Student")
        .def("actors",
             [](const cas::Service& s) {
                 std::vector<std::string> out;
                 for (const auto& a : s.actors()) out.push_back(a.slug());
                 return out;
             })
        .def("webid", [](const cas::Service& s, const std::string& slug) { return s.require_actor(slug).webid().str(); })
        .def("graph",
             [](const cas::Service& s, const std::string& slug) {
                 return s.store().graph(s.require_actor(slug).graph_iri()).value_or(rdf::Graph{});
             })
        .def(
            "store_document",
            [](cas::Service& s, const std::string& slug, py::bytes data, const std::string& filename,
               const std::string& media_type) {
                return s.store_document(s.require_actor(slug), std::string(data), filename, media_type).iri.str();
            },
            py::arg("slug"), py::arg("data"), py::arg("filename"), py::arg("media_type") = "application/octet-stream")
        .def("read_document",
             [](const cas::Service& s, const std::string& iri) {
                 const auto rec = cas::find_document(s.store(), rdf::Iri(iri));
                 if (!rec) throw NotFoundError("no document " + iri);
                 return py::bytes(s.read_document(*rec));
             })
        .def("grant",
             [](cas::Service& s, const std::string& slug, const std::string& resource, const std::string& grantee) {
                 s.grant(s.require_actor(slug), rdf::Iri(resource), rdf::Iri(grantee));
             })
        .def("revoke",
             [](cas::Service& s, const std::string& slug, const std::string& resource, const std::string& grantee) {
                 s.revoke(s.require_actor(slug), rdf::Iri(resource), rdf::Iri(grantee));
             })
        .def(
            "check_access",
            [](const cas::Service& s, const std::string& resource, std::optional<std::string> requester) {
                const auto who = requester ? std::optional<rdf::Iri>(rdf::Iri(*requester)) : std::nullopt;
                return std::string(cas::to_string(s.check_access(rdf::Iri(resource), who)));
            },
            py::arg("resource"), py::arg("requester") = py::none())
        .def(
            "compose_application",
            [](cas::Service& s, const std::string& slug, const std::vector<std::string>& documents,
               const std::vector<std::string>& predicates) {
                workflow::Selection sel;
                for (const auto& d : documents) sel.document_iris.insert(rdf::Iri(d));
                for (const auto& p : predicates) sel.statement_filter.insert(rdf::vocab::expand(p));
                return workflow::compose_application(s, s.require_actor(slug), sel).str();
            },
            py::arg("slug"), py::arg("documents"), py::arg("predicates"))
        .def("export_package",
             [](const cas::Service& s, const std::string& iri) {
                 return py::bytes(exchange::export_package(s, rdf::Iri(iri)));
             })
        .def("import_package", [](cas::Service& s, const std::string& slug, py::bytes data) {
            return report_dict(exchange::import_package(s, s.require_actor(slug), std::string(data)));
        });

    m.def(
        "validate_package",
        [](py::bytes data) {
            py::list out;
            for (const auto& i : exchange::validate_package(std::string(data))) {
                py::dict d;
                d["rule"] = i.rule;
                d["subject"] = i.subject;
                d["message"] = i.message;
                out.append(d);
            }
            return out;
        },
        "Rule violations of a package archive; empty when valid.");

    m.def("states", [] { return enum_names<workflow::EnrollmentState>(workflow::kAllStates); });
    m.def("events", [] { return enum_names<workflow::EnrollmentEvent>(workflow::kAllEvents); });
    m.def(
        "advance",
        [](const std::string& state, const std::string& event) {
            const auto s = enum_from<workflow::EnrollmentState>(workflow::kAllStates, state);
            const auto e = enum_from<workflow::EnrollmentEvent>(workflow::kAllEvents, event);
            return std::string(workflow::to_string(workflow::advance(s, e)));
        },
        "Next state; raises Error for an illegal transition.");

    m.def(
        "run_scenario",
        [](std::optional<std::filesystem::path> fixtures) {
            const auto f = fixtures ? workflow::ScenarioFixtures::load(*fixtures) : workflow::ScenarioFixtures::defaults();
            workflow::Transcript t;
            {
                py::gil_scoped_release release;
                t = workflow::run_scenario(f);
            }
            std::vector<std::string> lines;
            for (const auto& e : t.entries) lines.push_back(e.line());
            return lines;
        },
        py::arg("fixtures") = py::none(), "Runs the three-party enrollment over loopback HTTPS; transcript lines.");
}
