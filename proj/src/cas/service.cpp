#include "webcas/cas/service.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "webcas/crypto.hpp"
#include "webcas/error.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::cas {

namespace fs = std::filesystem;
namespace vocab = rdf::vocab;

namespace {

rdf::QuadStore open_store(const fs::path& dir) {
    if (fs::exists(dir / "index.ttl")) return rdf::load_store(dir);
    return {};
}

}  // namespace

DirectoryLock::DirectoryLock(const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
    const auto path = directory / "lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
    if (fd_ < 0) throw IoError("cannot open " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        throw IoError("data directory " + directory.string() + " is in use by another process");
    }
}

DirectoryLock::~DirectoryLock() {
    if (fd_ >= 0) ::close(fd_);
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      base_(normalized_base(config_.base_iri)),
      lock_(config_.data_dir),
      store_(open_store(config_.data_dir / "store")),
      files_(config_.data_dir / "files") {
    std::error_code ec;
    fs::create_directories(config_.data_dir / "identities", ec);
    if (ec) throw IoError("cannot create " + (config_.data_dir / "identities").string() + ": " + ec.message());
    persisted_version_ = store_.version();
}

std::optional<ActorId> Service::find_actor(const std::string& slug) const {
    if (!valid_slug(slug)) return std::nullopt;
    ActorId id(base_, slug);
    if (!actor_exists(store_, id)) return std::nullopt;
    return id;
}

ActorId Service::require_actor(const std::string& slug) const {
    auto id = find_actor(slug);
    if (!id) throw NotFoundError("no actor '" + slug + "'");
    return *id;
}

std::optional<ActorId> Service::actor_by_webid(const rdf::Iri& webid) const {
    for (const auto& q : store_.match({std::nullopt, std::nullopt, vocab::webid(), rdf::Term(webid)})) {
        auto id = ActorId::from_graph(base_, q.graph);
        if (id && q.subject == rdf::Term(id->node())) return id;
    }
    return std::nullopt;
}

std::vector<ActorId> Service::actors() const {
    std::vector<ActorId> out;
    for (const auto& name : store_.graph_names())
        if (auto id = ActorId::from_graph(base_, name); id && actor_exists(store_, *id)) out.push_back(*id);
    return out;
}

std::pair<ActorId, webid::IdentityBundle> Service::create_actor(const std::string& slug,
                                                                const webid::Attributes& attributes,
                                                                const rdf::Iri& actor_type) {
    auto result = cas::create_actor(store_, config_, slug, attributes, actor_type);
    result.second.save(config_.data_dir / "identities" / slug);
    ++profile_generation_;
    persist();
    return result;
}

webid::IdentityBundle Service::identity(const std::string& slug) const {
    auto dir = config_.data_dir / "identities" / actor_id(slug).slug();
    if (!fs::exists(dir / "identity.pem")) throw NotFoundError("no identity for actor '" + slug + "'");
    return webid::IdentityBundle::load(dir);
}

std::optional<rdf::Graph> Service::profile(const std::string& slug) const {
    if (!valid_slug(slug)) return std::nullopt;
    return store_.graph(ActorId(base_, slug).profile_document());
}

DocumentRecord Service::store_document(const ActorId& actor, std::string_view bytes, const std::string& filename,
                                       const std::string& media_type) {
    auto rec = cas::store_document(store_, files_, base_, actor, bytes, filename, media_type);
    persist();
    return rec;
}

void Service::remove_document(const ActorId& owner, const rdf::Iri& document) {
    cas::remove_document(store_, files_, owner, document);
    persist();
}

std::string Service::read_document(const DocumentRecord& record) const {
    auto bytes = files_.read(record.id);
    if (sha256_hex(bytes) != record.sha256 || bytes.size() != record.size)
        throw IoError("document " + record.iri.str() + " does not match its recorded digest");
    return bytes;
}

void Service::grant(const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee) {
    grant_permission(store_, owner, resource, grantee);
    persist();
}

void Service::revoke(const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee) {
    revoke_permission(store_, owner, resource, grantee);
    persist();
}

rdf::Iri Service::mint_package_iri() const { return base_.append("/dossiers/" + random_uuid()); }

void Service::persist() {
    std::lock_guard lock(persist_mutex_);
    // Snapshot inside the lock so a later writer never loses to an earlier one.
    if (store_.version() == persisted_version_) return;
    auto version = store_.version();
    rdf::save_store(store_, config_.data_dir / "store");
    persisted_version_ = version;
}

}  // namespace webcas::cas
