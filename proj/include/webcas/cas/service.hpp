#pragma once

#include <atomic>
#include <mutex>

#include "webcas/cas/access.hpp"
#include "webcas/cas/actor.hpp"
#include "webcas/cas/config.hpp"
#include "webcas/cas/documents.hpp"

namespace webcas::cas {

/// Exclusive advisory lock on <directory>/lock for the lifetime of the
/// object. Throws IoError when another process or Service holds it.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& directory);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    int fd_ = -1;
};

/// One CAS instance on disk:
///   <data_dir>/store/       persisted quad store
///   <data_dir>/files/       document bytes by uuid
///   <data_dir>/identities/  identity.pem + profile.ttl per local actor
/// Mutating members persist the store before returning. One Service per
/// data directory at a time.
class Service {
public:
    explicit Service(ServiceConfig config);

    const ServiceConfig& config() const noexcept { return config_; }
    const rdf::Iri& base() const noexcept { return base_; }
    rdf::QuadStore& store() noexcept { return store_; }
    const rdf::QuadStore& store() const noexcept { return store_; }
    const DocumentStore& files() const noexcept { return files_; }

    /// Validates the slug only.
    ActorId actor_id(const std::string& slug) const { return ActorId(base_, slug); }
    std::optional<ActorId> find_actor(const std::string& slug) const;
    /// Throws NotFoundError.
    ActorId require_actor(const std::string& slug) const;
    std::optional<ActorId> actor_by_webid(const rdf::Iri& webid) const;
    std::vector<ActorId> actors() const;

    std::pair<ActorId, webid::IdentityBundle> create_actor(const std::string& slug,
                                                           const webid::Attributes& attributes,
                                                           const rdf::Iri& actor_type);
    webid::IdentityBundle identity(const std::string& slug) const;
    std::optional<rdf::Graph> profile(const std::string& slug) const;

    DocumentRecord store_document(const ActorId& actor, std::string_view bytes, const std::string& filename,
                                  const std::string& media_type);
    void remove_document(const ActorId& owner, const rdf::Iri& document);
    /// Bytes of a stored document; throws IoError when the file no longer
    /// matches its recorded digest.
    std::string read_document(const DocumentRecord& record) const;

    AccessDecision check_access(const rdf::Iri& resource, const std::optional<rdf::Iri>& requester) const {
        return cas::check_access(store_, resource, requester);
    }
    void grant(const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee);
    void revoke(const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee);

    /// Fresh base/dossiers/<uuid> IRI.
    rdf::Iri mint_package_iri() const;

    /// Writes the store if it changed since the last write.
    void persist();

    /// Bumped whenever a locally served profile changes.
    std::uint64_t profile_generation() const noexcept { return profile_generation_.load(); }

private:
    ServiceConfig config_;
    rdf::Iri base_;
    DirectoryLock lock_;
    rdf::QuadStore store_;
    DocumentStore files_;
    std::mutex persist_mutex_;
    std::uint64_t persisted_version_ = 0;
    std::atomic<std::uint64_t> profile_generation_{0};
};

}  // namespace webcas::cas
