#include "webcas/rdf/persistence.hpp"

#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "webcas/error.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::rdf {
namespace fs = std::filesystem;

namespace {

const Iri& graph_file_predicate() {
    static const Iri iri = vocab::cas("graphFile");
    return iri;
}

bool valid_graph_file_name(const std::string& name) {
    static const std::regex pattern("g_[0-9]+\\.ttl");
    return std::regex_match(name, pattern);
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view contents) {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp" + std::to_string(rng()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path.string());
    return buf.str();
}

namespace {

// Graph -> file assignment of an existing index, so unchanged graphs keep
// their file and need no rewrite. Unreadable indexes are simply ignored.
std::map<Iri, std::string> previous_assignment(const fs::path& directory) {
    std::map<Iri, std::string> out;
    try {
        const fs::path index_path = directory / "index.ttl";
        if (!fs::exists(index_path)) return out;
        for (const Triple& t : parse_turtle(read_file(index_path)).graph)
            if (t.predicate == graph_file_predicate() && t.subject.is_iri() && t.object.is_literal() &&
                valid_graph_file_name(t.object.literal().lexical()))
                out.emplace(t.subject.iri(), t.object.literal().lexical());
    } catch (const Error&) {
        out.clear();
    }
    return out;
}

void write_if_changed(const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (fs::is_regular_file(path, ec) && fs::file_size(path, ec) == contents.size() && read_file(path) == contents)
        return;
    write_file_atomic(path, contents);
}

}  // namespace

void save_store(const QuadStore& store, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());

    const auto graphs = store.snapshot();
    auto previous = previous_assignment(directory);
    std::set<std::string> used;
    std::map<Iri, std::string> assignment;
    for (const auto& [name, graph] : graphs) {
        auto it = previous.find(name);
        if (it != previous.end() && used.insert(it->second).second) assignment.emplace(name, it->second);
    }
    std::size_t n = 0;
    for (const auto& [name, graph] : graphs) {
        if (assignment.contains(name)) continue;
        std::string file;
        do file = "g_" + std::to_string(n++) + ".ttl";
        while (used.contains(file));
        used.insert(file);
        assignment.emplace(name, file);
    }

    Graph index;
    for (const auto& [name, graph] : graphs) {
        const std::string& file = assignment.at(name);
        write_if_changed(directory / file, serialize_turtle(graph, standard_prefixes()));
        index.insert(Triple(name, graph_file_predicate(), Literal(file)));
    }
    write_if_changed(directory / "index.ttl", serialize_turtle(index, {{"cas", Iri(vocab::kCasNs)}}));

    for (const auto& entry : fs::directory_iterator(directory, ec)) {
        const std::string name = entry.path().filename().string();
        if (valid_graph_file_name(name) && !used.contains(name)) fs::remove(entry.path(), ec);
    }
}

QuadStore load_store(const fs::path& directory) {
    const fs::path index_path = directory / "index.ttl";
    if (!fs::exists(index_path)) throw IoError("missing index file " + index_path.string());

    TurtleDocument index;
    try {
        index = parse_turtle(read_file(index_path));
    } catch (const ParseError& e) {
        throw ParseError("corrupt index " + index_path.string() + ": " + e.what());
    }

    QuadStore store;
    std::set<std::string> seen_files;
    for (const Triple& t : index.graph) {
        if (t.predicate != graph_file_predicate() || !t.subject.is_iri() || !t.object.is_literal())
            throw ParseError("corrupt index " + index_path.string() + ": unexpected statement " + to_ntriples(t.subject));
        const Iri& name = t.subject.iri();
        const std::string& file = t.object.literal().lexical();
        if (!valid_graph_file_name(file) || !seen_files.insert(file).second)
            throw ParseError("corrupt index " + index_path.string() + ": bad file name '" + file + "'");
        const fs::path path = directory / file;
        if (!fs::exists(path)) throw IoError("graph file " + file + " for <" + name.str() + "> is missing");
        Graph graph;
        try {
            graph = parse_turtle(read_file(path), name).graph;
        } catch (const ParseError& e) {
            throw ParseError("graph <" + name.str() + "> (" + file + "): " + e.what());
        }
        std::vector<Quad> quads;
        quads.reserve(graph.size());
        for (const Triple& triple : graph) quads.emplace_back(name, triple);
        store.insert(quads);
    }
    return store;
}

}  // namespace webcas::rdf
