#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fracvem/errors.hpp"
#include "fracvem/gridgen.hpp"

namespace fracvem {

namespace {

struct RawElement {
    int type = 0;
    int physical = -1;
    std::vector<long> nodes;
};

struct RawMesh {
    std::map<long, Vec2> nodes;
    std::vector<RawElement> elements;
    std::map<int, std::string> names;
};

int nodes_per_element(int type) {
    switch (type) {
    case 1: return 2;   // line
    case 2: return 3;   // triangle
    case 3: return 4;   // quadrangle
    case 15: return 1;  // point
    default: return -1;
    }
}

// Line-oriented reader that tracks the current section for error messages.
class Reader {
public:
    explicit Reader(const std::string &text) : in_(text) {}

    bool next_line(std::string &line) {
        while (std::getline(in_, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    }

    std::string line(const std::string &section) {
        std::string l;
        if (!next_line(l)) fail(section, "unexpected end of file");
        return l;
    }

    void expect_end(const std::string &section) {
        const std::string l = line(section);
        if (trim(l) != "$End" + section) fail(section, "missing $End" + section);
    }

    [[noreturn]] static void fail(const std::string &section, const std::string &what) {
        throw ParseError("gmsh: section $" + section + ": " + what);
    }

    static std::string trim(const std::string &s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? "" : s.substr(a, b - a + 1);
    }

private:
    std::istringstream in_;
};

template <class T>
std::vector<T> numbers(const std::string &l, const std::string &section) {
    std::istringstream is(l);
    std::vector<T> out;
    T v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) Reader::fail(section, "non-numeric token in \"" + l + "\"");
    return out;
}

void read_physical_names(Reader &r, RawMesh &m) {
    const auto n = numbers<long>(r.line("PhysicalNames"), "PhysicalNames");
    if (n.size() != 1) Reader::fail("PhysicalNames", "bad count");
    for (long k = 0; k < n[0]; ++k) {
        const std::string l = r.line("PhysicalNames");
        std::istringstream is(l);
        int dim = 0, tag = 0;
        if (!(is >> dim >> tag)) Reader::fail("PhysicalNames", "bad entry \"" + l + "\"");
        std::string rest;
        std::getline(is, rest);
        rest = Reader::trim(rest);
        if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
            rest = rest.substr(1, rest.size() - 2);
        }
        m.names[tag] = rest;
    }
    r.expect_end("PhysicalNames");
}

void read_v2(Reader &r, RawMesh &m, const std::string &first_section) {
    std::string header = first_section;
    do {
        if (header == "$PhysicalNames") {
            read_physical_names(r, m);
        } else if (header == "$Nodes") {
            const auto n = numbers<long>(r.line("Nodes"), "Nodes");
            if (n.size() != 1) Reader::fail("Nodes", "bad count");
            for (long k = 0; k < n[0]; ++k) {
                const auto v = numbers<double>(r.line("Nodes"), "Nodes");
                if (v.size() < 3) Reader::fail("Nodes", "short node record");
                m.nodes[static_cast<long>(v[0])] = {v[1], v[2]};
            }
            r.expect_end("Nodes");
        } else if (header == "$Elements") {
            const auto n = numbers<long>(r.line("Elements"), "Elements");
            if (n.size() != 1) Reader::fail("Elements", "bad count");
            for (long k = 0; k < n[0]; ++k) {
                const auto v = numbers<long>(r.line("Elements"), "Elements");
                if (v.size() < 3) Reader::fail("Elements", "short element record");
                RawElement e;
                e.type = static_cast<int>(v[1]);
                const long ntags = v[2];
                const int nn = nodes_per_element(e.type);
                if (nn < 0) {
                    Reader::fail("Elements", "unsupported element type " + std::to_string(e.type));
                }
                if (static_cast<long>(v.size()) != 3 + ntags + nn) {
                    Reader::fail("Elements", "wrong record length");
                }
                e.physical = ntags > 0 ? static_cast<int>(v[3]) : -1;
                e.nodes.assign(v.begin() + 3 + ntags, v.end());
                m.elements.push_back(std::move(e));
            }
            r.expect_end("Elements");
        } else {
            // Skip unknown sections.
            const std::string name = header.substr(1);
            std::string l;
            while (true) {
                l = Reader::trim(r.line(name));
                if (l == "$End" + name) break;
            }
        }
        std::string l;
        if (!r.next_line(l)) break;
        header = Reader::trim(l);
    } while (true);
}

void read_v4(Reader &r, RawMesh &m, const std::string &first_section) {
    // Physical tags per (dim, entity).
    std::map<std::pair<int, int>, int> entity_phys;
    std::string header = first_section;
    do {
        if (header == "$PhysicalNames") {
            read_physical_names(r, m);
        } else if (header == "$Entities") {
            const auto c = numbers<long>(r.line("Entities"), "Entities");
            if (c.size() != 4) Reader::fail("Entities", "bad counts");
            for (int dim = 0; dim < 4; ++dim) {
                for (long k = 0; k < c[dim]; ++k) {
                    const auto v = numbers<double>(r.line("Entities"), "Entities");
                    const std::size_t at = dim == 0 ? 4 : 7;
                    if (v.size() <= at) Reader::fail("Entities", "short entity record");
                    const auto nphys = static_cast<std::size_t>(v[at]);
                    if (v.size() < at + 1 + nphys) Reader::fail("Entities", "short entity record");
                    if (nphys > 0) {
                        entity_phys[{dim, static_cast<int>(v[0])}] = static_cast<int>(v[at + 1]);
                    }
                }
            }
            r.expect_end("Entities");
        } else if (header == "$Nodes") {
            const auto c = numbers<long>(r.line("Nodes"), "Nodes");
            if (c.size() != 4) Reader::fail("Nodes", "bad header");
            for (long b = 0; b < c[0]; ++b) {
                const auto bh = numbers<long>(r.line("Nodes"), "Nodes");
                if (bh.size() != 4) Reader::fail("Nodes", "bad block header");
                if (bh[2] != 0) Reader::fail("Nodes", "parametric nodes not supported");
                std::vector<long> tags;
                for (long k = 0; k < bh[3]; ++k) {
                    const auto t = numbers<long>(r.line("Nodes"), "Nodes");
                    if (t.size() != 1) Reader::fail("Nodes", "bad node tag");
                    tags.push_back(t[0]);
                }
                for (long k = 0; k < bh[3]; ++k) {
                    const auto v = numbers<double>(r.line("Nodes"), "Nodes");
                    if (v.size() != 3) Reader::fail("Nodes", "bad coordinates");
                    m.nodes[tags[k]] = {v[0], v[1]};
                }
            }
            r.expect_end("Nodes");
        } else if (header == "$Elements") {
            const auto c = numbers<long>(r.line("Elements"), "Elements");
            if (c.size() != 4) Reader::fail("Elements", "bad header");
            for (long b = 0; b < c[0]; ++b) {
                const auto bh = numbers<long>(r.line("Elements"), "Elements");
                if (bh.size() != 4) Reader::fail("Elements", "bad block header");
                const int dim = static_cast<int>(bh[0]);
                const int type = static_cast<int>(bh[2]);
                const int nn = nodes_per_element(type);
                if (nn < 0) Reader::fail("Elements", "unsupported element type " + std::to_string(type));
                auto it = entity_phys.find({dim, static_cast<int>(bh[1])});
                const int phys = it == entity_phys.end() ? -1 : it->second;
                for (long k = 0; k < bh[3]; ++k) {
                    const auto v = numbers<long>(r.line("Elements"), "Elements");
                    if (static_cast<int>(v.size()) != 1 + nn) Reader::fail("Elements", "wrong record length");
                    m.elements.push_back({type, phys, {v.begin() + 1, v.end()}});
                }
            }
            r.expect_end("Elements");
        } else {
            const std::string name = header.substr(1);
            while (Reader::trim(r.line(name)) != "$End" + name) {
            }
        }
        std::string l;
        if (!r.next_line(l)) break;
        header = Reader::trim(l);
    } while (true);
}

}  // namespace

GmshMesh parse_gmsh(const std::string &text) {
    Reader r(text);
    std::string l;
    if (!r.next_line(l) || Reader::trim(l) != "$MeshFormat") {
        throw ParseError("gmsh: missing $MeshFormat section");
    }
    const std::string fmt = r.line("MeshFormat");
    std::istringstream is(fmt);
    std::string version;
    int binary = 0;
    is >> version >> binary;
    if (binary != 0) Reader::fail("MeshFormat", "binary files are not supported");
    r.expect_end("MeshFormat");

    RawMesh raw;
    std::string first;
    if (r.next_line(first)) {
        first = Reader::trim(first);
        if (version == "2.2" || version == "2.1" || version == "2") {
            read_v2(r, raw, first);
        } else if (version == "4.1") {
            read_v4(r, raw, first);
        } else {
            Reader::fail("MeshFormat", "unsupported version " + version);
        }
    }
    if (raw.nodes.empty()) throw ParseError("gmsh: no $Nodes section");

    GmshMesh gm;
    gm.physical_names = raw.names;
    MeshData md;
    std::map<long, Index> node_id;
    auto nid = [&](long tag) {
        auto it = node_id.find(tag);
        if (it != node_id.end()) return it->second;
        auto p = raw.nodes.find(tag);
        if (p == raw.nodes.end()) throw ParseError("gmsh: element references unknown node " + std::to_string(tag));
        const auto id = static_cast<Index>(md.nodes.size());
        md.nodes.push_back(p->second);
        node_id[tag] = id;
        return id;
    };
    std::map<std::pair<Index, Index>, Index> face_of;
    for (const RawElement &e : raw.elements) {
        if (e.type != 2 && e.type != 3) continue;
        std::vector<Index> cn;
        for (long t : e.nodes) cn.push_back(nid(t));
        std::vector<Index> faces;
        for (std::size_t k = 0; k < cn.size(); ++k) {
            const Index a = cn[k], b = cn[(k + 1) % cn.size()];
            const auto key = std::minmax(a, b);
            auto it = face_of.find(key);
            if (it == face_of.end()) {
                it = face_of.emplace(key, static_cast<Index>(md.faces.size())).first;
                md.faces.push_back({a, b});
            }
            faces.push_back(it->second);
        }
        md.cells.push_back(std::move(faces));
    }
    if (md.cells.empty()) throw ParseError("gmsh: no 2D elements");
    gm.face_physical.assign(md.faces.size(), -1);
    for (const RawElement &e : raw.elements) {
        if (e.type != 1) continue;
        auto a = node_id.find(e.nodes[0]);
        auto b = node_id.find(e.nodes[1]);
        if (a == node_id.end() || b == node_id.end()) {
            throw ParseError("gmsh: line element not on the 2D mesh");
        }
        auto it = face_of.find(std::minmax(a->second, b->second));
        if (it == face_of.end()) throw ParseError("gmsh: line element is not a mesh edge");
        gm.face_physical[it->second] = e.physical;
    }
    gm.mesh = build_poly_mesh(std::move(md));
    return gm;
}

GmshMesh import_gmsh(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_gmsh(ss.str());
}

FractureNetwork fractures_from_gmsh(const GmshMesh &gm, const std::string &prefix) {
    FractureNetwork net;
    for (const auto &[tag, name] : gm.physical_names) {
        if (name.rfind(prefix, 0) != 0) continue;
        std::map<Index, int> degree;
        std::vector<Index> faces;
        for (std::size_t f = 0; f < gm.face_physical.size(); ++f) {
            if (gm.face_physical[f] != tag) continue;
            faces.push_back(static_cast<Index>(f));
            for (Index n : gm.mesh.face(static_cast<Index>(f)).nodes) ++degree[n];
        }
        if (faces.empty()) continue;
        std::vector<Index> ends;
        for (auto [n, d] : degree) {
            if (d == 1) ends.push_back(n);
        }
        if (ends.size() != 2) {
            throw ParseError("gmsh: physical group " + name + " is not a single open chain");
        }
        Fracture fr;
        fr.a = gm.mesh.node(ends[0]);
        fr.b = gm.mesh.node(ends[1]);
        const double len = distance(fr.a, fr.b);
        for (Index f : faces) {
            for (Index n : gm.mesh.face(f).nodes) {
                if (point_segment_distance(gm.mesh.node(n), fr.a, fr.b) > 1e-9 * len) {
                    throw ParseError("gmsh: physical group " + name + " is not straight");
                }
            }
        }
        net.fractures.push_back(fr);
    }
    return net;
}

}  // namespace fracvem
