#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracvem/errors.hpp"
#include "fracvem/pipeline.hpp"

namespace fracvem {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Ctx {
    bool strict = false;
    std::vector<std::string> *warnings = nullptr;
    std::string base;

    void keys(const json &j, const std::set<std::string> &allowed, const std::string &where) const {
        if (!j.is_object()) throw ConfigError(where + ": expected an object");
        for (const auto &[k, v] : j.items()) {
            if (allowed.count(k)) continue;
            const std::string msg = "unknown key '" + where + (where.empty() ? "" : ".") + k + "'";
            if (strict) throw ConfigError(msg);
            if (warnings) warnings->push_back(msg);
        }
    }

    std::string path(const std::string &p) const {
        if (p.empty() || fs::path(p).is_absolute()) return p;
        return (fs::path(base) / p).lexically_normal().string();
    }
};

template <class T>
T get(const json &j, const std::string &key, const std::string &where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::out_of_range &) {
        throw ConfigError("missing key '" + where + "." + key + "'");
    } catch (const json::type_error &) {
        throw ConfigError("type mismatch for '" + where + "." + key + "'");
    }
}

template <class T>
T get_or(const json &j, const std::string &key, const std::string &where, T fallback) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Vec2 point(const json &j, const std::string &where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError("type mismatch for '" + where + "': expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

void require_file(const std::string &p, const std::string &what) {
    if (!fs::exists(p)) throw ConfigError(what + " not found: " + p);
}

GridConfig parse_grid(const json &j, const Ctx &ctx, const std::string &where) {
    static const std::set<std::string> backends{"cartesian", "cut", "voronoi", "gmsh"};
    ctx.keys(j, backends, where);
    int n = 0;
    for (const auto &b : backends) n += j.contains(b);
    if (n != 1) throw ConfigError(where + ": exactly one grid backend must be given");
    GridConfig g;
    if (j.contains("gmsh")) {
        const json &o = j["gmsh"];
        ctx.keys(o, {"path"}, where + ".gmsh");
        g.backend = GridBackend::gmsh;
        g.path = ctx.path(get<std::string>(o, "path", where + ".gmsh"));
        require_file(g.path, "gmsh file");
        return g;
    }
    const std::string name = j.contains("cartesian") ? "cartesian" : j.contains("cut") ? "cut" : "voronoi";
    const json &o = j[name];
    const std::string w = where + "." + name;
    g.backend = name == "cartesian" ? GridBackend::cartesian : name == "cut" ? GridBackend::cut : GridBackend::voronoi;
    if (g.backend == GridBackend::cartesian) ctx.keys(o, {"nx", "ny"}, w);
    if (g.backend == GridBackend::cut) ctx.keys(o, {"nx", "ny", "snap_tol", "max_fractures_per_cell"}, w);
    if (g.backend == GridBackend::voronoi) ctx.keys(o, {"nx", "ny", "snap_tol", "delta", "delta1", "delta2"}, w);
    g.nx = get<int>(o, "nx", w);
    g.ny = get<int>(o, "ny", w);
    if (g.nx < 1 || g.ny < 1) throw ConfigError(w + ": nx and ny must be at least 1");
    g.snap_tol = get_or(o, "snap_tol", w, g.snap_tol);
    g.max_fractures_per_cell = get_or(o, "max_fractures_per_cell", w, g.max_fractures_per_cell);
    g.delta = get_or(o, "delta", w, g.delta);
    g.delta1 = get_or(o, "delta1", w, g.delta1);
    g.delta2 = get_or(o, "delta2", w, g.delta2);
    if (!(g.snap_tol > 0.0 && g.snap_tol < 0.1)) throw ConfigError(w + ".snap_tol must lie in (0, 0.1)");
    for (double d : {g.delta, g.delta1, g.delta2}) {
        if (!(d > 0.0 && d < 0.5)) throw ConfigError(w + ": seed offsets must lie in (0, 0.5)");
    }
    return g;
}

Fracture parse_fracture_data(const json &o, const Ctx &ctx, const std::string &w, Fracture f) {
    (void)ctx;
    f.aperture = get_or(o, "aperture", w, f.aperture);
    f.tangential_permeability = get_or(o, "tangential_permeability", w, f.tangential_permeability);
    f.normal_permeability = get_or(o, "normal_permeability", w, f.normal_permeability);
    return f;
}

const char *mean_name(MeanKind m) { return m == MeanKind::arithmetic ? "arithmetic" : "harmonic"; }

std::string side_name(int s) {
    static const char *names[4] = {"left", "right", "bottom", "top"};
    return names[s];
}

}  // namespace

RunConfig parse_config_text(const std::string &text, const std::string &base_dir, bool strict,
                            std::vector<std::string> *warnings) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    const Ctx ctx{strict, warnings, base_dir};
    ctx.keys(j, {"name", "domain", "grid", "coarsen", "permeability", "fractures", "intersection", "bc", "gauge",
                 "source", "exact", "reference", "line", "solver", "outputs"},
             "");
    RunConfig c;
    c.name = get_or<std::string>(j, "name", "", c.name);

    if (!j.contains("domain")) throw ConfigError("missing key 'domain'");
    const auto d = get<std::vector<double>>(j, "domain", "");
    if (d.size() != 4 || !(d[2] > d[0]) || !(d[3] > d[1])) {
        throw ConfigError("domain must be [xmin, ymin, xmax, ymax] with positive extent");
    }
    c.domain = {d[0], d[1], d[2], d[3]};

    if (!j.contains("grid")) throw ConfigError("missing key 'grid'");
    c.grid = parse_grid(j["grid"], ctx, "grid");

    if (j.contains("coarsen")) {
        const json &o = j["coarsen"];
        ctx.keys(o, {"mode", "volume_factor", "strength_threshold", "target_cells"}, "coarsen");
        c.coarsen.enabled = true;
        const auto mode = get<std::string>(o, "mode", "coarsen");
        if (mode == "volume") {
            c.coarsen.params.mode = CoarsenMode::by_volume;
        } else if (mode == "strength") {
            c.coarsen.params.mode = CoarsenMode::by_strength;
        } else {
            throw ConfigError("coarsen.mode must be 'volume' or 'strength'");
        }
        auto &p = c.coarsen.params;
        p.volume_factor = get_or(o, "volume_factor", "coarsen", p.volume_factor);
        p.strength_threshold = get_or(o, "strength_threshold", "coarsen", p.strength_threshold);
        p.target_cells = get_or(o, "target_cells", "coarsen", p.target_cells);
        if (!(p.volume_factor > 0.0 && p.volume_factor <= 1.0)) throw ConfigError("coarsen.volume_factor must lie in (0, 1]");
        if (!(p.strength_threshold > 0.0 && p.strength_threshold < 1.0)) {
            throw ConfigError("coarsen.strength_threshold must lie in (0, 1)");
        }
        if (p.target_cells < 0) throw ConfigError("coarsen.target_cells must be non-negative");
    }

    if (j.contains("permeability")) {
        const json &o = j["permeability"];
        ctx.keys(o, {"uniform", "file", "spe10", "spe10_synthetic", "means"}, "permeability");
        int n = 0;
        for (const char *k : {"uniform", "file", "spe10", "spe10_synthetic"}) n += o.contains(k);
        if (n != 1) throw ConfigError("permeability: exactly one source must be given");
        auto &p = c.permeability;
        if (o.contains("uniform")) {
            p.source = PermSource::uniform;
            p.value = get<double>(o, "uniform", "permeability");
            if (!(p.value > 0.0)) throw ConfigError("permeability.uniform must be positive");
        } else if (o.contains("file")) {
            p.source = PermSource::file;
            p.path = ctx.path(get<std::string>(o, "file", "permeability"));
            require_file(p.path, "permeability file");
        } else if (o.contains("spe10")) {
            const json &s = o["spe10"];
            ctx.keys(s, {"path", "layer"}, "permeability.spe10");
            p.source = PermSource::spe10;
            p.layer = get<int>(s, "layer", "permeability.spe10");
            p.path = ctx.path(get_or<std::string>(s, "path", "permeability.spe10", ""));
            if (p.layer < 1) throw ConfigError("permeability.spe10.layer must be at least 1");
            if (!p.path.empty()) require_file(p.path, "SPE10 file");
        } else {
            const json &s = o["spe10_synthetic"];
            ctx.keys(s, {"seed"}, "permeability.spe10_synthetic");
            p.source = PermSource::spe10_synthetic;
            p.seed = get_or<unsigned>(s, "seed", "permeability.spe10_synthetic", p.seed);
        }
        if (o.contains("means")) {
            p.means.clear();
            for (const auto &m : get<std::vector<std::string>>(o, "means", "permeability")) {
                if (m == "arithmetic") {
                    p.means.push_back(MeanKind::arithmetic);
                } else if (m == "harmonic") {
                    p.means.push_back(MeanKind::harmonic);
                } else {
                    throw ConfigError("permeability.means entries must be 'arithmetic' or 'harmonic'");
                }
            }
            if (p.means.empty()) throw ConfigError("permeability.means must not be empty");
        }
    }

    if (j.contains("fractures")) {
        const json &o = j["fractures"];
        ctx.keys(o, {"file", "list", "aperture", "tangential_permeability", "normal_permeability"}, "fractures");
        const Fracture defaults = parse_fracture_data(o, ctx, "fractures", Fracture{});
        if (o.contains("file")) {
            const std::string p = ctx.path(get<std::string>(o, "file", "fractures"));
            require_file(p, "fracture file");
            c.fractures = read_fracture_csv(p, defaults);
        }
        if (o.contains("list")) {
            if (!o["list"].is_array()) throw ConfigError("type mismatch for 'fractures.list'");
            for (std::size_t i = 0; i < o["list"].size(); ++i) {
                const json &e = o["list"][i];
                const std::string w = "fractures.list[" + std::to_string(i) + "]";
                ctx.keys(e, {"a", "b", "aperture", "tangential_permeability", "normal_permeability"}, w);
                Fracture f = parse_fracture_data(e, ctx, w, defaults);
                if (!e.contains("a") || !e.contains("b")) throw ConfigError("missing endpoint in " + w);
                f.a = point(e["a"], w + ".a");
                f.b = point(e["b"], w + ".b");
                c.fractures.fractures.push_back(f);
            }
        }
        c.fractures.validate();
    }

    if (j.contains("intersection")) {
        const json &o = j["intersection"];
        ctx.keys(o, {"measure", "permeability"}, "intersection");
        if (o.contains("measure")) c.intersection.measure = get<double>(o, "measure", "intersection");
        if (o.contains("permeability")) c.intersection.permeability = get<double>(o, "permeability", "intersection");
    }

    if (!j.contains("bc")) throw ConfigError("missing key 'bc'");
    {
        const json &o = j["bc"];
        ctx.keys(o, {"left", "right", "bottom", "top"}, "bc");
        for (int s = 0; s < 4; ++s) {
            const std::string w = "bc." + side_name(s);
            if (!o.contains(side_name(s))) throw ConfigError("boundary condition missing on side " + side_name(s));
            const json &e = o[side_name(s)];
            ctx.keys(e, {"pressure", "flux", "exact"}, w);
            if (e.size() != 1) throw ConfigError(w + ": give exactly one of pressure, flux, exact");
            SideBc &b = c.bc[s];
            if (e.contains("pressure")) {
                b = {BcType::pressure, get<double>(e, "pressure", w), false};
            } else if (e.contains("flux")) {
                b = {BcType::flux, get<double>(e, "flux", w), false};
            } else if (e.contains("exact")) {
                const auto kind = get<std::string>(e, "exact", w);
                if (kind != "pressure" && kind != "flux") throw ConfigError(w + ".exact must be 'pressure' or 'flux'");
                b = {kind == "pressure" ? BcType::pressure : BcType::flux, 0.0, true};
            }
        }
    }
    c.gauge = get_or(j, "gauge", "", c.gauge);
    c.source = get_or(j, "source", "", c.source);

    if (j.contains("exact")) {
        const json &o = j["exact"];
        ctx.keys(o, {"linear", "sine"}, "exact");
        if (o.contains("linear") == o.contains("sine")) throw ConfigError("exact: give exactly one of linear, sine");
        if (o.contains("linear")) {
            const auto v = get<std::vector<double>>(o, "linear", "exact");
            if (v.size() != 3) throw ConfigError("exact.linear must be [c0, cx, cy]");
            c.exact.kind = ExactKind::linear;
            c.exact.coef = {v[0], v[1], v[2]};
        } else {
            if (!get<bool>(o, "sine", "exact")) throw ConfigError("exact.sine must be true when given");
            c.exact.kind = ExactKind::sine;
        }
    }
    for (const SideBc &b : c.bc) {
        if (b.exact && c.exact.kind == ExactKind::none) throw ConfigError("bc uses 'exact' but no exact solution is given");
    }

    if (j.contains("reference")) {
        const json &o = j["reference"];
        ctx.keys(o, {"tpfa", "fine_cut"}, "reference");
        c.tpfa_reference = get_or(o, "tpfa", "reference", false);
        if (o.contains("fine_cut")) {
            json g = json::object();
            g["cut"] = o["fine_cut"];
            c.fine_reference = parse_grid(g, ctx, "reference");
        }
    }

    if (j.contains("line")) {
        const json &o = j["line"];
        ctx.keys(o, {"from", "to", "samples"}, "line");
        c.line.enabled = true;
        if (!o.contains("from") || !o.contains("to")) throw ConfigError("line needs 'from' and 'to'");
        c.line.p0 = point(o["from"], "line.from");
        c.line.p1 = point(o["to"], "line.to");
        c.line.samples = get_or(o, "samples", "line", c.line.samples);
        if (c.line.samples < 1) throw ConfigError("line.samples must be positive");
    }

    if (j.contains("solver")) {
        const json &o = j["solver"];
        ctx.keys(o, {"condition", "timing_runs"}, "solver");
        c.condition = get_or(o, "condition", "solver", c.condition);
        c.timing_runs = get_or(o, "timing_runs", "solver", c.timing_runs);
        if (c.timing_runs < 1) throw ConfigError("solver.timing_runs must be positive");
    }

    if (j.contains("outputs")) {
        const json &o = j["outputs"];
        ctx.keys(o, {"report", "vtk", "csv"}, "outputs");
        c.report_file = get_or<std::string>(o, "report", "outputs", c.report_file);
        c.vtk_file = get_or<std::string>(o, "vtk", "outputs", "");
        c.csv_file = get_or<std::string>(o, "csv", "outputs", "");
    }
    if (!c.csv_file.empty() && !c.line.enabled) throw ConfigError("outputs.csv needs a 'line' section");
    return c;
}

RunConfig parse_config(const std::string &path, bool strict, std::vector<std::string> *warnings) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), fs::path(path).parent_path().string(), strict, warnings);
}

std::string echo_config(const RunConfig &c) {
    json j;
    j["name"] = c.name;
    j["domain"] = {c.domain.xmin, c.domain.ymin, c.domain.xmax, c.domain.ymax};
    auto grid_json = [](const GridConfig &g) {
        json o;
        switch (g.backend) {
        case GridBackend::cartesian: o["cartesian"] = {{"nx", g.nx}, {"ny", g.ny}}; break;
        case GridBackend::cut:
            o["cut"] = {{"nx", g.nx}, {"ny", g.ny}, {"snap_tol", g.snap_tol},
                        {"max_fractures_per_cell", g.max_fractures_per_cell}};
            break;
        case GridBackend::voronoi:
            o["voronoi"] = {{"nx", g.nx}, {"ny", g.ny}, {"snap_tol", g.snap_tol}, {"delta", g.delta},
                            {"delta1", g.delta1}, {"delta2", g.delta2}};
            break;
        case GridBackend::gmsh: o["gmsh"] = {{"path", g.path}}; break;
        }
        return o;
    };
    j["grid"] = grid_json(c.grid);
    if (c.coarsen.enabled) {
        const auto &p = c.coarsen.params;
        j["coarsen"] = {{"mode", p.mode == CoarsenMode::by_volume ? "volume" : "strength"},
                        {"volume_factor", p.volume_factor},
                        {"strength_threshold", p.strength_threshold},
                        {"target_cells", p.target_cells}};
    }
    json perm;
    switch (c.permeability.source) {
    case PermSource::uniform: perm["uniform"] = c.permeability.value; break;
    case PermSource::file: perm["file"] = c.permeability.path; break;
    case PermSource::spe10: perm["spe10"] = {{"path", c.permeability.path}, {"layer", c.permeability.layer}}; break;
    case PermSource::spe10_synthetic: perm["spe10_synthetic"] = {{"seed", c.permeability.seed}}; break;
    }
    perm["means"] = json::array();
    for (MeanKind m : c.permeability.means) perm["means"].push_back(mean_name(m));
    j["permeability"] = perm;
    json fl = json::array();
    for (const Fracture &f : c.fractures.fractures) {
        fl.push_back({{"a", {f.a.x, f.a.y}},
                      {"b", {f.b.x, f.b.y}},
                      {"aperture", f.aperture},
                      {"tangential_permeability", f.tangential_permeability},
                      {"normal_permeability", f.normal_permeability}});
    }
    j["fractures"] = {{"list", fl}};
    json inter = json::object();
    if (c.intersection.measure) inter["measure"] = *c.intersection.measure;
    if (c.intersection.permeability) inter["permeability"] = *c.intersection.permeability;
    j["intersection"] = inter;
    json bc;
    for (int s = 0; s < 4; ++s) {
        const SideBc &b = c.bc[s];
        const char *t = b.type == BcType::pressure ? "pressure" : "flux";
        if (b.exact) {
            bc[side_name(s)] = {{"exact", t}};
        } else {
            bc[side_name(s)] = {{t, b.value}};
        }
    }
    j["bc"] = bc;
    j["gauge"] = c.gauge;
    j["source"] = c.source;
    if (c.exact.kind == ExactKind::linear) j["exact"] = {{"linear", c.exact.coef}};
    if (c.exact.kind == ExactKind::sine) j["exact"] = {{"sine", true}};
    json ref = {{"tpfa", c.tpfa_reference}};
    if (c.fine_reference) ref["fine_cut"] = grid_json(*c.fine_reference)["cut"];
    j["reference"] = ref;
    if (c.line.enabled) {
        j["line"] = {{"from", {c.line.p0.x, c.line.p0.y}}, {"to", {c.line.p1.x, c.line.p1.y}}, {"samples", c.line.samples}};
    }
    j["solver"] = {{"condition", c.condition}, {"timing_runs", c.timing_runs}};
    j["outputs"] = {{"report", c.report_file}, {"vtk", c.vtk_file}, {"csv", c.csv_file}};
    return j.dump(2);
}

std::vector<double> parse_spe10(std::istream &is, int layer, const std::string &name) {
    constexpr std::size_t per_layer = static_cast<std::size_t>(spe10_nx) * spe10_ny;
    std::vector<double> all;
    std::string tok;
    while (is >> tok) {
        char *end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
            throw ParseError(name + ": non-numeric token '" + tok + "' at value " + std::to_string(all.size() + 1));
        }
        all.push_back(v);
    }
    if (all.size() < per_layer || all.size() % per_layer != 0) {
        throw ParseError(name + ": short file (" + std::to_string(all.size()) + " values, expected a multiple of " +
                         std::to_string(per_layer) + ")");
    }
    const auto layers = static_cast<int>(all.size() / per_layer);
    if (layer < 1 || layer > layers) {
        throw ConfigError(name + ": layer " + std::to_string(layer) + " out of range 1.." + std::to_string(layers));
    }
    const auto first = all.begin() + static_cast<std::ptrdiff_t>((layer - 1) * per_layer);
    std::vector<double> out(first, first + static_cast<std::ptrdiff_t>(per_layer));
    for (double v : out) {
        if (!(v > 0.0)) throw ParseError(name + ": non-positive permeability in layer " + std::to_string(layer));
    }
    return out;
}

std::vector<double> ingest_spe10(const std::string &path, int layer) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open SPE10 file " + path);
    return parse_spe10(is, layer, path);
}

std::vector<double> synthetic_spe10(unsigned seed) {
    // Small portable generator so that the field does not depend on the standard library.
    std::uint64_t state = 0x9E3779B97F4A7C15ull ^ seed;
    auto uniform = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (static_cast<double>(state >> 11) + 0.5) / 9007199254740992.0;
    };
    constexpr double pi = 3.14159265358979323846;
    auto gauss = [&]() { return std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * pi * uniform()); };

    const int nx = spe10_nx;
    const int ny = spe10_ny;
    std::vector<double> logk(static_cast<std::size_t>(nx) * ny);
    // Correlated background: smoothed white noise along both directions.
    std::vector<double> noise(logk.size());
    for (double &v : noise) v = gauss();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            int n = 0;
            for (int dj = -2; dj <= 2; ++dj) {
                for (int di = -2; di <= 2; ++di) {
                    const int ii = i + di;
                    const int jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
                    s += noise[static_cast<std::size_t>(jj) * nx + ii];
                    ++n;
                }
            }
            logk[static_cast<std::size_t>(j) * nx + i] = -2.0 + 2.5 * s / std::sqrt(static_cast<double>(n));
        }
    }
    // Sinuous channels running along x.
    const int channels = 9;
    for (int c = 0; c < channels; ++c) {
        const double y0 = (c + 0.5 + 0.6 * (uniform() - 0.5)) * ny / channels;
        const double amp = 3.0 + 5.0 * uniform();
        const double wave = 25.0 + 30.0 * uniform();
        const double phase = 2.0 * pi * uniform();
        const double half = 1.0 + 1.5 * uniform();
        const double level = 2.5 + 0.5 * uniform();
        for (int i = 0; i < nx; ++i) {
            const double yc = y0 + amp * std::sin(2.0 * pi * i / wave + phase);
            for (int j = 0; j < ny; ++j) {
                if (std::abs(j + 0.5 - yc) <= half) {
                    logk[static_cast<std::size_t>(j) * nx + i] = level + 0.3 * gauss();
                }
            }
        }
    }
    std::vector<double> k(logk.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = std::pow(10.0, std::clamp(logk[i], -4.0, 3.5));
    return k;
}

FractureNetwork read_fracture_csv(const std::string &path, const Fracture &defaults) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open fracture file " + path);
    FractureNetwork net;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char *end = nullptr;
            const double x = std::strtod(cell.c_str(), &end);
            while (end && (*end == ' ' || *end == '\r')) ++end;
            if (end == cell.c_str() || *end != '\0') {
                numeric = false;
                break;
            }
            v.push_back(x);
        }
        if (!numeric) {
            if (net.fractures.empty() && lineno == 1) continue;  // header
            throw ParseError(path + ":" + std::to_string(lineno) + ": non-numeric field");
        }
        if (v.size() != 4 && v.size() != 7) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 or 7 columns");
        }
        Fracture f = defaults;
        f.a = {v[0], v[1]};
        f.b = {v[2], v[3]};
        if (v.size() == 7) {
            f.aperture = v[4];
            f.tangential_permeability = v[5];
            f.normal_permeability = v[6];
        }
        net.fractures.push_back(f);
    }
    return net;
}

}  // namespace fracvem
