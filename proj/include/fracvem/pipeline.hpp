#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracvem/assembly.hpp"
#include "fracvem/gridgen.hpp"
#include "fracvem/metrics.hpp"

namespace fracvem {

enum class GridBackend { cartesian, cut, voronoi, gmsh };

struct GridConfig {
    GridBackend backend = GridBackend::cartesian;
    int nx = 1;
    int ny = 1;
    double snap_tol = 1e-6;
    int max_fractures_per_cell = 2;
    double delta = 0.1, delta1 = 0.1, delta2 = 0.15;
    std::string path;  // gmsh
};

struct CoarsenConfig {
    bool enabled = false;
    CoarsenParams params;
};

enum class PermSource { uniform, file, spe10, spe10_synthetic };

struct PermConfig {
    PermSource source = PermSource::uniform;
    double value = 1.0;
    std::string path;
    int layer = 4;
    unsigned seed = 1;
    std::vector<MeanKind> means{MeanKind::arithmetic};
};

struct SideBc {
    BcType type = BcType::none;
    double value = 0.0;
    bool exact = false;  // take the value from the exact solution
};

enum class ExactKind { none, linear, sine };

struct ExactConfig {
    ExactKind kind = ExactKind::none;
    std::array<double, 3> coef{};  // p = c0 + c1 x + c2 y
};

struct LineConfig {
    bool enabled = false;
    Vec2 p0, p1;
    int samples = 200;
};

struct RunConfig {
    std::string name = "run";
    Rect domain;
    GridConfig grid;
    CoarsenConfig coarsen;
    PermConfig permeability;
    FractureNetwork fractures;
    IntersectionOverrides intersection;
    std::array<SideBc, 4> bc{};  // left, right, bottom, top
    bool gauge = false;
    double source = 0.0;
    ExactConfig exact;
    bool tpfa_reference = false;
    std::optional<GridConfig> fine_reference;  // self-computed fine cut-grid reference
    LineConfig line;
    bool condition = false;
    int timing_runs = 1;
    std::string report_file = "report.txt";
    std::string vtk_file;
    std::string csv_file;
};

/// Strict mode rejects unknown keys; otherwise they are collected as warnings.
RunConfig parse_config_text(const std::string &text, const std::string &base_dir, bool strict,
                            std::vector<std::string> *warnings = nullptr);
RunConfig parse_config(const std::string &path, bool strict, std::vector<std::string> *warnings = nullptr);

/// Configuration with all defaults filled in, as JSON text.
std::string echo_config(const RunConfig &cfg);

constexpr int spe10_nx = 60;
constexpr int spe10_ny = 220;
constexpr double spe10_lx = 365.76;
constexpr double spe10_ly = 670.56;

/// One 60x220 layer (1-based index) of a whitespace separated SPE10 value stream.
std::vector<double> ingest_spe10(const std::string &path, int layer);
std::vector<double> parse_spe10(std::istream &is, int layer, const std::string &name);

/// Channelized stand-in for an SPE10 layer: sinuous high-permeability channels along x over
/// a log-normal background.
std::vector<double> synthetic_spe10(unsigned seed);

/// Fracture list "x0,y0,x1,y1[,aperture,kt,kn]" with an optional header line.
FractureNetwork read_fracture_csv(const std::string &path, const Fracture &defaults);

/// Flat report: ordered key/value pairs. Keys starting with "time" hold timings.
class Report {
public:
    void set(const std::string &key, const std::string &value);
    void set(const std::string &key, double value);
    void set(const std::string &key, long long value);
    void set(const std::string &key, std::size_t value) { set(key, static_cast<long long>(value)); }
    void set(const std::string &key, int value) { set(key, static_cast<long long>(value)); }
    std::optional<std::string> get(const std::string &key) const;
    double number(const std::string &key) const;
    const std::vector<std::pair<std::string, std::string>> &entries() const { return entries_; }
    std::string str() const;
    void write(const std::string &path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

enum class Stage { mesh, coarsen, solve, report };

struct PipelineOptions {
    Stage stage = Stage::solve;
    std::string output_dir = ".";
    int threads = 0;
};

/// Run the pipeline up to the requested stage, write the requested outputs and return the
/// report. Errors keep their type; the message is prefixed with the failing stage.
Report run_pipeline(const RunConfig &cfg, const PipelineOptions &opts);

/// Grid only, as used by the pipeline (fine mesh, before coarsening).
struct BuiltGrid {
    PolyMesh mesh;
    SplitNetwork split;
};
BuiltGrid build_grid(const RunConfig &cfg, const GridConfig &grid);

}  // namespace fracvem
