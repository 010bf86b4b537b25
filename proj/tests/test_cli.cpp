#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / "fracvem_cli_test";
    fs::create_directories(d);
    return d;
}

int run(const std::string &args) {
    const std::string cmd = std::string(FRACVEM_CLI) + " " + args + " >" + (scratch() / "out.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write(const std::string &name, const std::string &text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string output() {
    std::ifstream in(scratch() / "out.txt");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char *bc = R"("bc": {"left": {"pressure": 1}, "right": {"pressure": 0}, "bottom": {"flux": 0}, "top": {"flux": 0}})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("solve") == 2);
    CHECK(run("solve --config /nonexistent.json") == 2);
}

TEST_CASE("preset run") {
    const std::string dir = (scratch() / "preset").string();
    fs::create_directories(dir);
    CHECK(run("preset patch_test --preset-dir " + std::string(FRACVEM_SOURCE_DIR) + "/presets --output-dir " + dir) == 0);
    CHECK(output().find("err_pressure") != std::string::npos);
    CHECK(fs::exists(fs::path(dir) / "patch_test.txt"));
    CHECK(fs::exists(fs::path(dir) / "patch_test.vtk"));
    CHECK(run("preset no_such_preset --preset-dir " + std::string(FRACVEM_SOURCE_DIR) + "/presets") == 2);
}

TEST_CASE("stages") {
    const std::string cfg = write("stages.json", std::string(R"({"domain": [0, 0, 1, 1], "grid": {"cartesian": {"nx": 3, "ny": 3}}, )") +
                                                     bc + R"(, "outputs": {"report": "stages.txt"}})");
    const std::string out = " --output-dir " + scratch().string();
    CHECK(run("mesh --config " + cfg + out) == 0);
    CHECK(output().find("mesh.cells = 9") != std::string::npos);
    CHECK(output().find("n_dof") == std::string::npos);
    CHECK(run("solve --config " + cfg + out) == 0);
    CHECK(output().find("n_dof") != std::string::npos);
    CHECK(output().find("condition") == std::string::npos);
    CHECK(run("report --config " + cfg + out + " --threads 2") == 0);
    CHECK(output().find("condition") != std::string::npos);
}

TEST_CASE("error exit codes") {
    const std::string out = " --output-dir " + scratch().string();
    const std::string unknown = write("unknown.json", std::string(R"({"domain": [0, 0, 1, 1], "colour": 1, "grid": {"cartesian": {"nx": 2, "ny": 2}}, )") + bc + "}");
    CHECK(run("solve --strict --config " + unknown + out) == 2);
    CHECK(run("solve --config " + unknown + out) == 0);
    CHECK(output().find("warning") != std::string::npos);

    const std::string msh = write("broken.msh", "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n2\n1 0 0 0\n");
    const std::string gm = write("gmsh.json", std::string(R"({"domain": [0, 0, 1, 1], "grid": {"gmsh": {"path": ")") + msh + R"("}}, )" + bc + "}");
    CHECK(run("mesh --config " + gm + out) == 2);

    const std::string crowded = write("crowded.json", std::string(R"({"domain": [0, 0, 1, 1], "grid": {"cut": {"nx": 3, "ny": 3}},
      "fractures": {"list": [{"a": [0.1, 0.1], "b": [0.9, 0.9]}, {"a": [0.1, 0.9], "b": [0.9, 0.1]}, {"a": [0.1, 0.5], "b": [0.9, 0.52]}]}, )") + bc + "}");
    CHECK(run("mesh --config " + crowded + out) == 3);
    CHECK(output().find("mesh error") != std::string::npos);
}

}
