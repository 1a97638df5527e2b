#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "stemvine/cli.hpp"

namespace fs = std::filesystem;
using namespace stemvine;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("svcert_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Run the CLI with stdout captured.
int run_capture(const std::vector<std::string>& args, std::string* out) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    const int code = cli::run(args);
    std::cout.rdbuf(old);
    if (out) *out = captured.str();
    return code;
}

}  // namespace

TEST_CASE("template then validate round trip") {
    TempDir dir;
    const std::string arch = dir.file("resnet.arch");
    CHECK(cli::run({"template", "resnet34", "--out", arch, "--dim", "3", "--classes", "2"}) == 0);
    std::string out;
    CHECK(run_capture({"validate", arch}, &out) == 0);
    CHECK(out.find("ok:") != std::string::npos);
    CHECK(out.find("37 weight matrices") != std::string::npos);
}

TEST_CASE("validate flags a broken architecture with exit 1") {
    TempDir dir;
    const std::string arch = dir.file("broken.arch");
    std::ofstream(arch) << "stemvine/1\nstem {\n  weight in=2 out=3 s=1 b=0\n"
                           "  nonlin kind=relu dim=4\n}\n";
    std::string out;
    CHECK(run_capture({"validate", arch}, &out) == 1);
    CHECK(out.find("stem_dim_mismatch") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli::run({"no-such-command"}) == 2);
    CHECK(cli::run({"certify", "--bogus-flag"}) == 2);
    CHECK(cli::run({"template", "cnn9000"}) == 2);
}

TEST_CASE("train-demo exports artifacts that certify again") {
    TempDir dir;
    const std::string report_path = dir.file("report.txt");
    const std::string arch = dir.file("model.arch");
    const std::string weights = dir.file("weights");
    const std::string data = dir.file("train.svd");
    CHECK(cli::run({"train-demo", "--seed", "5", "--epochs", "60", "--out", report_path,
                    "--out-arch", arch, "--out-weights", weights, "--out-data", data}) == 0);
    const std::string report = slurp(report_path);
    CHECK(report.rfind("svcert/1\n", 0) == 0);
    CHECK(report.find("generalization_bound: ") != std::string::npos);

    // The exported artifacts feed certify directly.
    const std::string second_path = dir.file("report2.txt");
    CHECK(cli::run({"certify", "--arch", arch, "--weights", weights, "--data", data, "--out",
                    second_path}) == 0);
    const std::string second = slurp(second_path);
    // Same inputs, same certificate.
    CHECK(second == report);
}

TEST_CASE("certify reports R = 0 for zero-b zero-weight networks") {
    TempDir dir;
    const std::string arch = dir.file("zero.arch");
    CHECK(cli::run({"template", "resnet34", "--out", arch, "--dim", "2", "--classes", "2", "--b",
                    "0"}) == 0);
    const std::string weights = dir.file("weights");
    fs::create_directories(weights);
    const ArchFile parsed = parse_arch_file(cli::read_file(arch));
    for (const auto& ref : weight_slots(parsed.network))
        cli::write_matrix_file((fs::path(weights) / (ref.id + ".svm")).string(),
                               Matrix(ref.slot->in_dim, ref.slot->out_dim, 0.0));
    const LabeledDataset d = make_blobs(16, 2, 2, 0.4, 3);
    cli::write_dataset_file(dir.file("data.svd"), d);

    std::string out;
    CHECK(run_capture({"certify", "--arch", arch, "--weights", weights, "--data",
                       dir.file("data.svd"), "--out", "-"},
                      &out) == 0);
    CHECK(out.find("\nR: 0\n") != std::string::npos);
}

TEST_CASE("sweep-norms scales R quadratically when only b scales") {
    TempDir dir;
    const std::string arch = dir.file("model.arch");
    const std::string weights = dir.file("weights");
    const std::string data = dir.file("train.svd");
    REQUIRE(cli::run({"train-demo", "--seed", "6", "--epochs", "30", "--out", dir.file("r.txt"),
                      "--out-arch", arch, "--out-weights", weights, "--out-data", data}) == 0);
    const std::string csv_path = dir.file("sweep.csv");
    CHECK(cli::run({"sweep-norms", "--arch", arch, "--data", data, "--factors", "1,2", "--what",
                    "b", "--out", csv_path}) == 0);
    const std::string csv = slurp(csv_path);
    CHECK(csv.rfind("# svsweep/1\n", 0) == 0);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // version
    std::getline(lines, line);  // header
    REQUIRE(line == "factor,R,generalization_bound");
    double r1 = -1.0, r2 = -1.0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string f, r, g;
        std::getline(cells, f, ',');
        std::getline(cells, r, ',');
        std::getline(cells, g, ',');
        if (f == "1") r1 = std::stod(r);
        if (f == "2") r2 = std::stod(r);
    }
    REQUIRE(r1 > 0.0);
    CHECK(r2 == doctest::Approx(4.0 * r1).epsilon(1e-12));
}

TEST_CASE("sweep-placement reports matching term counts") {
    std::string out;
    CHECK(run_capture({"sweep-placement", "--seed", "3"}, &out) == 0);
    CHECK(out.find("ALL PASS") != std::string::npos);
}

TEST_CASE("oracle-rademacher passes at reduced trial count") {
    std::string out;
    CHECK(run_capture({"oracle-rademacher", "--trials", "500", "--seed", "2"}, &out) == 0);
    CHECK(out.find("ALL PASS") != std::string::npos);
}

TEST_CASE("oracle-cover table passes") {
    std::string out;
    CHECK(run_capture({"oracle-cover", "--seed", "1"}, &out) == 0);
    CHECK(out.find("ALL PASS") != std::string::npos);
    CHECK(out.find("FAIL ") == std::string::npos);
}

TEST_CASE("stdout output with --out -") {
    std::string out;
    CHECK(run_capture({"template", "resnet34", "--out", "-", "--dim", "2"}, &out) == 0);
    CHECK(out.rfind("stemvine/1\n", 0) == 0);
    CHECK(parse_network(out).vines.size() == 16);
}
