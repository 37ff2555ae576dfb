#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kTool = KREINCTL_PATH;
const std::string kProblems = PROBLEMS_DIR;

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("kreinctl_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = kTool + " " + args + " 2>" + (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string problem(const std::string& name) { return kProblems + "/" + name; }

}  // namespace

TEST_CASE("random output is byte-identical for a fixed seed") {
    const auto a = scratch() / "a.json", b = scratch() / "b.json", c = scratch() / "c.json";
    REQUIRE(run("random --n 3 --p 2 --q 1 --seed 17 --output " + a.string()) == 0);
    REQUIRE(run("random --n 3 --p 2 --q 1 --seed 17 --output " + b.string()) == 0);
    REQUIRE(run("random --n 3 --p 2 --q 1 --seed 18 --output " + c.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    CHECK_FALSE(fs::exists(scratch() / "a.json.tmp"));

    const auto ra = scratch() / "ra.json", rb = scratch() / "rb.json";
    REQUIRE(run("analyze --input " + a.string() + " --output " + ra.string()) == 0);
    REQUIRE(run("analyze --input " + a.string() + " --output " + rb.string()) == 0);
    CHECK(slurp(ra) == slurp(rb));
}

TEST_CASE("analyze the scalar example") {
    const auto out = scratch() / "scalar.json";
    REQUIRE(run("analyze --input " + problem("scalar_quadratic.json") + " --output " + out.string()) == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["eq1_residual"] == 0);
    CHECK(doc["eq2_residual"] == 0);
    REQUIRE(doc["cvs"].size() == 2);
    CHECK(doc["cvs"][0]["lambda0"].get<double>() == doctest::Approx(-1.0));
    CHECK(doc["cvs"][1]["kappa"] == nlohmann::json::array({0, 1}));
    CHECK(doc["Z_inf"] == nlohmann::json::array({1, 1}));
}

TEST_CASE("verify exit status") {
    CHECK(run("verify --input " + problem("scalar_quadratic.json") + " --output " + (scratch() / "v.json").string()) == 0);
    CHECK(run("verify --input " + problem("double_tangency.json") + " --output " + (scratch() / "w.json").string()) == 0);
    const auto doc = nlohmann::json::parse(slurp(scratch() / "w.json"));
    CHECK(doc.is_object());
}

TEST_CASE("hamiltonian saddle") {
    const auto out = scratch() / "h.json";
    REQUIRE(run("hamiltonian --input " + problem("saddle_2x2.json") + " --output " + out.string()) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("\"residual\":0") != std::string::npos);
    CHECK(run("hamiltonian --input " + problem("scalar_quadratic.json")) == 3);
}

TEST_CASE("curves csv") {
    const auto out = scratch() / "c.csv";
    REQUIRE(run("curves --input " + problem("scalar_quadratic.json") +
                " --lambda-min -2 --lambda-max 2 --samples 5 --output " + out.string()) == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("lambda,branch,mu,re_u_0,im_u_0\n", 0) == 0);
    CHECK(text.find("\n-2,0,-3,1,0\n") != std::string::npos);
}

TEST_CASE("exit codes for bad usage and bad input") {
    CHECK(run("analyze --no-such-flag") == 2);
    CHECK(run("") == 2);
    CHECK(run("analyze --input " + (scratch() / "missing.json").string()) == 3);
    const auto bad = scratch() / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"type": "pencil", "coeffs": [[[[1, 0], [2, 0]], [[3, 0], [1, 0]]]], "g": [0, 1]})";
    }
    CHECK(run("analyze --input " + bad.string()) == 3);
    const auto garbage = scratch() / "garbage.json";
    {
        std::ofstream f(garbage);
        f << "{not json";
    }
    CHECK(run("analyze --input " + garbage.string()) == 3);
    CHECK(run("analyze --input " + problem("scalar_quadratic.json") + " --lambda-min 1 --lambda-max 0") == 3);
}
