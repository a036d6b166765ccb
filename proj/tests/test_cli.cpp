#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

// Runs the command-line tool with stderr folded into the captured output.
Run sim(const std::string& args) {
    const std::string cmd = std::string(OTDOA_SIM_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::string kDesk = OTDOA_SOURCE_DIR "/scenarios/fig5-desk.yaml";

std::string temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate accepts the desk scenario") {
    const auto r = sim("validate " + kDesk);
    CHECK(r.code == 0);
    CHECK(r.out.find("OK") != std::string::npos);
}

TEST_CASE("validate rejects out-of-domain values with exit code 2") {
    const auto path = temp_file("otdoa_bad.yaml", R"(name: bad
technologies:
  - name: lte
    prs:
      family: lte
      bandwidth_prbs: 7
)");
    const auto r = sim("validate " + path);
    CHECK(r.code == 2);
    CHECK(r.out.find("DomainViolation") != std::string::npos);
    CHECK(r.out.find("line 5") != std::string::npos);
}

TEST_CASE("usage errors exit with 1, runtime errors with 3") {
    CHECK(sim("").code == 1);
    CHECK(sim("frobnicate").code == 1);
    CHECK(sim("run --scenario " + kDesk + " --tech wifi").code == 1);
    CHECK(sim("grid dump --scenario " + kDesk + " --tech lte --cell 99").code == 1);
    CHECK(sim("validate /nonexistent/file.yaml").code == 2);
    CHECK(sim("run --scenario " + kDesk + " --tech lte --drops 1 --out /proc/otdoa_forbidden").code == 3);
}

TEST_CASE("NB-IoT schedule lists every subframe") {
    const auto r = sim("schedule dump --scenario " + kDesk + " --tech nbiot");
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10240 + 2);
    CHECK(r.out.find("\n10239,1023,9,0,") != std::string::npos);
}

TEST_CASE("grid dump lists populated resource elements") {
    const auto r = sim("grid dump --scenario " + kDesk + " --tech lte --cell 7");
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 8 * 100);
    const auto ascii = sim("grid dump --scenario " + kDesk + " --tech m1 --ascii");
    CHECK(std::count(ascii.out.begin(), ascii.out.end(), 'P') == 8 * 12);
}

TEST_CASE("session transcript ends in Done") {
    const auto r = sim("session transcript --scenario " + kDesk + " --tech m2 --drop 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("== message 5") != std::string::npos);
    CHECK(r.out.find("session phase: Done") != std::string::npos);
}

TEST_CASE("run --tech all writes four CDF files") {
    namespace fs = std::filesystem;
    const auto out = fs::temp_directory_path() / "otdoa_cli_run";
    fs::remove_all(out);
    const auto r = sim("run --scenario " + kDesk + " --out " + out.string() + " --drops 2 --seed 42 --tech all");
    CHECK(r.code == 0);
    int cdfs = 0;
    for (const auto& e : fs::directory_iterator(out)) cdfs += e.path().filename().string().rfind("cdf_", 0) == 0;
    CHECK(cdfs == 4);
    CHECK(fs::exists(out / "summary.csv"));
    fs::remove_all(out);
}

}
