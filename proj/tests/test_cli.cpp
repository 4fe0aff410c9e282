#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + "'" + WF_CLI_PATH + "' " + args + " 2>/dev/null";
    CliResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    while (!r.out.empty() && r.out.back() == '\n') r.out.pop_back();
    return r;
}

std::string data(const std::string& name) { return std::string("'") + WF_DATA_DIR + "/" + name + "'"; }

}  // namespace

TEST(Cli, SeriesCommands) {
    EXPECT_EQ(run("eis --weight 4 --order 2").out, "1 + 240q + 2160q^2");
    EXPECT_EQ(run("eta --order 1").out, "q^{1/24}(1 - q)");
    EXPECT_EQ(run("delta --order 4").out, "q - 24q^2 + 252q^3 - 1472q^4");
    CliResult r = run("eis --weight 3");
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, WittenGenusManifests) {
    EXPECT_EQ(run("witten --manifest " + data("dim6.json")).out, "0");
    EXPECT_EQ(run("witten --manifest " + data("dim4_string.json")).out, "0");
    EXPECT_EQ(run("witten --manifest " + data("dim8_string.json") + " --order 4").out,
              "-1/240 - q - 9q^2 - 28q^3 - 73q^4");
    EXPECT_EQ(run("witten --manifest " + data("dim4_nonstring.json")).code, 2);
}

TEST(Cli, Checks) {
    CliResult w = run("check weierstrass --qorder 8 --zorder 8");
    EXPECT_EQ(w.code, 0);
    EXPECT_EQ(w.out, "weierstrass: pass");
    EXPECT_EQ(run("check euler-char --rank 2 --dim 6 --order 8").out, "euler-char: pass");
    EXPECT_EQ(run("check semigroup --seed 7 --trials 20").out, "semigroup: pass");
    EXPECT_EQ(run("check anomaly --rank 2 --dim 6 --order 4").code, 0);
    EXPECT_EQ(run("check eft --rank 2 --dim 4 --order 4").code, 0);
}

TEST(Cli, CorruptedEftFailsWithCertificate) {
    CliResult r = run("check eft --rank 2 --dim 4 --order 4 --corrupt");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("FAIL"), std::string::npos);
    CliResult j = run("--format json check eft --rank 2 --dim 4 --order 4 --corrupt");
    auto doc = nlohmann::json::parse(j.out);
    EXPECT_FALSE(doc.at("pass").get<bool>());
}

TEST(Cli, KomfAndClassOrder) {
    EXPECT_EQ(run("komf --degree 4").out, "MF^Z_2");
    EXPECT_EQ(run("komf --degree 5").out, "0");
    std::string common = " --weight 2 --lattice-scale 2 --pole 2 --max-d 60 --order 50";
    EXPECT_EQ(run("bn-order --series " + data("e2over12.json") + common).out, "24");
    EXPECT_EQ(run("bn-order --series " + data("e2over24.json") + common).out, "48");
    auto doc = nlohmann::json::parse(run("--format json bn-order --series " + data("e2over12.json") + common).out);
    EXPECT_EQ(doc.at("order").get<int>(), 24);
    EXPECT_EQ(doc.at("P").get<int>(), 2);
    EXPECT_EQ(doc.at("N").get<int>(), 50);
}

TEST(Cli, PartitionTrace) {
    EXPECT_EQ(run("partition --rep " + data("rep_small.json")).out, "(2 - q^2)");
    EXPECT_EQ(run("partition --rep " + data("rep_even_a0.json")).code, 2);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("witten --manifest " + data("malformed.json")).code, 2);
    EXPECT_EQ(run("bn-order --series " + data("e2over12_short.json") + " --weight 2 --lattice-scale 2 --pole 2 --order 50")
                  .code,
              3);
    EXPECT_EQ(run("check semigroup").code, 2);
    EXPECT_EQ(run("eta --bogus").code, 2);
    EXPECT_EQ(run("eta", "WF_DEFAULT_ORDER=abc").code, 2);
    EXPECT_EQ(run("eta", "WF_DEFAULT_ORDER=2").out, "q^{1/24}(1 - q - q^2)");
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, JsonFormatAndOutputFile) {
    auto doc = nlohmann::json::parse(run("--format json check semigroup --seed 3 --trials 5").out);
    EXPECT_EQ(doc.at("check"), "semigroup");
    EXPECT_TRUE(doc.at("pass").get<bool>());
    EXPECT_TRUE(doc.contains("precision"));

    auto path = std::filesystem::temp_directory_path() / "wf_cli_output_test.txt";
    std::filesystem::remove(path);
    CliResult r = run("--output '" + path.string() + "' eis --weight 6 --order 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    EXPECT_EQ(s, "1 - 504q");
    std::filesystem::remove(path);
}

TEST(Cli, Deterministic) {
    std::string cmd = "--format json check mckean-singer --seed 11 --trials 10";
    EXPECT_EQ(run(cmd).out, run(cmd).out);
}
