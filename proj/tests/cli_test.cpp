#include <gtest/gtest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace {

struct Outcome {
    int status;
    std::string out;
};

Outcome cli(const std::string &args)
{
    const std::string cmd = std::string(SPECKIT_CLI) + " " + args + " 2>&1";
    FILE *p = ::popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (p && std::fgets(buf.data(), buf.size(), p)) {
        out += buf.data();
    }
    const int raw = p ? ::pclose(p) : -1;
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::filesystem::path temp_file(const std::string &name, const std::string &content)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST(Cli, RunPassingSpec)
{
    const auto json = std::filesystem::temp_directory_path() / "speckit_cli_glaisher.json";
    const auto r = cli("run " + std::string(SPECKIT_SPECS) + "/glaisher.spec --json " + json.string());
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_NE(r.out.find("check glaisher: pass"), std::string::npos);
    std::ifstream in(json);
    const auto j = nlohmann::json::parse(in);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["identity"], "glaisher");
    EXPECT_EQ(j[0]["status"], "pass");
}

TEST(Cli, RunFailingSpec)
{
    const auto path = temp_file("speckit_fail.spec", "check (x + 1)^2 == x^2 + 1 upto x:3;\n");
    const auto r = cli("run " + path.string());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("x: 2 != 0"), std::string::npos);
}

TEST(Cli, RunEmptySpec)
{
    const auto path = temp_file("speckit_empty.spec", "");
    const auto r = cli("run " + path.string());
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ParseErrorsExitTwo)
{
    const auto path = temp_file("speckit_bad.spec", "let a = (x;\n");
    const auto r = cli("run " + path.string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("1:11"), std::string::npos);
    EXPECT_EQ(cli("run /nonexistent.spec").status, 2);
    EXPECT_EQ(cli("verify nope").status, 2);
    EXPECT_EQ(cli("frobnicate").status, 2);
    EXPECT_EQ(cli("expand \"x +\" --caps x=2").status, 2);
    EXPECT_EQ(cli("verify glaisher --caps x=3,t=4").status, 2);
}

TEST(Cli, Verify)
{
    const auto r = cli("verify hermite-egf --caps x=6,y=6,t=6");
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_NE(r.out.find("hermite-egf"), std::string::npos);
    EXPECT_NE(r.out.find("t:6,x:6,y:6"), std::string::npos);
}

TEST(Cli, Expand)
{
    auto r = cli("expand \"EXP_HALF_SQ[x->y] @ x^4\" --caps x=4,y=4");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "1/1 x^4 + 6/1 x^2 y^2 + 3/1 y^4\n");
    r = cli("expand \"2*x\" --caps x=2 --format json");
    EXPECT_EQ(nlohmann::json::parse(r.out)["terms"][0]["num"], "2");
    r = cli("expand \"SET(x*t)\" --format json");
    EXPECT_EQ(nlohmann::json::parse(r.out)["kind"], "Set");
}

TEST(Cli, Enumerate)
{
    auto r = cli("enumerate --n 2 --classify");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("total 10"), std::string::npos);
    EXPECT_NE(r.out.find("pairs 2: 3"), std::string::npos);
    EXPECT_NE(r.out.find("C:[2] O:[]"), std::string::npos);
    r = cli("enumerate --n 1 --markers");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("t^1 u^1 y^2"), std::string::npos);
}

TEST(Cli, CapExceededExitsThree)
{
    EXPECT_EQ(cli("enumerate --n 8").status, 3);
    EXPECT_EQ(cli("enumerate --n 1 --max-n 8").status, 0);
}
