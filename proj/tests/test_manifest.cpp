/*
   Copyright 2026 The she-lattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "she/commands.hpp"
#include "she/manifest.hpp"

namespace she {
namespace {

namespace fs = std::filesystem;

const char* kMinimal = R"({"kernel": {"dim": 1, "jumps": "simple"},
    "box": {"extents": [9]},
    "sigma": {"form": "linear", "q": 0.5},
    "u0": {"type": "delta", "at": [0]},
    "seed": 3})";

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("she-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<ManifestIssue> issues_of(const std::string& text)
{
    try {
        parse_manifest(text);
    } catch (const ManifestInvalid& e) {
        return e.issues();
    }
    return {};
}

bool has_path(const std::vector<ManifestIssue>& issues, const std::string& path)
{
    return std::any_of(issues.begin(), issues.end(),
                       [&](const ManifestIssue& i) { return i.path == path; });
}

TEST(Manifest, MinimalManifestGetsDefaults)
{
    const auto m = parse_manifest(kMinimal);
    EXPECT_DOUBLE_EQ(m.solver.dt, 1e-3);
    EXPECT_EQ(m.solver.scheme, Scheme::euler);
    EXPECT_EQ(m.box.boundary(), Boundary::periodic);
    EXPECT_EQ(m.replicas, 1000u);
    EXPECT_EQ(m.seed, 3u);
    EXPECT_TRUE(m.sigma.is_linear());
    EXPECT_DOUBLE_EQ(m.sigma.lip(), 0.5);
    EXPECT_EQ(m.hash.size(), 16u);
}

TEST(Manifest, HashIgnoresFormatting)
{
    const std::string reordered = R"({"seed": 3, "u0": {"at": [0], "type": "delta"},
        "sigma": {"q": 0.5, "form": "linear"}, "box": {"extents": [9]},
        "kernel": {"jumps": "simple", "dim": 1}})";
    EXPECT_EQ(parse_manifest(kMinimal).hash, parse_manifest(reordered).hash);
    std::string other = kMinimal;
    other.replace(other.find("\"seed\": 3"), 9, "\"seed\": 4");
    EXPECT_NE(parse_manifest(kMinimal).hash, parse_manifest(other).hash);
}

TEST(Manifest, ReportsEveryProblemWithItsPath)
{
    const auto issues = issues_of(R"({"kernel": {"dim": 1, "jumps": "simple"},
        "box": {"extents": [9]},
        "sigma": {"form": "linear", "q": 0.5},
        "u0": {"type": "delta", "at": [0]},
        "solver": {"dt": -0.1, "colour": "red"},
        "seed": 3, "extra": 1})");
    EXPECT_TRUE(has_path(issues, "solver.dt"));
    EXPECT_TRUE(has_path(issues, "solver.colour"));
    EXPECT_TRUE(has_path(issues, "extra"));
    EXPECT_EQ(issues.size(), 3u);
}

TEST(Manifest, RequiredKeys)
{
    const auto issues = issues_of(R"({"kernel": {"dim": 1, "jumps": "simple"}})");
    for (const char* key : {"box", "sigma", "u0", "seed"}) {
        EXPECT_TRUE(has_path(issues, key)) << key;
    }
    EXPECT_FALSE(issues_of("{not json").empty());
}

TEST(Manifest, CustomSigmaNeedsDeclaredLip)
{
    std::string text = kMinimal;
    const std::string linear = R"({"form": "linear", "q": 0.5})";
    text.replace(text.find(linear), linear.size(), R"({"form": "custom", "table": [[-1, -1], [1, 1]]})");
    EXPECT_TRUE(has_path(issues_of(text), "sigma.lip"));
    std::string ok = kMinimal;
    ok.replace(ok.find(linear), linear.size(),
               R"({"form": "custom", "table": [[-1, -0.5], [0, 0], [2, 1]], "lip": 0.5})");
    const auto m = parse_manifest(ok);
    EXPECT_DOUBLE_EQ(m.sigma(1.0), 0.5);
    EXPECT_DOUBLE_EQ(m.sigma(-2.0), -1.0);
}

TEST(Manifest, CrossFieldChecks)
{
    std::string small = kMinimal;
    small.replace(small.find("[9]"), 3, "[2]");
    EXPECT_FALSE(issues_of(small).empty());
    std::string wrong_dim = kMinimal;
    wrong_dim.replace(wrong_dim.find("\"at\": [0]"), 9, "\"at\": [0, 0]");
    EXPECT_FALSE(issues_of(wrong_dim).empty());
    std::string split_sine = kMinimal;
    split_sine.replace(split_sine.find("\"form\": \"linear\""), 16, "\"form\": \"sine\"");
    split_sine.replace(split_sine.find("\"seed\""), 6, R"("solver": {"scheme": "split-exact-linear"}, "seed")");
    EXPECT_TRUE(has_path(issues_of(split_sine), "solver"));
}

TEST(Manifest, KernelFiles)
{
    const auto k = parse_kernel(R"({"dim": 2, "jumps": [{"vec": [1, 0], "p": 0.5}, {"vec": [0, -1], "p": 0.5}]})");
    EXPECT_EQ(k.dim(), 2);
    EXPECT_EQ(k.jumps.jumps().size(), 2u);
    EXPECT_THROW(parse_kernel(R"({"dim": 1, "jumps": [{"vec": [1], "p": 0.4}]})"), ManifestInvalid);
}

TEST(Stamp, SeedOverride)
{
    auto m = parse_manifest(kMinimal);
    const auto plain = apply_seed_override(m, nullptr);
    EXPECT_EQ(plain.seed, 3u);
    EXPECT_EQ(plain.seed_source, "manifest");
    const auto env = apply_seed_override(m, "991");
    EXPECT_EQ(m.seed, 991u);
    EXPECT_EQ(env.seed_source, "SHE_SEED");
    EXPECT_EQ(env.comment_line(),
              "# she-lattice " SHE_VERSION " manifest=" + m.hash + " seed=991 seed_source=SHE_SEED");
    EXPECT_THROW(apply_seed_override(m, "12x"), ManifestInvalid);
}

CommandContext context_for(const RunManifest& m, const fs::path& dir)
{
    CommandContext ctx;
    ctx.threads = 2;
    ctx.out_dir = dir;
    ctx.stamp.manifest_hash = m.hash;
    ctx.stamp.seed = m.seed;
    return ctx;
}

TEST(Commands, IdenticalManifestGivesIdenticalBytes)
{
    std::string text = kMinimal;
    text.replace(text.find("\"seed\""), 6,
                 R"("solver": {"dt": 0.01, "horizon": 0.2, "marked_points": [[0]]}, "replicas": 3, "seed")");
    const auto m = parse_manifest(text);
    const auto a = cmd_simulate(m, context_for(m, fresh_dir("det-a")));
    const auto b = cmd_simulate(m, context_for(m, fresh_dir("det-b")));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(slurp(a[i]), slurp(b[i])) << a[i];
    }
    const auto stamp = read_stamp_line(a.front());
    ASSERT_TRUE(stamp.has_value());
    EXPECT_NE(stamp->find("manifest=" + m.hash), std::string::npos);
    EXPECT_TRUE(compare_outputs(a.front(), b.front()).identical);
}

TEST(Commands, CompareRefusesDifferentManifests)
{
    const auto m = parse_manifest(kMinimal);
    auto other = m;
    other.hash = "0000000000000000";
    const fs::path dir = fresh_dir("cmp");
    CsvWriter(dir / "a.csv", context_for(m, dir).stamp, {"x"}).row(std::vector<double>{1.0});
    CsvWriter(dir / "b.csv", context_for(other, dir).stamp, {"x"}).row(std::vector<double>{1.0});
    const auto res = compare_outputs(dir / "a.csv", dir / "b.csv");
    EXPECT_TRUE(res.refused);
    EXPECT_FALSE(res.identical);
}

TEST(Commands, KernelPbarCurveIsMonotone)
{
    const fs::path dir = fresh_dir("kernel");
    KernelQuery q;
    q.pbar = true;
    q.points = 11;
    CommandContext ctx;
    ctx.out_dir = dir;
    const auto files = cmd_kernel(WalkKernel(JumpDistribution::simple(2)), q, ctx);
    ASSERT_EQ(files.size(), 1u);
    std::ifstream in(files.front());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# she-lattice", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "argument,value,est_error");
    double prev = 2.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const double v = std::stod(line.substr(line.find(',') + 1));
        EXPECT_LT(v, prev);
        prev = v;
        ++rows;
    }
    EXPECT_EQ(rows, 11);
}

} // namespace
} // namespace she
