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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "she/acceptance.hpp"
#include "she/commands.hpp"
#include "she/errors.hpp"
#include "she/manifest.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw she::ManifestInvalid("", "cannot read '" + file.string() + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

using Command = std::function<std::vector<fs::path>(const she::RunManifest&, const she::CommandContext&)>;

int run_manifest_command(const std::string& manifest_path, const std::string& out_override,
                         unsigned threads, const Command& command)
{
    she::RunManifest m =
        she::parse_manifest(read_file(manifest_path), fs::path(manifest_path).parent_path().string());
    she::CommandContext ctx;
    ctx.stamp = she::apply_seed_override(m, std::getenv("SHE_SEED"));
    ctx.threads = threads;
    ctx.out_dir = out_override.empty() ? fs::path(m.output_dir) : fs::path(out_override);
    ctx.log = &std::cout;
    command(m, ctx);
    return she::exit_ok;
}

int verify_compare(const std::vector<std::string>& paths)
{
    const fs::path a(paths[0]);
    const fs::path b(paths[1]);
    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (fs::is_directory(a)) {
        for (const auto& entry : fs::recursive_directory_iterator(a)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                pairs.emplace_back(entry.path(), b / fs::relative(entry.path(), a));
            }
        }
        std::sort(pairs.begin(), pairs.end());
    } else {
        pairs.emplace_back(a, b);
    }
    bool all = !pairs.empty();
    for (const auto& [x, y] : pairs) {
        if (!fs::exists(y)) {
            std::cout << "[DIFF] " << x.string() << ": missing counterpart " << y.string() << '\n';
            all = false;
            continue;
        }
        const she::CompareResult r = she::compare_outputs(x, y);
        std::cout << (r.refused ? "[REFUSED] " : r.identical ? "[SAME] " : "[DIFF] ") << x.string()
                  << ": " << r.message << '\n';
        all = all && r.identical;
    }
    return all ? she::exit_ok : she::exit_acceptance_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"she-lattice: semi-discrete stochastic heat equation toolkit"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: available parallelism)");

    std::string manifest;
    std::string out;
    std::map<std::string, Command> manifest_commands{
        {"simulate", she::cmd_simulate},   {"moments", she::cmd_moments},
        {"lyapunov", she::cmd_lyapunov},   {"renewal", she::cmd_renewal},
        {"clt-test", she::cmd_clt},        {"rn-test", she::cmd_rn},
        {"dissipation", she::cmd_dissipation}, {"classify", she::cmd_classify},
    };
    const std::map<std::string, std::string> blurbs{
        {"simulate", "time-step the lattice system and write observable trajectories"},
        {"moments", "moment estimates (field-mc, feynman-kac, renewal)"},
        {"lyapunov", "log-moment series, growth-rate fits and k^2 bound checks"},
        {"renewal", "solve a renewal equation (PAM second moment or CSV grids)"},
        {"clt-test", "Kolmogorov-Smirnov test of scale-function increments"},
        {"rn-test", "ratio of field increments to Brownian increments"},
        {"dissipation", "norm decay experiment with log-log fit"},
        {"classify", "dissipative / growth regime from Lip, ell and Upsilon(0)"},
    };
    for (const auto& [name, blurb] : blurbs) {
        auto* sub = app.add_subcommand(name, blurb);
        sub->add_option("manifest", manifest, "JSON run manifest")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides output.dir)");
    }

    auto* kernel = app.add_subcommand("kernel", "transition probabilities, Pbar and Upsilon curves as CSV");
    she::KernelQuery query;
    std::string kernel_file;
    int dim = 1;
    kernel->add_option("--kernel", kernel_file, "kernel JSON {dim, jumps}")->check(CLI::ExistingFile);
    kernel->add_option("--dim", dim, "dimension of the simple walk when --kernel is absent")
        ->check(CLI::Range(1, 6));
    kernel->add_flag("--pbar", query.pbar, "Pbar(tau) on [0, tmax]");
    kernel->add_flag("--upsilon", query.upsilon, "Upsilon(beta) at --betas");
    kernel->add_flag("--prob", query.prob, "p_t(x) table at t = tmax");
    kernel->add_option("--tmax", query.tmax, "largest tau / time")->check(CLI::NonNegativeNumber);
    kernel->add_option("--points", query.points, "number of tau values")->check(CLI::PositiveNumber);
    kernel->add_option("--betas", query.betas, "beta values")->delimiter(',');
    kernel->add_option("--tol", query.tol, "quadrature tolerance")->check(CLI::PositiveNumber);
    kernel->add_option("--out", out, "output directory (default: print to stdout)");

    auto* verify = app.add_subcommand("verify", "acceptance suite, determinism suite, output comparison");
    std::string suite;
    std::vector<int> only;
    std::vector<std::string> compare;
    verify->add_option("--suite", suite, "acceptance or determinism")
        ->check(CLI::IsMember({"acceptance", "determinism"}));
    verify->add_option("--only", only, "acceptance criterion ids")->delimiter(',');
    verify->add_option("--out", out, "directory for determinism-suite outputs");
    verify->add_option("--compare", compare, "two output files or directories")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : she::exit_schema;
    }

    try {
        for (const auto& [name, command] : manifest_commands) {
            if (app.got_subcommand(name)) {
                return run_manifest_command(manifest, out, threads, command);
            }
        }
        if (app.got_subcommand(kernel)) {
            if (!query.pbar && !query.upsilon && !query.prob) {
                query.pbar = true;
            }
            std::string spec = kernel_file.empty()
                                   ? R"({"dim": )" + std::to_string(dim) + R"(, "jumps": "simple"})"
                                   : read_file(kernel_file);
            const she::WalkKernel k = she::parse_kernel(spec);
            std::ostringstream args;
            args << spec << "|pbar=" << query.pbar << "|upsilon=" << query.upsilon
                 << "|prob=" << query.prob << "|tmax=" << query.tmax << "|points=" << query.points
                 << "|tol=" << query.tol << "|betas=";
            for (double b : query.betas) {
                args << b << ';';
            }
            she::CommandContext ctx;
            ctx.threads = threads;
            ctx.stamp.manifest_hash = she::fnv1a_hex(args.str());
            ctx.stamp.seed = 0;
            const bool to_stdout = out.empty();
            ctx.out_dir = to_stdout ? fs::temp_directory_path() /
                                          ("she-kernel-" + ctx.stamp.manifest_hash)
                                    : fs::path(out);
            ctx.log = to_stdout ? nullptr : &std::cout;
            const auto files = she::cmd_kernel(k, query, ctx);
            if (to_stdout) {
                for (const auto& f : files) {
                    std::cout << read_file(f);
                }
                fs::remove_all(ctx.out_dir);
            }
            return she::exit_ok;
        }
        if (app.got_subcommand(verify)) {
            if (!compare.empty()) {
                return verify_compare(compare);
            }
            if (suite == "determinism") {
                const fs::path dir = out.empty() ? fs::path("she-out/determinism") : fs::path(out);
                for (const auto& f : she::run_determinism_suite(dir, threads)) {
                    std::cout << f.string() << '\n';
                }
                return she::exit_ok;
            }
            if (suite == "acceptance") {
                she::AcceptanceOptions options;
                options.threads = threads;
                options.only = only;
                options.on_result = [](const she::CriterionResult& r) {
                    std::cout << she::format_result(r) << std::endl;
                };
                std::size_t failed = 0;
                const auto results = she::run_acceptance(options);
                for (const auto& r : results) {
                    failed += r.passed ? 0 : 1;
                }
                std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
                return failed == 0 ? she::exit_ok : she::exit_acceptance_failure;
            }
            std::cerr << "verify: give --suite or --compare\n";
            return she::exit_schema;
        }
    } catch (const she::ManifestInvalid& e) {
        std::cerr << e.to_json() << '\n';
        return she::exit_schema;
    } catch (const she::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return she::exit_numeric_failure;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return she::exit_numeric_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return she::exit_schema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return she::exit_numeric_failure;
    }
    return she::exit_ok;
}
