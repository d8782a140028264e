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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "she/manifest.hpp"
#include "she/walk_kernel.hpp"

namespace she {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_numeric_failure = 1,
    exit_schema = 2,
    exit_acceptance_failure = 3,
};

/// Reproducibility stamp embedded in every output file.
struct Stamp {
    std::string manifest_hash;
    std::uint64_t seed = 0;
    std::string seed_source = "manifest";  // or "SHE_SEED"
    std::string version = SHE_VERSION;

    /// "# she-lattice <version> manifest=<hash> seed=<seed> seed_source=<src>"
    std::string comment_line() const;
};

/// Applies the SHE_SEED override (if `env_value` is set) and returns the
/// stamp. Throws ManifestInvalid when the override is not an integer.
Stamp apply_seed_override(RunManifest& manifest, const char* env_value);

/// Fixed-format number rendering used in all CSV output.
std::string format_number(double v);

/// CSV file whose first line is the stamp comment.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& file, const Stamp& stamp,
              const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

struct CommandContext {
    unsigned threads = 0;
    std::filesystem::path out_dir;
    Stamp stamp;
    std::ostream* log = nullptr;  // receives the list of written files
};

// Each command writes its artifacts under ctx.out_dir and returns the paths.
std::vector<std::filesystem::path> cmd_simulate(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_moments(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_lyapunov(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_renewal(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_clt(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_rn(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_dissipation(const RunManifest& m, const CommandContext& ctx);
std::vector<std::filesystem::path> cmd_classify(const RunManifest& m, const CommandContext& ctx);

struct KernelQuery {
    bool pbar = false;
    bool upsilon = false;
    bool prob = false;      // p_t(x) table at t = tmax
    double tmax = 5.0;      // pbar / prob argument range
    std::size_t points = 51;
    std::vector<double> betas{0.5, 1.0, 2.0, 5.0, 10.0};
    double tol = 1e-10;
};

/// Rows "argument,value,est_error" for the requested curves.
std::vector<std::filesystem::path> cmd_kernel(const WalkKernel& kernel, const KernelQuery& query,
                                              const CommandContext& ctx);

/// Stamp line of a file written by CsvWriter, if present.
std::optional<std::string> read_stamp_line(const std::filesystem::path& file);

struct CompareResult {
    bool refused = false;   // stamps differ: outputs of different manifests
    bool identical = false;
    std::string message;
};

/// Byte comparison of two output files after checking their manifest hashes.
CompareResult compare_outputs(const std::filesystem::path& a, const std::filesystem::path& b);

/// Small fixed set of runs (simulate, moments, clt-test, renewal) whose CSVs
/// must not depend on the thread count.
std::vector<std::filesystem::path> run_determinism_suite(const std::filesystem::path& dir,
                                                         unsigned threads);

} // namespace she
