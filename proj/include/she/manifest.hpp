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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "she/experiments.hpp"
#include "she/lattice.hpp"
#include "she/nonlinearity.hpp"
#include "she/solver.hpp"
#include "she/walk_kernel.hpp"

namespace she {

inline constexpr int manifest_schema_version = 1;

struct ManifestIssue {
    std::string path;  // dotted field path, e.g. "solver.dt"
    std::string message;
};

/// Thrown by parse_manifest with every violation found, not just the first.
class ManifestInvalid : public std::runtime_error {
public:
    explicit ManifestInvalid(std::vector<ManifestIssue> issues);
    ManifestInvalid(std::string path, std::string message)
        : ManifestInvalid(std::vector<ManifestIssue>{{std::move(path), std::move(message)}})
    {
    }
    const std::vector<ManifestIssue>& issues() const noexcept { return issues_; }
    /// {"errors": [{"path": ..., "message": ...}, ...]}
    std::string to_json() const;

private:
    std::vector<ManifestIssue> issues_;
};

struct MomentsBlock {
    std::vector<std::string> methods{"feynman-kac"};
    std::vector<int> k{2};
    std::vector<double> times{1.0};
    LatticePoint x;       // defaults to the origin
    bool summed = false;  // sum over x (field-mc and feynman-kac)
};

struct LyapunovBlock {
    std::vector<int> k{2, 3, 4};
    std::vector<double> times{1.0, 2.0, 3.0, 4.0};
    double window_start = 1.0;
    double window_end = 4.0;
    double eps = 0.5;
    std::size_t resamples = 2000;
};

struct RenewalBlock {
    std::string mode = "pam-second-moment";  // or "grids"
    double horizon = 1.0;
    double step = 1.0 / 512.0;
    double tol = 1e-6;
    double beta = 0.0;
    std::string g_file;  // grids mode: one value per line (or CSV "t,value")
    std::string h_file;
};

struct CltBlock {
    double t = 1.0;
    std::vector<double> taus{0.04, 0.01, 0.0025};
    std::vector<LatticePoint> points;
    double ks_relaxation = 1.5;
    double max_discard_fraction = 0.01;
};

struct RnBlock {
    double t = 1.0;
    std::vector<double> taus{0.04, 0.01, 0.0025};
    LatticePoint x;
    double eta = 0.1;
};

struct DissipationBlock {
    double fit_start = 10.0;
    double fit_end = 40.0;
};

struct RunManifest {
    int schema_version = manifest_schema_version;
    WalkKernel kernel{JumpDistribution::simple(1)};
    Box box{{65}, Boundary::periodic};
    Nonlinearity sigma = Nonlinearity::linear(0.0);
    InitialProfile u0 = InitialProfile::delta({0});
    SolverConfig solver;
    std::uint64_t seed = 1;
    std::size_t replicas = 1000;
    MomentsBlock moments;
    LyapunovBlock lyapunov;
    RenewalBlock renewal;
    CltBlock clt;
    RnBlock rn;
    DissipationBlock dissipation;
    std::string output_dir = "she-out";
    /// Hex FNV-1a of the canonical (sorted-key, compact) manifest JSON.
    std::string hash;
};

/// Parses and validates a manifest, materializing defaults. Relative file
/// references are resolved against `base_dir`. Throws ManifestInvalid.
RunManifest parse_manifest(const std::string& text, const std::string& base_dir = ".");

/// Kernel definition {"dim": d, "jumps": [{"vec": [..], "p": ..}, ...]} or
/// {"dim": d, "jumps": "simple"}. Throws ManifestInvalid.
WalkKernel parse_kernel(const std::string& text);

std::string fnv1a_hex(const std::string& bytes);

RunSpec run_spec(const RunManifest& manifest, unsigned threads);

} // namespace she
