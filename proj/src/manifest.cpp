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

#include "she/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace she {

using nlohmann::json;

ManifestInvalid::ManifestInvalid(std::vector<ManifestIssue> issues)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << issues.size() << " manifest error(s)";
          for (const auto& i : issues) {
              os << "\n  " << (i.path.empty() ? "<root>" : i.path) << ": " << i.message;
          }
          return os.str();
      }()),
      issues_(std::move(issues))
{
}

std::string ManifestInvalid::to_json() const
{
    json out = {{"errors", json::array()}};
    for (const auto& i : issues_) {
        out["errors"].push_back({{"path", i.path}, {"message", i.message}});
    }
    return out.dump(2);
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

namespace {

using Issues = std::vector<ManifestIssue>;

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

/// Typed access to one JSON object. Every key read is remembered so the
/// leftovers can be reported as unknown.
class Fields {
public:
    Fields(const json& obj, std::string path, Issues& issues)
        : obj_(obj), path_(std::move(path)), issues_(issues)
    {
        ok_ = obj.is_object();
        if (!ok_) {
            fail("", "expected an object");
        }
    }

    bool ok() const { return ok_; }
    Issues& issues() const { return issues_; }
    const std::string& path() const { return path_; }
    std::string at(const std::string& key) const { return join(path_, key); }

    void fail(const std::string& key, const std::string& message) const
    {
        issues_.push_back({key.empty() ? path_ : join(path_, key), message});
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return ok_ && obj_.contains(key) && !obj_.at(key).is_null();
    }

    const json* raw(const std::string& key, bool required)
    {
        if (has(key)) {
            return &obj_.at(key);
        }
        if (required && ok_) {
            fail(key, "required field is missing");
        }
        return nullptr;
    }

    std::optional<double> number(const std::string& key, bool required = false)
    {
        const json* v = raw(key, required);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_number()) {
            fail(key, "expected a number");
            return std::nullopt;
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) {
            fail(key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    double number_or(const std::string& key, double fallback, const std::function<bool(double)>& ok,
                     const std::string& rule)
    {
        const auto v = number(key);
        if (!v) {
            return fallback;
        }
        if (!ok(*v)) {
            fail(key, rule);
            return fallback;
        }
        return *v;
    }

    std::optional<std::int64_t> integer(const std::string& key, bool required = false)
    {
        const json* v = raw(key, required);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_number_integer()) {
            fail(key, "expected an integer");
            return std::nullopt;
        }
        return v->get<std::int64_t>();
    }

    std::optional<std::string> string(const std::string& key, bool required = false)
    {
        const json* v = raw(key, required);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_string()) {
            fail(key, "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const std::string& key)
    {
        const json* v = raw(key, false);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_boolean()) {
            fail(key, "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<std::vector<double>> numbers(const std::string& key, bool required = false)
    {
        const json* v = raw(key, required);
        if (!v) {
            return std::nullopt;
        }
        std::vector<double> out;
        if (!v->is_array()) {
            fail(key, "expected an array of numbers");
            return std::nullopt;
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(key + "[" + std::to_string(i) + "]", "expected a finite number");
                return std::nullopt;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::optional<std::vector<int>> integers(const std::string& key, bool required = false)
    {
        const json* v = raw(key, required);
        if (!v) {
            return std::nullopt;
        }
        return to_ints(*v, key);
    }

    std::optional<std::vector<int>> to_ints(const json& v, const std::string& key) const
    {
        if (!v.is_array()) {
            fail(key, "expected an array of integers");
            return std::nullopt;
        }
        std::vector<int> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& e = v[i];
            if (!e.is_number_integer() || std::abs(e.get<std::int64_t>()) > (1 << 30)) {
                fail(key + "[" + std::to_string(i) + "]", "expected an integer");
                return std::nullopt;
            }
            out.push_back(e.get<int>());
        }
        return out;
    }

    std::optional<std::vector<LatticePoint>> points(const std::string& key)
    {
        const json* v = raw(key, false);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_array()) {
            fail(key, "expected an array of lattice points");
            return std::nullopt;
        }
        std::vector<LatticePoint> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto p = to_ints((*v)[i], key + "[" + std::to_string(i) + "]");
            if (!p) {
                return std::nullopt;
            }
            out.push_back(*p);
        }
        return out;
    }

    /// Reports keys that were never read.
    void finish()
    {
        if (!ok_) {
            return;
        }
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail(it.key(), "unknown key");
            }
        }
    }

private:
    const json& obj_;
    std::string path_;
    Issues& issues_;
    std::set<std::string> seen_;
    bool ok_ = true;
};

const auto positive = [](double v) { return v > 0.0; };
const auto nonneg = [](double v) { return v >= 0.0; };

json load_json_file(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open '" + file.string() + "'");
    }
    return json::parse(in);
}

std::optional<WalkKernel> read_kernel(const json& v, const std::string& path, Issues& issues,
                                      const std::filesystem::path& base_dir)
{
    Fields f(v, path, issues);
    if (!f.ok()) {
        return std::nullopt;
    }
    if (const auto file = f.string("file")) {
        f.finish();
        const std::filesystem::path p = std::filesystem::path(*file).is_absolute()
                                            ? std::filesystem::path(*file)
                                            : base_dir / *file;
        try {
            return read_kernel(load_json_file(p), path, issues, p.parent_path());
        } catch (const std::exception& e) {
            f.fail("file", e.what());
            return std::nullopt;
        }
    }
    const auto dim = f.integer("dim", true);
    if (dim && (*dim < 1 || *dim > 6)) {
        f.fail("dim", "must be between 1 and 6");
    }
    const double rate = f.number_or("rate", 1.0, positive, "must be positive");
    const bool transient = f.boolean("transient").value_or(false);
    std::optional<JumpDistribution> jumps;
    const std::size_t before = issues.size();
    if (const json* j = f.raw("jumps", true); j && dim && *dim >= 1 && *dim <= 6) {
        const int d = static_cast<int>(*dim);
        if (j->is_string()) {
            if (j->get<std::string>() == "simple") {
                jumps = JumpDistribution::simple(d);
            } else {
                f.fail("jumps", "expected \"simple\" or an array of {vec, p}");
            }
        } else if (j->is_array() && !j->empty()) {
            std::vector<Jump> list;
            for (std::size_t i = 0; i < j->size(); ++i) {
                Fields e((*j)[i], f.at("jumps") + "[" + std::to_string(i) + "]", issues);
                if (!e.ok()) {
                    continue;
                }
                const auto vec = e.integers("vec", true);
                const auto p = e.number("p", true);
                e.finish();
                if (vec && static_cast<int>(vec->size()) != d) {
                    e.fail("vec", "length must equal dim");
                } else if (vec && p) {
                    list.push_back(Jump{*vec, *p});
                }
            }
            if (issues.size() == before) {
                try {
                    jumps = JumpDistribution(d, std::move(list));
                } catch (const std::exception& ex) {
                    f.fail("jumps", ex.what());
                }
            }
        } else {
            f.fail("jumps", "expected \"simple\" or a non-empty array of {vec, p}");
        }
    }
    f.finish();
    if (!jumps) {
        return std::nullopt;
    }
    return WalkKernel(*jumps, rate, transient);
}

std::optional<Nonlinearity> read_sigma(Fields& f)
{
    const auto form = f.string("form", true);
    if (!form) {
        return std::nullopt;
    }
    if (*form == "zero") {
        return Nonlinearity::linear(0.0);
    }
    if (*form == "linear") {
        const auto q = f.number("q", true);
        return q ? std::optional(Nonlinearity::linear(*q)) : std::nullopt;
    }
    if (*form == "saturating" || *form == "sine" || *form == "tanh") {
        const auto q = f.number("q", true);
        if (!q) {
            return std::nullopt;
        }
        const double lip = f.number_or("lip", std::abs(*q), nonneg, "must be nonnegative");
        const double ell = f.number_or("ell", 0.0, nonneg, "must be nonnegative");
        if (ell > lip) {
            f.fail("ell", "must not exceed lip");
            return std::nullopt;
        }
        return Nonlinearity::named(*form, *q, lip, ell);
    }
    if (*form == "custom") {
        // Piecewise-linear interpolation of a table, extended linearly.
        const auto lip = f.number("lip");
        if (!lip) {
            f.fail("lip", "required for custom sigma: the Lipschitz constant must be declared");
        }
        const double ell = f.number_or("ell", 0.0, nonneg, "must be nonnegative");
        const json* table = f.raw("table", true);
        if (!lip || !table) {
            return std::nullopt;
        }
        std::vector<std::pair<double, double>> pts;
        if (!table->is_array() || table->size() < 2) {
            f.fail("table", "expected at least two [u, sigma(u)] pairs");
            return std::nullopt;
        }
        for (std::size_t i = 0; i < table->size(); ++i) {
            const json& e = (*table)[i];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                f.fail("table[" + std::to_string(i) + "]", "expected [u, sigma(u)]");
                return std::nullopt;
            }
            pts.emplace_back(e[0].get<double>(), e[1].get<double>());
            if (i > 0 && !(pts[i].first > pts[i - 1].first)) {
                f.fail("table[" + std::to_string(i) + "]", "u values must increase strictly");
                return std::nullopt;
            }
        }
        if (*lip < 0.0 || ell > *lip) {
            f.fail("lip", "require 0 <= ell <= lip");
            return std::nullopt;
        }
        auto fn = [pts](double u) {
            std::size_t i = 1;
            if (u > pts.front().first) {
                const auto it = std::lower_bound(pts.begin(), pts.end(), u,
                                                 [](const auto& p, double x) { return p.first < x; });
                i = std::clamp<std::size_t>(static_cast<std::size_t>(it - pts.begin()), 1,
                                            pts.size() - 1);
            }
            const auto& [x0, y0] = pts[i - 1];
            const auto& [x1, y1] = pts[i];
            return y0 + (y1 - y0) * (u - x0) / (x1 - x0);
        };
        return Nonlinearity::custom("custom", fn, *lip, ell);
    }
    f.fail("form", "expected one of zero, linear, saturating, sine, tanh, custom");
    return std::nullopt;
}

std::optional<InitialProfile> read_u0(Fields& f, int dim)
{
    const auto type = f.string("type", true);
    if (!type) {
        return std::nullopt;
    }
    auto check_dim = [&](const LatticePoint& p, const std::string& key) {
        if (dim > 0 && static_cast<int>(p.size()) != dim) {
            f.fail(key, "point dimension must equal the kernel dimension");
            return false;
        }
        return true;
    };
    if (*type == "delta") {
        const LatticePoint at = f.integers("at").value_or(LatticePoint(std::max(dim, 0), 0));
        const double mass = f.number("mass").value_or(1.0);
        if (!check_dim(at, "at")) {
            return std::nullopt;
        }
        return InitialProfile::delta(at, mass);
    }
    if (*type == "constant") {
        const auto c = f.number("value", true);
        return c ? std::optional(InitialProfile::constant(*c)) : std::nullopt;
    }
    if (*type == "table") {
        const json* entries = f.raw("entries", true);
        if (!entries) {
            return std::nullopt;
        }
        if (!entries->is_array() || entries->empty()) {
            f.fail("entries", "expected a non-empty array of {x, value}");
            return std::nullopt;
        }
        std::vector<std::pair<LatticePoint, double>> list;
        bool good = true;
        for (std::size_t i = 0; i < entries->size(); ++i) {
            Fields e((*entries)[i], f.at("entries") + "[" + std::to_string(i) + "]", f.issues());
            if (!e.ok()) {
                good = false;
                continue;
            }
            const auto x = e.integers("x", true);
            const auto value = e.number("value", true);
            e.finish();
            if (!x || !value || (dim > 0 && static_cast<int>(x->size()) != dim)) {
                if (x && dim > 0 && static_cast<int>(x->size()) != dim) {
                    e.fail("x", "point dimension must equal the kernel dimension");
                }
                good = false;
                continue;
            }
            list.emplace_back(*x, *value);
        }
        if (!good) {
            return std::nullopt;
        }
        try {
            return InitialProfile::table(std::move(list));
        } catch (const std::exception& ex) {
            f.fail("entries", ex.what());
            return std::nullopt;
        }
    }
    f.fail("type", "expected one of delta, constant, table");
    return std::nullopt;
}

void read_solver(Fields& f, SolverConfig& c)
{
    c.dt = f.number_or("dt", c.dt, [](double v) { return v > 0.0 && v <= 1.0; },
                       "must lie in (0, 1]");
    c.horizon = f.number_or("horizon", c.horizon, positive, "must be positive");
    if (const auto s = f.string("scheme")) {
        try {
            c.scheme = parse_scheme(*s);
        } catch (const std::exception&) {
            f.fail("scheme", "expected euler or split-exact-linear");
        }
    }
    c.noise_dt = f.number_or("noise_dt", c.noise_dt, nonneg, "must be nonnegative");
    if (const auto r = f.integer("record_every")) {
        if (*r < 1) {
            f.fail("record_every", "must be at least 1");
        } else {
            c.record_every = static_cast<std::size_t>(*r);
        }
    }
    c.record_times = f.numbers("record_times").value_or(c.record_times);
    c.snapshot_times = f.numbers("snapshot_times").value_or(c.snapshot_times);
    c.marked_points = f.points("marked_points").value_or(c.marked_points);
    c.accuracy_limit = f.number_or("accuracy_limit", c.accuracy_limit, positive, "must be positive");
    if (const json* obs = f.raw("observables", false)) {
        Fields o(*obs, f.at("observables"), f.issues());
        if (o.ok()) {
            auto& s = c.observables;
            s.l1 = o.boolean("l1").value_or(s.l1);
            s.l2sq = o.boolean("l2sq").value_or(s.l2sq);
            s.sup = o.boolean("sup").value_or(s.sup);
            s.negfrac = o.boolean("negfrac").value_or(s.negfrac);
            s.site_values = o.boolean("site_values").value_or(s.site_values);
            s.brownian = o.boolean("brownian").value_or(s.brownian);
            o.finish();
        }
    }
}

std::vector<int> read_k_list(Fields& f, std::vector<int> fallback)
{
    const auto k = f.integers("k");
    if (!k) {
        return fallback;
    }
    if (k->empty() || std::any_of(k->begin(), k->end(), [](int v) { return v < 1; })) {
        f.fail("k", "expected a non-empty list of integers >= 1");
        return fallback;
    }
    return *k;
}

std::vector<double> read_positive_list(Fields& f, const std::string& key, std::vector<double> fallback)
{
    const auto v = f.numbers(key);
    if (!v) {
        return fallback;
    }
    if (v->empty() || std::any_of(v->begin(), v->end(), [](double x) { return !(x > 0.0); })) {
        f.fail(key, "expected a non-empty list of positive numbers");
        return fallback;
    }
    return *v;
}

template <class Fn>
void with_block(Fields& top, const std::string& key, Fn&& fn)
{
    if (const json* v = top.raw(key, false)) {
        Fields f(*v, top.at(key), top.issues());
        if (f.ok()) {
            fn(f);
            f.finish();
        }
    }
}

} // namespace

WalkKernel parse_kernel(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ManifestInvalid("", std::string("invalid JSON: ") + e.what());
    }
    Issues issues;
    auto k = read_kernel(doc, "", issues, ".");
    if (!issues.empty() || !k) {
        throw ManifestInvalid(std::move(issues));
    }
    return *k;
}

RunManifest parse_manifest(const std::string& text, const std::string& base_dir)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ManifestInvalid("", std::string("invalid JSON: ") + e.what());
    }
    Issues issues;
    RunManifest m;
    Fields top(doc, "", issues);
    if (!top.ok()) {
        throw ManifestInvalid(std::move(issues));
    }
    m.hash = fnv1a_hex(doc.dump());

    if (const auto v = top.integer("schema_version")) {
        if (*v != manifest_schema_version) {
            top.fail("schema_version", "unsupported version " + std::to_string(*v));
        }
    }
    std::optional<WalkKernel> kernel;
    if (const json* v = top.raw("kernel", true)) {
        kernel = read_kernel(*v, "kernel", issues, base_dir);
    }
    const int dim = kernel ? kernel->dim() : 0;

    std::optional<Box> box;
    with_block(top, "box", [&](Fields& f) {
        const auto extents = f.integers("extents", true);
        Boundary boundary = Boundary::periodic;
        if (const auto b = f.string("boundary")) {
            try {
                boundary = parse_boundary(*b);
            } catch (const std::exception&) {
                f.fail("boundary", "expected periodic or frozen");
            }
        }
        if (!extents) {
            return;
        }
        if (extents->empty() ||
            std::any_of(extents->begin(), extents->end(), [](int e) { return e < 1; })) {
            f.fail("extents", "expected positive extents");
            return;
        }
        if (kernel && static_cast<int>(extents->size()) != dim) {
            f.fail("extents", "number of extents must equal the kernel dimension");
            return;
        }
        if (kernel && boundary == Boundary::periodic) {
            const int need = 3 * kernel->jumps.max_norm();
            if (*std::min_element(extents->begin(), extents->end()) < need) {
                f.fail("extents", "periodic extents must be at least " + std::to_string(need) +
                                      " (3 x the largest jump)");
                return;
            }
        }
        box = Box(*extents, boundary);
    });
    if (!top.has("box")) {
        top.raw("box", true);
    }

    std::optional<Nonlinearity> sigma;
    with_block(top, "sigma", [&](Fields& f) {
        sigma = read_sigma(f);
        if (sigma && !sigma->is_linear()) {
            for (const auto& problem : sigma->check()) {
                f.fail("", problem);
            }
        }
    });
    if (!top.has("sigma")) {
        top.raw("sigma", true);
    }

    std::optional<InitialProfile> u0;
    with_block(top, "u0", [&](Fields& f) {
        u0 = read_u0(f, kernel ? dim : -1);
    });
    if (!top.has("u0")) {
        top.raw("u0", true);
    }

    with_block(top, "solver", [&](Fields& f) { read_solver(f, m.solver); });

    if (const auto seed = top.integer("seed", true)) {
        if (*seed < 0) {
            top.fail("seed", "must be nonnegative");
        } else {
            m.seed = static_cast<std::uint64_t>(*seed);
        }
    }
    if (const auto r = top.integer("replicas")) {
        if (*r < 1) {
            top.fail("replicas", "must be at least 1");
        } else {
            m.replicas = static_cast<std::size_t>(*r);
        }
    }

    auto check_point = [&](Fields& f, const std::string& key, const LatticePoint& p) {
        if (kernel && static_cast<int>(p.size()) != dim) {
            f.fail(key, "point dimension must equal the kernel dimension");
        }
    };

    with_block(top, "moments", [&](Fields& f) {
        auto& b = m.moments;
        if (const json* v = f.raw("methods", false)) {
            b.methods.clear();
            if (!v->is_array() || v->empty()) {
                f.fail("methods", "expected a non-empty array");
            } else {
                for (const auto& e : *v) {
                    const std::string s = e.is_string() ? e.get<std::string>() : "";
                    if (s != "field-mc" && s != "feynman-kac" && s != "renewal") {
                        f.fail("methods", "expected field-mc, feynman-kac or renewal");
                        break;
                    }
                    b.methods.push_back(s);
                }
            }
        }
        b.k = read_k_list(f, b.k);
        b.times = read_positive_list(f, "times", b.times);
        if (const auto x = f.integers("x")) {
            b.x = *x;
            check_point(f, "x", b.x);
        }
        b.summed = f.boolean("summed").value_or(false);
    });

    with_block(top, "lyapunov", [&](Fields& f) {
        auto& b = m.lyapunov;
        b.k = read_k_list(f, b.k);
        b.times = read_positive_list(f, "times", b.times);
        if (const auto w = f.numbers("window")) {
            if (w->size() != 2 || !((*w)[0] < (*w)[1])) {
                f.fail("window", "expected [start, end] with start < end");
            } else {
                b.window_start = (*w)[0];
                b.window_end = (*w)[1];
            }
        }
        b.eps = f.number_or("eps", b.eps, [](double e) { return e > 0.0 && e < 1.0; },
                            "must lie in (0, 1)");
        if (const auto r = f.integer("resamples")) {
            if (*r < 10) {
                f.fail("resamples", "must be at least 10");
            } else {
                b.resamples = static_cast<std::size_t>(*r);
            }
        }
    });

    with_block(top, "renewal", [&](Fields& f) {
        auto& b = m.renewal;
        if (const auto mode = f.string("mode")) {
            if (*mode != "pam-second-moment" && *mode != "grids") {
                f.fail("mode", "expected pam-second-moment or grids");
            } else {
                b.mode = *mode;
            }
        }
        b.horizon = f.number_or("horizon", b.horizon, positive, "must be positive");
        b.step = f.number_or("step", b.step, positive, "must be positive");
        b.tol = f.number_or("tol", b.tol, positive, "must be positive");
        b.beta = f.number_or("beta", b.beta, nonneg, "must be nonnegative");
        auto file = [&](const std::string& key) -> std::string {
            const auto s = f.string(key, b.mode == "grids");
            if (!s) {
                return {};
            }
            const std::filesystem::path p(*s);
            return (p.is_absolute() ? p : std::filesystem::path(base_dir) / p).string();
        };
        b.g_file = file("g_file");
        b.h_file = file("h_file");
    });

    auto read_taus = [&](Fields& f, std::vector<double>& taus) {
        taus = read_positive_list(f, "taus", taus);
    };
    with_block(top, "clt", [&](Fields& f) {
        auto& b = m.clt;
        b.t = f.number_or("t", b.t, positive, "must be positive");
        read_taus(f, b.taus);
        if (const auto pts = f.points("points")) {
            b.points = *pts;
            for (const auto& p : b.points) {
                check_point(f, "points", p);
            }
        }
        b.ks_relaxation = f.number_or("ks_relaxation", b.ks_relaxation, positive, "must be positive");
        b.max_discard_fraction = f.number_or("max_discard_fraction", b.max_discard_fraction,
                                             [](double v) { return v >= 0.0 && v <= 1.0; },
                                             "must lie in [0, 1]");
    });
    with_block(top, "rn", [&](Fields& f) {
        auto& b = m.rn;
        b.t = f.number_or("t", b.t, positive, "must be positive");
        read_taus(f, b.taus);
        if (const auto x = f.integers("x")) {
            b.x = *x;
            check_point(f, "x", b.x);
        }
        b.eta = f.number_or("eta", b.eta, positive, "must be positive");
    });
    with_block(top, "dissipation", [&](Fields& f) {
        auto& b = m.dissipation;
        b.fit_start = f.number_or("fit_start", b.fit_start, positive, "must be positive");
        b.fit_end = f.number_or("fit_end", b.fit_end, positive, "must be positive");
        if (b.fit_end <= b.fit_start) {
            f.fail("fit_end", "must exceed fit_start");
        }
    });
    with_block(top, "output", [&](Fields& f) {
        if (const auto dir = f.string("dir")) {
            m.output_dir = *dir;
        }
    });
    top.finish();

    if (kernel) {
        m.kernel = *kernel;
    }
    if (box) {
        m.box = *box;
    }
    if (sigma) {
        m.sigma = *sigma;
    }
    if (u0) {
        m.u0 = *u0;
    }
    if (kernel) {
        if (m.moments.x.empty()) {
            m.moments.x.assign(dim, 0);
        }
        if (m.rn.x.empty()) {
            m.rn.x.assign(dim, 0);
        }
        if (m.clt.points.empty()) {
            m.clt.points.push_back(LatticePoint(dim, 0));
        }
        for (const auto& p : m.solver.marked_points) {
            if (static_cast<int>(p.size()) != dim) {
                issues.push_back({"solver.marked_points", "point dimension must equal the kernel dimension"});
                break;
            }
        }
    }
    // Constraints that involve sigma and the solver together.
    if (sigma && std::none_of(issues.begin(), issues.end(),
                              [](const auto& i) { return i.path.rfind("solver", 0) == 0; })) {
        try {
            validate(m.solver, m.sigma);
        } catch (const std::invalid_argument& e) {
            issues.push_back({"solver", e.what()});
        }
    }
    if (!issues.empty()) {
        throw ManifestInvalid(std::move(issues));
    }
    return m;
}

RunSpec run_spec(const RunManifest& manifest, unsigned threads)
{
    return RunSpec{manifest.box,    manifest.kernel, manifest.sigma, manifest.u0,
                   manifest.solver, manifest.seed,   threads};
}

} // namespace she
