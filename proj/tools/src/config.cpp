#include "kbound_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kbound/error.hpp"

namespace kbound::cli {

using nlohmann::json;

namespace {

[[noreturn]] void reject(const std::string& path, const std::string& what) {
    fail(ErrorKind::config, "config: " + (path.empty() ? std::string("<root>") : path) + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string join(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) reject(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) reject(path, "expected a finite number");
    return v;
}

std::int64_t as_integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    }
    reject(path, "expected an integer");
}

std::uint64_t as_unsigned(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    const auto v = as_integer(j, path);
    if (v < 0) reject(path, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

int as_int(const json& j, const std::string& path, int lo, int hi) {
    const auto v = as_integer(j, path);
    if (v < lo || v > hi) reject(path, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

Vec2 as_vec2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) reject(path, "expected [x, y]");
    return {as_number(j[0], join(path, 0)), as_number(j[1], join(path, 1))};
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) reject(path, "expected an array");
    return j;
}

Strategy as_strategy(const json& j, const std::string& path) {
    if (!j.is_string()) reject(path, "expected a strategy name");
    const auto s = parse_strategy(j.get<std::string>());
    if (!s) reject(path, "unknown strategy '" + j.get<std::string>() + "'");
    return *s;
}

// Object reader that remembers which keys were consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) reject(path_, "expected an object");
    }

    const json* find(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string at(const char* key) const { return join(path_, key); }

    void number(const char* key, double& out) {
        if (auto* v = find(key)) out = as_number(*v, at(key));
    }
    void positive(const char* key, double& out) {
        if (auto* v = find(key)) {
            out = as_number(*v, at(key));
            if (!(out > 0.0)) reject(at(key), "expected a positive number");
        }
    }
    void integer(const char* key, int& out, int lo, int hi) {
        if (auto* v = find(key)) out = as_int(*v, at(key), lo, hi);
    }
    void count(const char* key, std::size_t& out) {
        if (auto* v = find(key)) out = static_cast<std::size_t>(as_unsigned(*v, at(key)));
    }
    void unsigned_(const char* key, std::uint64_t& out) {
        if (auto* v = find(key)) out = as_unsigned(*v, at(key));
    }
    void boolean(const char* key, bool& out) {
        if (auto* v = find(key)) {
            if (!v->is_boolean()) reject(at(key), "expected true or false");
            out = v->get<bool>();
        }
    }
    void string(const char* key, std::string& out) {
        if (auto* v = find(key)) {
            if (!v->is_string()) reject(at(key), "expected a string");
            out = v->get<std::string>();
        }
    }
    void vec2(const char* key, Vec2& out) {
        if (auto* v = find(key)) out = as_vec2(*v, at(key));
    }
    void numbers(const char* key, std::vector<double>& out) {
        if (auto* v = find(key)) {
            out.clear();
            const auto& a = as_array(*v, at(key));
            for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_number(a[i], join(at(key), i)));
        }
    }
    void counts(const char* key, std::vector<std::size_t>& out) {
        if (auto* v = find(key)) {
            out.clear();
            const auto& a = as_array(*v, at(key));
            for (std::size_t i = 0; i < a.size(); ++i) {
                out.push_back(static_cast<std::size_t>(as_unsigned(a[i], join(at(key), i))));
            }
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) reject(join(path_, it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Circle read_circle(const json& j, const std::string& path) {
    Obj o(j, path);
    Circle c;
    o.vec2("center", c.center);
    o.positive("radius", c.radius);
    o.finish();
    return c;
}

void read_domain(const json& j, Config& c) {
    Obj o(j, "domain");
    if (auto* v = o.find("outer")) c.outer = read_circle(*v, o.at("outer"));
    if (auto* v = o.find("inner")) {
        c.inner.clear();
        const auto& a = as_array(*v, o.at("inner"));
        for (std::size_t i = 0; i < a.size(); ++i) c.inner.push_back(read_circle(a[i], join(o.at("inner"), i)));
    }
    o.finish();
}

void read_loop(const json& j, LoopConfig& l) {
    Obj o(j, "loop");
    o.string("type", l.type);
    if (l.type != "circle" && l.type != "ellipse") reject(o.at("type"), "expected 'circle' or 'ellipse'");
    o.vec2("center", l.center);
    o.positive("radius", l.radius);
    o.positive("a", l.a);
    o.positive("b", l.b);
    o.number("rotation", l.rotation);
    o.boolean("counterclockwise", l.counterclockwise);
    o.number("base_t", l.base_t);
    o.finish();
}

void read_strip(const json& j, GrowthOptions& s) {
    Obj o(j, "strip");
    o.positive("delta", s.delta);
    o.integer("n_tau", s.n_tau, 8, 1 << 16);
    o.integer("n_u", s.n_u, 2, 1 << 12);
    o.integer("grid", s.grid, 1, 1 << 20);
    o.finish();
}

void read_punctures(const json& j, PunctureConfig& p) {
    Obj o(j, "punctures");
    if (auto* v = o.find("strategy")) p.strategy = as_strategy(*v, o.at("strategy"));
    o.count("s", p.s);
    if (auto* v = o.find("points")) {
        p.points.clear();
        const auto& a = as_array(*v, o.at("points"));
        for (std::size_t i = 0; i < a.size(); ++i) p.points.push_back(as_vec2(a[i], join(o.at("points"), i)));
    }
    o.finish();
}

void read_density(const json& j, DensityConfig& d) {
    Obj o(j, "density");
    o.integer("grid", d.grid, 2, 4096);
    o.string("reference", d.reference);
    if (d.reference != "none" && d.reference != "disk" && d.reference != "punctured_disk" && d.reference != "annulus") {
        reject(o.at("reference"), "expected none, disk, punctured_disk or annulus");
    }
    o.positive("R", d.R);
    o.positive("r", d.r);
    if (d.reference == "annulus" && !(d.r < 1.0)) reject(o.at("r"), "annulus inner radius must be < 1");
    o.finish();
}

void read_lp(const json& j, LpConfig& l) {
    Obj o(j, "lp");
    o.numbers("p", l.p);
    for (std::size_t i = 0; i < l.p.size(); ++i) {
        if (!(l.p[i] >= 1.0 && l.p[i] < 2.0)) reject(join(o.at("p"), i), "exponent must lie in [1, 2)");
    }
    o.integer("max_depth", l.max_depth, 0, 30);
    o.integer("order", l.order, 2, 16);
    if (l.order != 2 && l.order != 4 && l.order != 8 && l.order != 16) reject(o.at("order"), "expected 2, 4, 8 or 16");
    o.finish();
}

void read_select(const json& j, SelectConfig& s) {
    Obj o(j, "select");
    if (auto* v = o.find("p")) {
        if (v->is_null()) {
            s.p = 0.0;
        } else {
            s.p = as_number(*v, o.at("p"));
            if (!(s.p > 1.0 && s.p < 2.0)) reject(o.at("p"), "exponent must lie in (1, 2), or null for the schedule");
        }
    }
    o.finish();
}

void read_growth(const json& j, GrowthConfig& g) {
    Obj o(j, "growth");
    if (auto* v = o.find("strategies")) {
        g.strategies.clear();
        const auto& a = as_array(*v, o.at("strategies"));
        for (std::size_t i = 0; i < a.size(); ++i) g.strategies.push_back(as_strategy(a[i], join(o.at("strategies"), i)));
    }
    o.counts("s", g.s);
    if (auto* v = o.find("seeds")) {
        g.seeds.clear();
        const auto& a = as_array(*v, o.at("seeds"));
        for (std::size_t i = 0; i < a.size(); ++i) g.seeds.push_back(as_unsigned(a[i], join(o.at("seeds"), i)));
    }
    o.finish();
}

GeneratorConfig read_generator(const json& j, const std::string& path) {
    Obj o(j, path);
    GeneratorConfig g;
    o.integer("rank", g.rank, 1, 6);
    const std::size_t n2 = static_cast<std::size_t>(g.rank) * static_cast<std::size_t>(g.rank);
    g.gram.assign(n2, 0.0);
    g.monodromy.assign(n2, 0);
    for (int i = 0; i < g.rank; ++i) {
        g.gram[static_cast<std::size_t>(i * (g.rank + 1))] = 1.0;
        g.monodromy[static_cast<std::size_t>(i * (g.rank + 1))] = 1;
    }
    o.numbers("gram", g.gram);
    if (g.gram.size() != n2) reject(o.at("gram"), "expected rank*rank entries");
    if (auto* v = o.find("monodromy")) {
        const auto& a = as_array(*v, o.at("monodromy"));
        if (a.size() != n2) reject(o.at("monodromy"), "expected rank*rank entries");
        for (std::size_t i = 0; i < a.size(); ++i) g.monodromy[i] = as_integer(a[i], join(o.at("monodromy"), i));
    }
    o.finish();
    // matrix validity (symmetry, definiteness, unimodularity) is checked here so errors carry the path
    try {
        TorusLattice(g.rank, g.gram, g.monodromy);
    } catch (const Error& e) {
        reject(path, e.what());
    }
    return g;
}

void read_lattice(const json& j, LatticeConfig& l) {
    Obj o(j, "lattice");
    int n = 1, k = 2;
    const bool has_n = o.find("n") != nullptr;
    const bool has_k = o.find("k") != nullptr;
    o.integer("n", n, 1, 3);
    o.integer("k", k, 1, 3);
    if (auto* v = o.find("generators")) {
        l.generators.clear();
        const auto& a = as_array(*v, o.at("generators"));
        for (std::size_t i = 0; i < a.size(); ++i) l.generators.push_back(read_generator(a[i], join(o.at("generators"), i)));
        if (l.generators.empty() || l.generators.size() > 3) reject(o.at("generators"), "expected 1 to 3 generators");
        if (has_k && static_cast<std::size_t>(k) != l.generators.size()) reject(o.at("k"), "does not match generators");
        for (std::size_t i = 0; i < l.generators.size(); ++i) {
            if (has_n && l.generators[i].rank != 2 * n) reject(join(o.at("generators"), i), "rank must be 2n");
        }
    } else if (has_n || has_k) {
        GeneratorConfig g;
        g.rank = 2 * n;
        g.gram.assign(static_cast<std::size_t>(g.rank * g.rank), 0.0);
        g.monodromy.assign(g.gram.size(), 0);
        for (int i = 0; i < g.rank; ++i) {
            g.gram[static_cast<std::size_t>(i * (g.rank + 1))] = 1.0;
            g.monodromy[static_cast<std::size_t>(i * (g.rank + 1))] = 1;
        }
        l.generators.assign(static_cast<std::size_t>(k), g);
    }
    for (std::size_t i = 0; i < l.generators.size(); ++i) {
        const int r = l.generators[i].rank;
        if (r != 2 && r != 4) reject(join(o.at("generators"), i), "rank must be 2 or 4");
    }
    o.positive("c_linear", l.c_linear);
    o.number("c_sublinear", l.c_sublinear);
    o.number("c0", l.c0);
    o.counts("s", l.s);
    o.unsigned_("budget", l.budget);
    o.finish();
}

void read_verify(const json& j, VerifyConfig& v) {
    Obj o(j, "verify");
    o.counts("lemma_s", v.lemma_s);
    o.numbers("lemma_p", v.lemma_p);
    for (std::size_t i = 0; i < v.lemma_p.size(); ++i) {
        if (!(v.lemma_p[i] >= 1.0 && v.lemma_p[i] < 2.0)) reject(join(o.at("lemma_p"), i), "exponent must lie in [1, 2)");
    }
    o.counts("growth_s", v.growth_s);
    o.integer("selection_runs", v.selection_runs, 1, 100000);
    o.finish();
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json circle_json(const Circle& c) { return {{"center", vec_json(c.center)}, {"radius", c.radius}}; }

}  // namespace

CircleDomain Config::domain() const { return CircleDomain(outer, inner); }

SmoothLoop Config::make_loop() const {
    const auto coeffs = loop.type == "circle"
                            ? circle_coefficients(loop.center, loop.radius, loop.counterclockwise)
                            : ellipse_coefficients(loop.center, loop.a, loop.b, loop.rotation, loop.counterclockwise);
    return make_series_loop(coeffs, loop.base_t);
}

std::vector<TorusLattice> Config::generators() const {
    std::vector<TorusLattice> out;
    for (const auto& g : lattice.generators) out.emplace_back(g.rank, g.gram, g.monodromy);
    return out;
}

ScheduleConstants Config::schedule() const { return {lattice.c_linear, lattice.c_sublinear, lattice.c0}; }

Config parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(ErrorKind::config, std::string("config: invalid JSON: ") + e.what());
    }
    Config c;
    Obj o(root, "");
    auto* version = o.find("schema_version");
    if (!version) reject("schema_version", "missing");
    c.schema_version = as_int(*version, "schema_version", 0, std::numeric_limits<int>::max());
    if (c.schema_version != kSchemaVersion) {
        reject("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                                     std::to_string(kSchemaVersion) + ")");
    }
    o.unsigned_("seed", c.seed);
    o.integer("threads", c.threads, 0, 1024);
    if (auto* v = o.find("domain")) read_domain(*v, c);
    if (auto* v = o.find("loop")) read_loop(*v, c.loop);
    if (auto* v = o.find("strip")) read_strip(*v, c.strip);
    if (auto* v = o.find("punctures")) read_punctures(*v, c.punctures);
    if (auto* v = o.find("density")) read_density(*v, c.density);
    if (auto* v = o.find("lp")) read_lp(*v, c.lp);
    if (auto* v = o.find("select")) read_select(*v, c.select);
    if (auto* v = o.find("growth")) read_growth(*v, c.growth);
    if (auto* v = o.find("lattice")) read_lattice(*v, c.lattice);
    if (auto* v = o.find("verify")) read_verify(*v, c.verify);
    o.finish();

    try {
        (void)c.domain();
    } catch (const Error& e) {
        reject("domain", e.what());
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::config, "config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_json(const Config& c) {
    json inner = json::array();
    for (const auto& h : c.inner) inner.push_back(circle_json(h));
    json strategies = json::array();
    for (auto s : c.growth.strategies) strategies.push_back(std::string(to_string(s)));
    json points = json::array();
    for (auto p : c.punctures.points) points.push_back(vec_json(p));
    json gens = json::array();
    for (const auto& g : c.lattice.generators) {
        gens.push_back({{"rank", g.rank}, {"gram", g.gram}, {"monodromy", g.monodromy}});
    }
    json root = {
        {"schema_version", c.schema_version},
        {"seed", c.seed},
        {"domain", {{"outer", circle_json(c.outer)}, {"inner", inner}}},
        {"loop",
         {{"type", c.loop.type},
          {"center", vec_json(c.loop.center)},
          {"radius", c.loop.radius},
          {"a", c.loop.a},
          {"b", c.loop.b},
          {"rotation", c.loop.rotation},
          {"counterclockwise", c.loop.counterclockwise},
          {"base_t", c.loop.base_t}}},
        {"strip", {{"delta", c.strip.delta}, {"n_tau", c.strip.n_tau}, {"n_u", c.strip.n_u}, {"grid", c.strip.grid}}},
        {"punctures", {{"strategy", std::string(to_string(c.punctures.strategy))}, {"s", c.punctures.s}, {"points", points}}},
        {"density", {{"grid", c.density.grid}, {"reference", c.density.reference}, {"R", c.density.R}, {"r", c.density.r}}},
        {"lp", {{"p", c.lp.p}, {"max_depth", c.lp.max_depth}, {"order", c.lp.order}}},
        {"select", {{"p", c.select.p > 0.0 ? json(c.select.p) : json(nullptr)}}},
        {"growth", {{"strategies", strategies}, {"s", c.growth.s}, {"seeds", c.growth.seeds}}},
        {"lattice",
         {{"generators", gens},
          {"c_linear", c.lattice.c_linear},
          {"c_sublinear", c.lattice.c_sublinear},
          {"c0", c.lattice.c0},
          {"s", c.lattice.s},
          {"budget", c.lattice.budget}}},
        {"verify",
         {{"lemma_s", c.verify.lemma_s},
          {"lemma_p", c.verify.lemma_p},
          {"growth_s", c.verify.growth_s},
          {"selection_runs", c.verify.selection_runs}}},
    };
    return root.dump();
}

}  // namespace kbound::cli
