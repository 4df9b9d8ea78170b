#include "nlh/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nlh/errors.hpp"

namespace nlh {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, "field '" + field + "': " + what);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) bad(path + key, "missing");
    return j.at(key);
}

double num(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number()) bad(path + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& key, const std::string& path, double def) {
    return j.contains(key) ? num(j, key, path) : def;
}

int integer(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number_integer()) bad(path + key, "expected an integer");
    return v.get<int>();
}

int int_or(const json& j, const std::string& key, const std::string& path, int def) {
    return j.contains(key) ? integer(j, key, path) : def;
}

std::string str(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string()) bad(path + key, "expected a string");
    return v.get<std::string>();
}

bool flag_or(const json& j, const std::string& key, const std::string& path, bool def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_boolean()) bad(path + key, "expected true or false");
    return j.at(key).get<bool>();
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) bad(path + it.key(), "unknown field");
    }
}

BeamSpec parse_beam(const json& j, const std::string& path, Side side) {
    if (!j.is_object()) bad(path, "expected an object");
    check_keys(j, path + ".", {"shape", "width", "amplitude", "center", "tilt", "adjust", "samples"});
    BeamSpec b;
    b.side = side;
    const std::string p = path + ".";
    const std::string shape = str(j, "shape", p);
    try {
        b.kind = parse_beam_kind(shape);
    } catch (const Error&) {
        bad(p + "shape", "expected sech, gaussian or custom");
    }
    b.width = num_or(j, "width", p, 1.0);
    b.amplitude = num_or(j, "amplitude", p, 1.0);
    b.center = num_or(j, "center", p, 0.0);
    b.tiltAngle = num_or(j, "tilt", p, 0.0);
    b.adjust = flag_or(j, "adjust", p, false);
    if (b.kind == BeamKind::Custom) {
        const json& s = need(j, "samples", p);
        if (!s.is_array()) bad(p + "samples", "expected an array of [re, im] pairs");
        for (const auto& e : s) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                bad(p + "samples", "expected an array of [re, im] pairs");
            b.samples.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
    }
    if (b.kind != BeamKind::Custom && !(b.width > 0.0)) bad(p + "width", "must be positive");
    if (!(std::abs(b.tiltAngle) < std::numbers::pi / 2)) bad(p + "tilt", "must satisfy |tilt| < pi/2");
    return b;
}

json beam_json(const BeamSpec& b) {
    json j;
    j["shape"] = beam_kind_name(b.kind);
    j["width"] = b.width;
    j["amplitude"] = b.amplitude;
    j["center"] = b.center;
    j["tilt"] = b.tiltAngle;
    j["adjust"] = b.adjust;
    if (b.kind == BeamKind::Custom) {
        json s = json::array();
        for (cd v : b.samples) s.push_back({v.real(), v.imag()});
        j["samples"] = s;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "configuration must be a JSON object");
    check_keys(j, "", {"name", "geometry", "k0", "sigma", "domain", "grid", "layers", "beams", "solver", "nls",
                       "output", "desk"});
    RunConfig c;
    if (j.contains("name")) c.name = str(j, "name", "");
    const std::string geometry = str(j, "geometry", "");
    try {
        c.geometry = parse_geometry(geometry);
    } catch (const Error&) {
        bad("geometry", "expected 1d, cartesian2d or cylindrical");
    }
    c.k0 = num(j, "k0", "");
    c.sigma = num_or(j, "sigma", "", 1.0);
    const json& dom = need(j, "domain", "");
    check_keys(dom, "domain.", {"Zmax", "Xmax", "Rmax"});
    c.Zmax = num(dom, "Zmax", "domain.");
    if (c.geometry == Geometry::Cartesian) c.Xmax = num(dom, "Xmax", "domain.");
    if (c.geometry == Geometry::Cylindrical) c.Xmax = num(dom, "Rmax", "domain.");
    if (c.geometry == Geometry::OneD) c.Xmax = 0.0;
    const json& grid = need(j, "grid", "");
    check_keys(grid, "grid.", {"N", "M"});
    c.N = integer(grid, "N", "grid.");
    c.M = c.geometry == Geometry::OneD ? int_or(grid, "M", "grid.", 1) : integer(grid, "M", "grid.");

    const json& layers = need(j, "layers", "");
    if (!layers.is_array() || layers.empty()) bad("layers", "expected a non-empty array");
    for (size_t i = 0; i < layers.size(); ++i) {
        const std::string p = "layers[" + std::to_string(i) + "].";
        check_keys(layers[i], p, {"z0", "z1", "nu", "eps"});
        Layer L;
        L.z0 = num(layers[i], "z0", p);
        L.z1 = num(layers[i], "z1", p);
        L.nu = num_or(layers[i], "nu", p, 1.0);
        L.eps = num_or(layers[i], "eps", p, 0.0);
        c.layers.push_back(L);
    }
    if (j.contains("beams")) {
        const json& b = j.at("beams");
        check_keys(b, "beams.", {"left", "right"});
        if (b.contains("left") && !b.at("left").is_null()) c.left = parse_beam(b.at("left"), "beams.left", Side::Left);
        if (b.contains("right") && !b.at("right").is_null())
            c.right = parse_beam(b.at("right"), "beams.right", Side::Right);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, "solver.", {"kind", "omega", "switchThreshold", "tol", "maxIterations", "innerIterations",
                                  "growthLimit", "verbose"});
        if (s.contains("kind")) {
            const std::string kind = str(s, "kind", "solver.");
            try {
                c.solver.kind = parse_solver(kind);
            } catch (const Error&) {
                bad("solver.kind", "expected newton, freezing or born");
            }
        }
        c.solver.omega = num_or(s, "omega", "solver.", c.solver.omega);
        c.solver.switchThreshold = num_or(s, "switchThreshold", "solver.", c.solver.switchThreshold);
        c.solver.convergenceTol = num_or(s, "tol", "solver.", c.solver.convergenceTol);
        c.solver.maxIterations = int_or(s, "maxIterations", "solver.", c.solver.maxIterations);
        c.solver.innerIterations = int_or(s, "innerIterations", "solver.", c.solver.innerIterations);
        c.solver.growthLimit = num_or(s, "growthLimit", "solver.", c.solver.growthLimit);
        c.solver.verbose = flag_or(s, "verbose", "solver.", false);
    }
    if (j.contains("nls")) {
        const json& s = j.at("nls");
        check_keys(s, "nls.", {"dz", "M"});
        c.nls.dz = num_or(s, "dz", "nls.", 0.0);
        c.nls.M = int_or(s, "M", "nls.", 0);
    }
    if (j.contains("output")) c.output = str(j, "output", "");
    c.desk = flag_or(j, "desk", "", false);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read configuration '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["name"] = c.name;
    j["geometry"] = geometry_name(c.geometry);
    j["k0"] = c.k0;
    j["sigma"] = c.sigma;
    json dom;
    dom["Zmax"] = c.Zmax;
    if (c.geometry == Geometry::Cartesian) dom["Xmax"] = c.Xmax;
    if (c.geometry == Geometry::Cylindrical) dom["Rmax"] = c.Xmax;
    j["domain"] = dom;
    j["grid"] = {{"N", c.N}, {"M", c.M}};
    json layers = json::array();
    for (const Layer& L : c.layers) layers.push_back({{"z0", L.z0}, {"z1", L.z1}, {"nu", L.nu}, {"eps", L.eps}});
    j["layers"] = layers;
    json beams = json::object();
    beams["left"] = c.left ? beam_json(*c.left) : json(nullptr);
    beams["right"] = c.right ? beam_json(*c.right) : json(nullptr);
    j["beams"] = beams;
    j["solver"] = {{"kind", solver_name(c.solver.kind)},
                   {"omega", c.solver.omega},
                   {"switchThreshold", c.solver.switchThreshold},
                   {"tol", c.solver.convergenceTol},
                   {"maxIterations", c.solver.maxIterations},
                   {"innerIterations", c.solver.innerIterations},
                   {"growthLimit", c.solver.growthLimit},
                   {"verbose", c.solver.verbose}};
    j["nls"] = {{"dz", c.nls.dz}, {"M", c.nls.M}};
    j["output"] = c.output;
    j["desk"] = c.desk;
    return j.dump(2) + "\n";
}

void validate(const RunConfig& c) {
    if (!(c.k0 > 0.0) || !std::isfinite(c.k0)) bad("k0", "must be positive");
    if (!(c.sigma > 0.0)) bad("sigma", "must be positive");
    if (!(c.Zmax > 0.0)) bad("domain.Zmax", "must be positive");
    if (c.geometry != Geometry::OneD && !(c.Xmax > 0.0))
        bad(c.geometry == Geometry::Cylindrical ? "domain.Rmax" : "domain.Xmax", "must be positive");
    if (c.N < 4) bad("grid.N", "must be at least 4");
    if (c.geometry != Geometry::OneD && c.M < 8) bad("grid.M", "must be at least 8");
    if (c.geometry == Geometry::OneD && c.M != 1) bad("grid.M", "must be 1 in 1d");
    if (c.layers.empty()) bad("layers", "expected a non-empty array");
    if (std::abs(c.layers.back().z1 - c.Zmax) > 1e-12 * c.Zmax) bad("layers", "must end at domain.Zmax");
    if (c.nls.dz < 0.0) bad("nls.dz", "must be non-negative");
    if (c.nls.M < 0) bad("nls.M", "must be non-negative");
    for (const auto* b : {&c.left, &c.right}) {
        if (!*b) continue;
        const std::string p = (*b)->side == Side::Left ? "beams.left" : "beams.right";
        if ((*b)->kind == BeamKind::Custom && static_cast<int>((*b)->samples.size()) != c.M)
            bad(p + ".samples", "needs one sample per transverse cell");
        if (c.geometry == Geometry::Cylindrical && (*b)->tiltAngle != 0.0)
            throw Error(ErrorCode::UnsupportedTilt, "field '" + p + ".tilt': tilted beams need Cartesian geometry");
    }
    try {
        validate(c.solver);
    } catch (const Error& e) {
        bad("solver", e.what());
    }
    MaterialStack m;
    m.k0 = c.k0;
    m.sigma = c.sigma;
    m.layers = c.layers;
    try {
        validate(m);
        classify_nodes(build_grid_1d(c.Zmax, c.N), m);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("field 'layers': ") + e.what());
    }
}

// ---------------------------------------------------------------- presets

namespace {

int round_even(double v) { return 2 * static_cast<int>(std::lround(v / 2.0)); }

RunConfig base(const std::string& name, Geometry g, double k0, double sigma, double Zmax, double Xmax, int N, int M,
               double eps) {
    RunConfig c;
    c.name = name;
    c.geometry = g;
    c.k0 = k0;
    c.sigma = sigma;
    c.Zmax = Zmax;
    c.Xmax = Xmax;
    c.N = N;
    c.M = M;
    c.layers = {{0.0, Zmax, 1.0, eps}};
    c.output = "out/" + name;
    return c;
}

BeamSpec beam(BeamKind k, double width, double center, double tilt, Side side, bool adjust) {
    BeamSpec b;
    b.kind = k;
    b.width = width;
    b.center = center;
    b.tiltAngle = tilt;
    b.side = side;
    b.adjust = adjust;
    return b;
}

using Factory = RunConfig (*)(bool desk);

RunConfig soliton(bool desk) {
    const double k0 = 4.0, lam = 2 * std::numbers::pi / k0;
    RunConfig c = desk ? base("soliton-2d-desk", Geometry::Cartesian, k0, 1, 40, 12, int(std::lround(40 / (lam / 15))), 116,
                              1 / (k0 * k0))
                       : base("soliton-2d-paper", Geometry::Cartesian, k0, 1, 240, 12, 4480, 112, 1 / (k0 * k0));
    c.left = beam(BeamKind::Sech, std::sqrt(2.0), 0, 0, Side::Left, true);
    return c;
}

RunConfig collapse_cyl(bool desk) {
    RunConfig c = desk ? base("collapse-cyl-desk", Geometry::Cylindrical, 8, 1, 9, 3.5, 576, 192, 0.15)
                       : base("collapse-cyl-paper", Geometry::Cylindrical, 8, 1, 9, 3.5, 1080, 360, 0.15);
    c.left = beam(BeamKind::Gaussian, 1, 0, 0, Side::Left, true);
    return c;
}

RunConfig collapse_quintic(bool desk) {
    RunConfig c = desk ? base("collapse-quintic-desk", Geometry::Cartesian, 8, 2, 6, 3, 450, 150, 0.125)
                       : base("collapse-quintic-paper", Geometry::Cartesian, 8, 2, 6, 3, 900, 300, 0.125);
    c.left = beam(BeamKind::Gaussian, 1, 0, 0, Side::Left, true);
    return c;
}

RunConfig collision90(bool desk) {
    const double k0 = 6.0, lam = 2 * std::numbers::pi / k0, ppw = desk ? 8.0 : 10.0;
    const double h = lam / ppw, tilt = -std::numbers::pi / 4;
    RunConfig c = base(desk ? "collision-90-desk" : "collision-90-paper", Geometry::Cartesian, k0, 1, 20, 30,
                       int(std::lround(20 / h)), round_even(60 / h), 1 / (k0 * k0));
    c.left = beam(BeamKind::Sech, std::sqrt(2.0), 10, tilt, Side::Left, true);
    c.right = beam(BeamKind::Sech, std::sqrt(2.0), 10, tilt, Side::Right, true);
    return c;
}

RunConfig collision150(bool desk) {
    const double k0 = 4.0, lam = 2 * std::numbers::pi / k0, ppw = desk ? 10.0 : 16.0;
    const double h = lam / ppw, tilt = -std::numbers::pi / 12;
    RunConfig c = base(desk ? "collision-150-desk" : "collision-150-paper", Geometry::Cartesian, k0, 1, 30, 12,
                       int(std::lround(30 / h)), round_even(24 / h), 1 / (k0 * k0));
    c.left = beam(BeamKind::Sech, std::sqrt(2.0), 4, tilt, Side::Left, true);
    c.right = beam(BeamKind::Sech, std::sqrt(2.0), 4, tilt, Side::Right, true);
    return c;
}

RunConfig inclined_quintic(bool desk) {
    RunConfig c = desk ? base("inclined-quintic-desk", Geometry::Cartesian, 8, 2, 12, 12, 200, 400, 0.12)
                       : base("inclined-quintic-paper", Geometry::Cartesian, 8, 2, 12, 12, 400, 800, 0.12);
    c.left = beam(BeamKind::Gaussian, 1, 4, -std::numbers::pi / 5.3, Side::Left, true);
    return c;
}

RunConfig unadjusted_cyl(bool desk) {
    const double lam = 2 * std::numbers::pi / 8.0;
    RunConfig c = desk ? base("unadjusted-cyl-desk", Geometry::Cylindrical, 8, 1, 3, 3.5, 115, 112, 0.15)
                       : base("unadjusted-cyl-paper", Geometry::Cylindrical, 8, 1, 8.5, 3.5,
                              int(std::lround(8.5 / (lam / 83))), round_even(3.5 / (lam / 67)), 0.15);
    c.left = beam(BeamKind::Gaussian, 1, 0, 0, Side::Left, false);
    return c;
}

const std::map<std::string, Factory>& registry() {
    static const std::map<std::string, Factory> r{
        {"soliton-2d", soliton},           {"collapse-cyl", collapse_cyl},     {"collapse-quintic", collapse_quintic},
        {"collision-90", collision90},     {"collision-150", collision150},    {"inclined-quintic", inclined_quintic},
        {"unadjusted-cyl", unadjusted_cyl}};
    return r;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [k, f] : registry()) {
        out.push_back(k + "-paper");
        out.push_back(k + "-desk");
    }
    return out;
}

RunConfig preset(const std::string& name, const std::string& scale) {
    std::string family = name, sc = scale;
    for (const char* suffix : {"-paper", "-desk"}) {
        const std::string s(suffix);
        if (family.size() > s.size() && family.compare(family.size() - s.size(), s.size(), s) == 0) {
            if (!sc.empty() && sc != s.substr(1))
                throw Error(ErrorCode::UnknownPreset, "preset '" + name + "' conflicts with scale '" + scale + "'");
            sc = s.substr(1);
            family.resize(family.size() - s.size());
        }
    }
    if (sc.empty()) sc = "paper";
    if (sc != "paper" && sc != "desk") throw Error(ErrorCode::UnknownPreset, "unknown scale '" + scale + "'");
    const auto it = registry().find(family);
    if (it == registry().end()) throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
    RunConfig c = it->second(sc == "desk");
    c.desk = sc == "desk";
    validate(c);
    return c;
}

Setup build_setup(const RunConfig& c) {
    validate(c);
    Setup s;
    s.grid = c.geometry == Geometry::OneD ? as_nd(build_grid_1d(c.Zmax, c.N))
                                          : build_grid_nd(c.geometry, c.Zmax, c.N, c.Xmax, c.M);
    s.mat.k0 = c.k0;
    s.mat.sigma = c.sigma;
    s.mat.layers = c.layers;
    s.incL = c.left ? make_incoming(*c.left, s.grid, s.mat) : Eigen::VectorXcd::Zero(s.grid.M);
    s.incR = c.right ? make_incoming(*c.right, s.grid, s.mat) : Eigen::VectorXcd::Zero(s.grid.M);
    return s;
}

Problem build_problem(const RunConfig& c) {
    Setup s = build_setup(c);
    return make_problem(s.grid, s.mat, s.incL, s.incR);
}

}  // namespace nlh
