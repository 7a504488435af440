#include "bandflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "bandflow/errors.hpp"

namespace bandflow::io {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + " must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(where + "." + key + " must be finite");
    }
    return x;
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback)
{
    return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

int get_int(const json& obj, const std::string& key, const std::string& where)
{
    const double x = get_number(obj, key, where);
    if (x != std::round(x) || std::abs(x) > 1e9) {
        throw ConfigError(where + "." + key + " must be an integer");
    }
    return static_cast<int>(x);
}

HalfInt parse_spin(const json& v)
{
    if (v.is_number()) {
        return HalfInt::from_double(v.get<double>());
    }
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) {
                return HalfInt::from_int(std::stoi(s));
            }
            if (s.substr(slash + 1) == "2") {
                return HalfInt::from_twice(std::stoi(s.substr(0, slash)));
            }
        } catch (const std::logic_error&) {
        }
    }
    throw ConfigError("model.S must be an integer or half-integer (number or \"n/2\")");
}

std::vector<double> number_list(const json& v, const std::string& where)
{
    if (!v.is_array()) {
        throw ConfigError(where + " must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
            throw ConfigError(where + " must contain finite numbers only");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<double> parse_grid(const json& v, const std::string& where)
{
    std::vector<double> grid;
    if (v.is_array()) {
        grid = number_list(v, where);
    } else {
        check_keys(v, where, {"start", "stop", "count"});
        const double start = get_number(v, "start", where);
        const double stop = get_number(v, "stop", where);
        const int count = get_int(v, "count", where);
        if (count < 1) {
            throw ConfigError(where + ".count must be positive");
        }
        for (int i = 0; i < count; ++i) {
            grid.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
        }
        if (count > 1) {
            grid.back() = stop;
        }
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ConfigError(where + " must be strictly ascending");
        }
    }
    return grid;
}

/// jz sampling: either an explicit ascending list or a point count spread
/// over the full range.
std::vector<double> parse_jz(const json& v, const PhysParams& model, const std::string& where)
{
    if (v.is_number()) {
        const double c = v.get<double>();
        if (c != std::round(c) || c < 2) {
            throw ConfigError(where + " must be a point count >= 2 or a list of values");
        }
        return classical::uniform_jz_grid(model, static_cast<int>(c));
    }
    return parse_grid(v, where);
}

lattice::Orientation parse_orientation(const json& v, const std::string& where)
{
    if (v == "clockwise") {
        return lattice::Orientation::clockwise;
    }
    if (v == "counterclockwise") {
        return lattice::Orientation::counterclockwise;
    }
    throw ConfigError(where + " must be \"clockwise\" or \"counterclockwise\"");
}

json params_to_json(const PhysParams& p)
{
    return json{{"A", p.A},         {"delta", p.delta},           {"d", p.d},
                {"gamma_re", p.gamma.real()}, {"gamma_im", p.gamma.imag()}, {"L", p.L},
                {"S", p.S.value()}};
}

PhysParams params_from_json(const json& j)
{
    PhysParams p;
    p.A = j.at("A").get<double>();
    p.delta = j.at("delta").get<double>();
    p.d = j.at("d").get<double>();
    p.gamma = {j.at("gamma_re").get<double>(), j.at("gamma_im").get<double>()};
    p.L = j.at("L").get<int>();
    p.S = HalfInt::from_double(j.at("S").get<double>());
    return p;
}

} // namespace

RunConfig parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"schema_version", "model", "A_grid", "chern", "emmap", "dh", "monodromy", "flow", "output"});
    if (!root.contains("schema_version")) {
        throw ConfigError("config.schema_version is required");
    }
    if (get_int(root, "schema_version", "config") != schema_version) {
        throw ConfigError("unsupported schema_version " + root.at("schema_version").dump() + " (expected " +
                          std::to_string(schema_version) + ")");
    }
    if (!root.contains("model")) {
        throw ConfigError("config.model is required");
    }

    RunConfig cfg;
    try {
        const json& m = root.at("model");
        check_keys(m, "model", {"A", "delta", "d", "gamma_re", "gamma_im", "L", "S"});
        for (const char* key : {"L", "S", "delta", "d"}) {
            if (!m.contains(key)) {
                throw ConfigError(std::string("model.") + key + " is required");
            }
        }
        cfg.model.L = get_int(m, "L", "model");
        cfg.model.S = parse_spin(m.at("S"));
        cfg.model.delta = get_number(m, "delta", "model");
        cfg.model.d = get_number(m, "d", "model");
        cfg.model.gamma = {number_or(m, "gamma_re", "model", 1.0), number_or(m, "gamma_im", "model", 0.0)};
        cfg.has_A = m.contains("A");
        cfg.model.A = number_or(m, "A", "model", 0.0);
        cfg.model.validate();

        if (root.contains("A_grid")) {
            cfg.a_grid = parse_grid(root.at("A_grid"), "A_grid");
        }

        if (root.contains("chern")) {
            const json& c = root.at("chern");
            check_keys(c, "chern", {"mesh", "counterpart"});
            if (c.contains("mesh")) {
                const json& mesh = c.at("mesh");
                check_keys(mesh, "chern.mesh", {"n_theta", "n_phi"});
                if (mesh.contains("n_theta")) {
                    cfg.mesh_n_theta = get_int(mesh, "n_theta", "chern.mesh");
                }
                if (mesh.contains("n_phi")) {
                    cfg.mesh_n_phi = get_int(mesh, "n_phi", "chern.mesh");
                }
                if (cfg.mesh_n_theta < 2 || cfg.mesh_n_phi < 3) {
                    throw ConfigError("chern.mesh needs n_theta >= 2 and n_phi >= 3");
                }
            }
            if (c.contains("counterpart")) {
                if (!c.at("counterpart").is_boolean()) {
                    throw ConfigError("chern.counterpart must be true or false");
                }
                cfg.chern_counterpart = c.at("counterpart").get<bool>();
            }
        }

        if (root.contains("emmap")) {
            const json& e = root.at("emmap");
            check_keys(e, "emmap", {"jz", "scan_points", "sample_check"});
            if (e.contains("jz")) {
                cfg.emmap_jz = parse_jz(e.at("jz"), cfg.model, "emmap.jz");
            }
            if (e.contains("scan_points")) {
                cfg.emmap_scan_points = get_int(e, "scan_points", "emmap");
                if (cfg.emmap_scan_points < 3) {
                    throw ConfigError("emmap.scan_points must be at least 3");
                }
            }
            if (e.contains("sample_check")) {
                cfg.emmap_sample_check = get_int(e, "sample_check", "emmap");
                if (cfg.emmap_sample_check < 0) {
                    throw ConfigError("emmap.sample_check must be non-negative");
                }
            }
        }

        if (root.contains("dh")) {
            const json& d = root.at("dh");
            check_keys(d, "dh", {"jz"});
            if (d.contains("jz")) {
                cfg.dh_jz = parse_jz(d.at("jz"), cfg.model, "dh.jz");
            }
        }

        if (root.contains("monodromy")) {
            const json& mo = root.at("monodromy");
            check_keys(mo, "monodromy", {"loops"});
            if (mo.contains("loops")) {
                if (!mo.at("loops").is_array()) {
                    throw ConfigError("monodromy.loops must be an array");
                }
                int index = 0;
                for (const json& l : mo.at("loops")) {
                    const std::string where = "monodromy.loops[" + std::to_string(index++) + "]";
                    check_keys(l, where, {"name", "waypoints", "around", "half_width", "half_height", "orientation"});
                    LoopSpec spec;
                    spec.name = l.contains("name") && l.at("name").is_string() ? l.at("name").get<std::string>()
                                                                                : "loop" + std::to_string(index - 1);
                    if (l.contains("waypoints") == l.contains("around")) {
                        throw ConfigError(where + " needs exactly one of 'waypoints' or 'around'");
                    }
                    if (l.contains("waypoints")) {
                        if (!l.at("waypoints").is_array() || l.at("waypoints").size() < 3) {
                            throw ConfigError(where + ".waypoints must list at least three [jz, E] pairs");
                        }
                        for (const json& w : l.at("waypoints")) {
                            const auto xy = number_list(w, where + ".waypoints");
                            if (xy.size() != 2) {
                                throw ConfigError(where + ".waypoints entries must be [jz, E] pairs");
                            }
                            spec.waypoints.push_back({xy[0], xy[1]});
                        }
                    } else {
                        if (!l.at("around").is_array() || l.at("around").empty()) {
                            throw ConfigError(where + ".around must be a non-empty list of defect indices");
                        }
                        for (const json& i : l.at("around")) {
                            if (!i.is_number_integer() || i.get<int>() < 0) {
                                throw ConfigError(where + ".around must contain non-negative integers");
                            }
                            spec.around.push_back(i.get<int>());
                        }
                    }
                    spec.half_width = number_or(l, "half_width", where, spec.half_width);
                    spec.half_height = number_or(l, "half_height", where, spec.half_height);
                    if (!(spec.half_width > 0.0) || !(spec.half_height > 0.0)) {
                        throw ConfigError(where + " half_width and half_height must be positive");
                    }
                    if (l.contains("orientation")) {
                        spec.orientation = parse_orientation(l.at("orientation"), where + ".orientation");
                    }
                    cfg.loops.push_back(std::move(spec));
                }
            }
        }

        if (root.contains("flow")) {
            const json& f = root.at("flow");
            check_keys(f, "flow", {"A_points"});
            if (f.contains("A_points")) {
                cfg.flow_points = parse_grid(f.at("A_points"), "flow.A_points");
            }
        }

        if (root.contains("output")) {
            const json& o = root.at("output");
            check_keys(o, "output", {"dir"});
            if (o.contains("dir")) {
                if (!o.at("dir").is_string()) {
                    throw ConfigError("output.dir must be a string");
                }
                cfg.out_dir = o.at("dir").get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_double(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s)
{
    if (s.empty()) {
        throw ConfigError("empty numeric field");
    }
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw ConfigError("malformed number '" + s + "'");
    }
    return x;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

/// Non-empty lines; the first must equal `header` unless header is empty.
std::vector<std::vector<std::string>> read_table(const std::string& text, const std::string& header,
                                                 std::string* header_out = nullptr)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool first = true;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (first) {
            if (!header.empty() && line != header) {
                throw ConfigError("unexpected CSV header '" + line + "', expected '" + header + "'");
            }
            if (header_out) {
                *header_out = line;
            }
            width = split(line).size();
            first = false;
            continue;
        }
        auto fields = split(line);
        if (fields.size() != width) {
            throw ConfigError("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(width));
        }
        rows.push_back(std::move(fields));
    }
    if (first) {
        throw ConfigError("CSV input is empty");
    }
    return rows;
}

bool parse_bool(const std::string& s)
{
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    throw ConfigError("malformed boolean '" + s + "'");
}

int parse_int(const std::string& s)
{
    const double x = parse_double(s);
    if (x != std::round(x)) {
        throw ConfigError("malformed integer '" + s + "'");
    }
    return static_cast<int>(x);
}

const char* bool_text(bool b)
{
    return b ? "true" : "false";
}

} // namespace

std::vector<SpectrumRow> spectrum_rows(const quantum::JointSpectrum& spectrum,
                                       const quantum::BandDecomposition& bands)
{
    std::map<quantum::LevelId, int> band_of;
    for (std::size_t b = 0; b < bands.bands.size(); ++b) {
        for (const auto& l : bands.bands[b]) {
            band_of[l.id()] = static_cast<int>(b);
        }
    }
    std::vector<SpectrumRow> rows;
    for (const auto& l : spectrum.levels) {
        const auto it = band_of.find(l.id());
        rows.push_back(SpectrumRow{spectrum.params.A, l.jz, l.n, l.energy, it == band_of.end() ? -1 : it->second,
                                   quantum::is_edge(spectrum.params, l.jz)});
    }
    return rows;
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows)
{
    std::string out = "A,jz,n,E,band,is_edge\n";
    for (const auto& r : rows) {
        out += format_double(r.A) + "," + format_double(r.jz.value()) + "," + std::to_string(r.n) + "," +
               format_double(r.E) + "," + std::to_string(r.band) + "," + bool_text(r.is_edge) + "\n";
    }
    return out;
}

std::vector<SpectrumRow> parse_spectrum_csv(const std::string& text)
{
    std::vector<SpectrumRow> rows;
    for (const auto& f : read_table(text, "A,jz,n,E,band,is_edge")) {
        rows.push_back(SpectrumRow{parse_double(f[0]), HalfInt::from_double(parse_double(f[1])), parse_int(f[2]),
                                   parse_double(f[3]), parse_int(f[4]), parse_bool(f[5])});
    }
    return rows;
}

std::string chern_csv(const std::vector<ChernRow>& rows)
{
    const int nb = rows.empty() ? 0 : rows.front().band_count;
    std::string out = "A";
    for (int b = 0; b < nb; ++b) {
        out += ",Ch_" + std::to_string(b);
    }
    out += ",min_gap,valid\n";
    for (const auto& r : rows) {
        if (r.band_count != nb) {
            throw Error("Chern rows with different band counts cannot share a table");
        }
        out += format_double(r.A);
        for (int b = 0; b < nb; ++b) {
            out += ",";
            if (r.valid) {
                out += std::to_string(r.chern[static_cast<std::size_t>(b)]);
            }
        }
        out += "," + format_double(r.min_gap) + "," + bool_text(r.valid) + "\n";
    }
    return out;
}

std::vector<ChernRow> parse_chern_csv(const std::string& text)
{
    std::string header;
    const auto table = read_table(text, "", &header);
    const auto cols = split(header);
    if (cols.size() < 3 || cols.front() != "A" || cols[cols.size() - 2] != "min_gap" || cols.back() != "valid") {
        throw ConfigError("unexpected Chern CSV header '" + header + "'");
    }
    const int nb = static_cast<int>(cols.size()) - 3;
    for (int b = 0; b < nb; ++b) {
        if (cols[static_cast<std::size_t>(b) + 1] != "Ch_" + std::to_string(b)) {
            throw ConfigError("unexpected Chern CSV header '" + header + "'");
        }
    }
    std::vector<ChernRow> rows;
    for (const auto& f : table) {
        ChernRow r;
        r.A = parse_double(f[0]);
        r.band_count = nb;
        r.min_gap = parse_double(f[f.size() - 2]);
        r.valid = parse_bool(f.back());
        if (r.valid) {
            for (int b = 0; b < nb; ++b) {
                r.chern.push_back(parse_int(f[static_cast<std::size_t>(b) + 1]));
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string emmap_csv(const classical::EMImage& image)
{
    std::string out = "jz,E_min,E_max\n";
    for (std::size_t i = 0; i < image.jz.size(); ++i) {
        out += format_double(image.jz[i]) + "," + format_double(image.e_min[i]) + "," +
               format_double(image.e_max[i]) + "\n";
    }
    return out;
}

std::string critical_csv(const classical::EMImage& image)
{
    std::string out = "jz,E,Sz,Lz,location\n";
    for (const auto& c : image.critical_values) {
        out += format_double(c.jz) + "," + format_double(c.energy) + "," + format_double(c.sz) + "," +
               format_double(c.lz) + "," + classical::location_name(c.location) + "\n";
    }
    return out;
}

classical::EMImage parse_emmap_csv(const std::string& boundary, const std::string& critical)
{
    classical::EMImage image;
    for (const auto& f : read_table(boundary, "jz,E_min,E_max")) {
        image.jz.push_back(parse_double(f[0]));
        image.e_min.push_back(parse_double(f[1]));
        image.e_max.push_back(parse_double(f[2]));
    }
    for (const auto& f : read_table(critical, "jz,E,Sz,Lz,location")) {
        classical::CriticalValue c;
        c.jz = parse_double(f[0]);
        c.energy = parse_double(f[1]);
        c.sz = parse_double(f[2]);
        c.lz = parse_double(f[3]);
        if (f[4] == "interior") {
            c.location = classical::CriticalLocation::interior;
        } else if (f[4] == "boundary") {
            c.location = classical::CriticalLocation::boundary;
        } else {
            throw ConfigError("unknown critical value location '" + f[4] + "'");
        }
        image.critical_values.push_back(c);
    }
    return image;
}

std::string dh_csv(const classical::ReducedVolumeProfile& profile)
{
    std::string out = "jz,V\n";
    for (std::size_t i = 0; i < profile.jz.size(); ++i) {
        out += format_double(profile.jz[i]) + "," + format_double(profile.volume[i]) + "\n";
    }
    return out;
}

classical::ReducedVolumeProfile parse_dh_csv(const std::string& text)
{
    classical::ReducedVolumeProfile p;
    for (const auto& f : read_table(text, "jz,V")) {
        p.jz.push_back(parse_double(f[0]));
        p.volume.push_back(parse_double(f[1]));
    }
    return p;
}

std::string flow_json(const quantum::SpectralFlowReport& report, const PhysParams& params)
{
    json j;
    j["schema_version"] = schema_version;
    j["params"] = params_to_json(params);
    j["band_order"] = "ascending";
    j["band_count"] = report.band_count;
    j["A_points"] = report.domain_points;
    j["band_counts"] = report.band_counts;
    json steps = json::array();
    for (std::size_t i = 0; i < report.redistributions.size(); ++i) {
        steps.push_back({{"from_A", report.domain_points[i]},
                         {"to_A", report.domain_points[i + 1]},
                         {"f", report.redistributions[i]},
                         {"delta_N", report.local_flow[i]}});
    }
    j["local"] = steps;
    j["global_delta_N"] = report.global_flow;
    return j.dump(2) + "\n";
}

quantum::SpectralFlowReport parse_flow_json(const std::string& text)
{
    try {
        const json j = json::parse(text);
        quantum::SpectralFlowReport r;
        r.band_count = j.at("band_count").get<int>();
        r.domain_points = j.at("A_points").get<std::vector<double>>();
        r.band_counts = j.at("band_counts").get<std::vector<std::vector<int>>>();
        for (const auto& s : j.at("local")) {
            r.redistributions.push_back(s.at("f").get<quantum::Redistribution>());
            r.local_flow.push_back(s.at("delta_N").get<std::vector<int>>());
        }
        r.global_flow = j.at("global_delta_N").get<std::vector<int>>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed flow JSON: ") + e.what());
    }
}

namespace {

json cell_to_json(const lattice::LatticeCell& c)
{
    return json{{"jz", c.origin.jz.value()}, {"n", c.origin.n}, {"v_offset", c.v_offset}};
}

lattice::LatticeCell cell_from_json(const json& j)
{
    lattice::LatticeCell c;
    c.origin.jz = HalfInt::from_double(j.at("jz").get<double>());
    c.origin.n = j.at("n").get<int>();
    c.v_offset = j.at("v_offset").get<int>();
    return c;
}

json waypoints_to_json(const std::vector<lattice::Waypoint>& w)
{
    json a = json::array();
    for (const auto& p : w) {
        a.push_back({p.jz, p.energy});
    }
    return a;
}

std::vector<lattice::Waypoint> waypoints_from_json(const json& a)
{
    std::vector<lattice::Waypoint> w;
    for (const auto& p : a) {
        w.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return w;
}

} // namespace

std::string monodromy_json(const MonodromyOutput& out)
{
    json j;
    j["schema_version"] = schema_version;
    j["params"] = params_to_json(out.params);
    j["basis"] = "u = (0, 1), v = (1, m) in (jz-step, n-step) coordinates; matrix rows are the transported u, v "
                 "in the initial basis";
    j["orientation_convention"] = "(jz, E) plane with jz horizontal and E vertical";
    j["defects"] = waypoints_to_json(out.defects);
    json loops = json::array();
    for (const auto& l : out.loops) {
        json trace = json::array();
        for (const auto& c : l.transport.trace) {
            trace.push_back(cell_to_json(c));
        }
        const auto& m = l.transport.matrix.m;
        loops.push_back({{"name", l.name},
                         {"waypoints", waypoints_to_json(l.waypoints)},
                         {"orientation", lattice::orientation_name(lattice::loop_orientation(l.waypoints))},
                         {"start", cell_to_json(l.transport.start)},
                         {"final", cell_to_json(l.transport.final)},
                         {"horizontal_steps", l.transport.horizontal_steps},
                         {"vertical_steps", l.transport.vertical_steps},
                         {"trace", trace},
                         {"matrix", {{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}},
                         {"det", l.transport.matrix.det()}});
    }
    j["loops"] = loops;
    return j.dump(2) + "\n";
}

MonodromyOutput parse_monodromy_json(const std::string& text)
{
    try {
        const json j = json::parse(text);
        MonodromyOutput out;
        out.params = params_from_json(j.at("params"));
        out.defects = waypoints_from_json(j.at("defects"));
        for (const auto& l : j.at("loops")) {
            LoopResult r;
            r.name = l.at("name").get<std::string>();
            r.waypoints = waypoints_from_json(l.at("waypoints"));
            r.transport.start = cell_from_json(l.at("start"));
            r.transport.final = cell_from_json(l.at("final"));
            r.transport.horizontal_steps = l.at("horizontal_steps").get<int>();
            r.transport.vertical_steps = l.at("vertical_steps").get<int>();
            for (const auto& c : l.at("trace")) {
                r.transport.trace.push_back(cell_from_json(c));
            }
            const auto& m = l.at("matrix");
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    r.transport.matrix.m[a][b] = m.at(a).at(b).get<int>();
                }
            }
            out.loops.push_back(std::move(r));
        }
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed monodromy JSON: ") + e.what());
    }
}

} // namespace bandflow::io
