#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "apollo/counting.hpp"
#include "apollo/hash.hpp"
#include "apollo/metrics.hpp"
#include "apollo/orbits.hpp"
#include "apollo/residual.hpp"

namespace apollo::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d{
        {"packing", "bounded"},
        {"mode", "auto"},
        {"strip.y_lo", "0"},
        {"strip.y_hi", "2"},
        {"cutoff.kind", "curvature"},
        {"cutoff.value", "1000"},
        {"metric", "euclidean"},
        {"region", "disk:0,0,1"},
        {"t.hi", "1"},
        {"t.lo", "1e-12"},
        {"t.per_decade", "16"},
        {"count.task", "curve"},
        {"curvature.x_lo", "100"},
        {"curvature.x_hi", ""},
        {"band.k", "1"},
        {"band.t", "1e-4"},
        {"band.n_lo", "1"},
        {"band.n_hi", "100"},
        {"fit.input", "count.csv"},
        {"fit.lo", ""},
        {"fit.hi", ""},
        {"dim.levels", "8-12"},
        {"dim.s_lo", "0.5"},
        {"dim.s_hi", "2.5"},
        {"dim.control", "false"},
        {"ca.alpha", "1.30568"},
        {"ca.level", "12"},
        {"orbit.task", "poincare"},
        {"orbit.s", "1.35"},
        {"orbit.L", "12"},
        {"orbit.x", "0,0,1"},
        {"orbit.delta", "1.30568"},
        {"render.viewport", "-1,1,-1,1"},
        {"render.width", "800"},
        {"render.labels", "true"},
        {"out.dir", "."},
    };
    return d;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_number(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::vector<int> parse_levels(const std::string& v) {
    std::vector<int> out;
    auto dash = v.find('-');
    try {
        if (dash != std::string::npos && v.find(',') == std::string::npos) {
            int a = std::stoi(v.substr(0, dash)), b = std::stoi(v.substr(dash + 1));
            for (int l = a; l <= b; ++l) out.push_back(l);
        } else {
            for (const auto& p : split(v, ',')) out.push_back(std::stoi(p));
        }
    } catch (const std::exception&) {
        throw ConfigError("dim.levels must be 'a-b' or a comma list, got '" + v + "'");
    }
    if (out.empty()) throw ConfigError("dim.levels is empty");
    return out;
}

std::string sha_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return to_hex(sha256(ss.str()));
}

PackingStore load_store(const Config& cfg) {
    PackingSpec spec = spec_from_config(cfg);
    GenerationCutoff cutoff = cutoff_from_config(cfg);
    fs::path path = cache_path(spec, cutoff);
    if (!fs::exists(path)) throw ConfigError("missing cache " + path.string() + "; run `gen` with the same config first");
    return load(path.string(), spec.exact() ? ExpectedMode::exact : ExpectedMode::floating, spec.fingerprint());
}

class Output {
public:
    Output(const Config& cfg, std::string command) : cfg_(cfg), command_(std::move(command)), dir_(cfg.str("out.dir")) {
        fs::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& data) {
        write_atomic(dir_ / name, data);
        files_.push_back(name);
    }

    void store(const PackingStore& s) { fingerprint_ = to_hex(s.fingerprint()); }

    std::vector<std::string> finish() {
        std::string config_name = command_ + "_config.txt";
        write_atomic(dir_ / config_name, cfg_.text());
        nlohmann::ordered_json m;
        m["tool"] = "apollo";
        m["version"] = kVersion;
        m["command"] = command_;
        m["config_sha256"] = to_hex(sha256(cfg_.text()));
        m["config_file"] = config_name;
        m["store_fingerprint"] = fingerprint_.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(fingerprint_);
        auto files = nlohmann::ordered_json::array();
        for (const auto& f : files_) files.push_back({{"name", f}, {"sha256", sha_file(dir_ / f)}});
        m["files"] = files;
        std::string manifest = command_ + "_manifest.json";
        write_atomic(dir_ / manifest, m.dump(2) + "\n");
        auto out = files_;
        out.push_back(config_name);
        out.push_back(manifest);
        return out;
    }

private:
    const Config& cfg_;
    std::string command_;
    fs::path dir_;
    std::vector<std::string> files_;
    std::string fingerprint_;
};

std::string fit_row_csv(const FitResult& f) {
    CsvTable t({"exponent", "stderr", "const", "t_lo", "t_hi", "n_points"});
    t.row({fmt(f.exponent), fmt(f.stderr_), fmt(std::exp(f.log_const)), fmt(f.t_lo), fmt(f.t_hi), std::to_string(f.n_points)});
    return t.text();
}

std::vector<double> t_grid(const Config& cfg) {
    return geometric_grid(cfg.num("t.hi"), cfg.num("t.lo"), cfg.integer("t.per_decade"));
}

void cmd_gen(const Config& cfg, int workers, Output& out) {
    PackingSpec spec = spec_from_config(cfg);
    GenerationCutoff cutoff = cutoff_from_config(cfg);
    PackingStore store = generate(spec, cutoff, workers);
    fs::path path = cache_path(spec, cutoff);
    fs::create_directories(path.parent_path());
    save(store, path.string());
    out.store(store);
    CsvTable t({"count", "nodes_expanded", "dedup_hits", "peak_frontier", "pruned"});
    t.row({std::to_string(store.size()), std::to_string(store.stats.nodes_expanded),
           std::to_string(store.stats.dedup_hits), std::to_string(store.stats.peak_frontier),
           std::to_string(store.stats.pruned)});
    out.write("gen_stats.csv", t.text());
    std::cout << "cache " << path.string() << "\n"
              << "circles " << store.size() << "  nodes " << store.stats.nodes_expanded << "  dedup " << store.stats.dedup_hits
              << "  peak frontier " << store.stats.peak_frontier << "  pruned " << store.stats.pruned << "\n";
}

void cmd_count(const Config& cfg, int workers, Output& out) {
    PackingStore store = load_store(cfg);
    out.store(store);
    const std::string& task = cfg.str("count.task");
    if (task == "curve") {
        auto curve = count_curve(store, metric_from_string(cfg.str("metric"), store.dim()), region_from_string(cfg.str("region")),
                                 t_grid(cfg), workers);
        CsvTable t({"t", "count"});
        for (std::size_t i = 0; i < curve.t.size(); ++i) t.row({fmt(curve.t[i]), std::to_string(curve.count[i])});
        out.write("count.csv", t.text());
        std::cout << "valid for t >= " << fmt(curve.t_valid_min) << ", " << curve.infinite_members << " infinite-volume members\n";
    } else if (task == "curvature") {
        double hi = cfg.str("curvature.x_hi").empty() ? store.curvature_bound() : cfg.num("curvature.x_hi");
        auto xs = geometric_grid(hi, cfg.num("curvature.x_lo"), cfg.integer("t.per_decade"));
        std::reverse(xs.begin(), xs.end());
        CsvTable t({"x", "count"});
        if (hi > store.curvature_bound()) throw CutoffError("curvature.x_hi exceeds the store cutoff");
        for (double x : xs) t.row({fmt(x), std::to_string(circle_count_by_curvature(store, x))});
        out.write("curvature_count.csv", t.text());
    } else if (task == "bands") {
        auto table = band_tail_experiment(store, cfg.num("band.k"), cfg.num("band.t"), cfg.integer("band.n_lo"),
                                          cfg.integer("band.n_hi"), workers);
        CsvTable t({"n", "count", "cumulative", "comparison", "infinite"});
        for (const auto& r : table.rows)
            t.row({std::to_string(r.n), std::to_string(r.count), std::to_string(r.cumulative), std::to_string(r.comparison),
                   std::to_string(r.infinite)});
        out.write("bands.csv", t.text());
        auto v = table.injection_violations();
        std::cout << "injection violations: " << v.size() << "\n";
    } else {
        throw ConfigError("count.task must be curve, curvature or bands");
    }
}

void cmd_fit(const Config& cfg, int, Output& out) {
    fs::path input = cfg.str("fit.input");
    if (input.is_relative()) input = fs::path(cfg.str("out.dir")) / input;
    if (!fs::exists(input)) throw ConfigError("fit input " + input.string() + " does not exist");
    auto cols = read_csv(input);
    if (!cols.count("count")) throw ConfigError("fit input needs a 'count' column");
    std::vector<double> xs, ys;
    const bool by_t = cols.count("t") > 0;
    if (!by_t && !cols.count("x")) throw ConfigError("fit input needs a 't' or 'x' column");
    const auto& key = by_t ? cols["t"] : cols["x"];
    double lo, hi;
    if (!cfg.str("fit.lo").empty() || !cfg.str("fit.hi").empty()) {
        lo = cfg.str("fit.lo").empty() ? 0.0 : cfg.num("fit.lo");
        hi = cfg.str("fit.hi").empty() ? INFINITY : cfg.num("fit.hi");
    } else if (by_t) {
        lo = *std::min_element(key.begin(), key.end());
        hi = lo * 100.0;
    } else {
        lo = 0.0;
        hi = INFINITY;
    }
    double used_lo = INFINITY, used_hi = 0.0;
    for (std::size_t i = 0; i < key.size(); ++i) {
        double k = key[i];
        if (k < lo * (1 - 1e-12) || k > hi * (1 + 1e-12)) continue;
        xs.push_back(by_t ? 1.0 / k : k);
        ys.push_back(cols["count"][i]);
        used_lo = std::min(used_lo, k), used_hi = std::max(used_hi, k);
    }
    FitResult f = fit_power_law(xs, ys);
    f.t_lo = used_lo, f.t_hi = used_hi;
    out.write("fit.csv", fit_row_csv(f));
    std::cout << "exponent " << fmt(f.exponent) << " +- " << fmt(f.stderr_) << "\n";
}

void cmd_dim(const Config& cfg, int workers, Output& out) {
    auto levels = parse_levels(cfg.str("dim.levels"));
    std::vector<GapCover> covers;
    if (cfg.flag("dim.control")) {
        for (int l : levels) covers.push_back(cantor_dust_cover(l));
    } else {
        PackingSpec spec = spec_from_config(cfg);
        Region region = region_from_string(cfg.str("region"));
        for (int l : levels) covers.push_back(gap_cover(spec, region, l, workers));
    }
    auto est = estimate_dimension(covers, cfg.num("dim.s_lo"), cfg.num("dim.s_hi"));
    CsvTable lv({"level", "s", "sum"});
    for (std::size_t i = 0; i < covers.size(); ++i)
        lv.row({std::to_string(covers[i].level), fmt(est.s_star), fmt(est.sums_at_star[i])});
    out.write("dim_levels.csv", lv.text());
    CsvTable slope({"s", "growth"});
    for (auto [s, g] : est.slope_curve) slope.row({fmt(s), fmt(g)});
    out.write("dim_slope.csv", slope.text());
    CsvTable sum({"s_star", "slope_stderr", "level_lo", "level_hi"});
    sum.row({fmt(est.s_star), fmt(est.slope_stderr), std::to_string(levels.front()), std::to_string(levels.back())});
    out.write("dim.csv", sum.text());
    std::cout << "s* = " << fmt(est.s_star) << "\n";
}

void cmd_ca(const Config& cfg, int workers, Output& out) {
    PackingStore store = load_store(cfg);
    out.store(store);
    auto metric = metric_from_string(cfg.str("metric"), store.dim());
    auto region = region_from_string(cfg.str("region"));
    double alpha = cfg.num("ca.alpha");
    auto curve = count_curve(store, metric, region, t_grid(cfg), workers);
    double h = estimate_weighted_measure(store.spec, region, metric, alpha, cfg.integer("ca.level"), workers);
    auto est = estimate_ca(curve, h, alpha);
    CsvTable t({"c_a", "plateau", "hausdorff", "alpha", "uncertainty", "plateau_slope", "level"});
    t.row({fmt(est.c_a), fmt(est.plateau), fmt(est.hausdorff), fmt(est.alpha), fmt(est.uncertainty), fmt(est.plateau_slope),
           std::to_string(cfg.integer("ca.level"))});
    out.write("ca.csv", t.text());
    CsvTable s({"t", "value"});
    for (auto [tt, v] : est.series) s.row({fmt(tt), fmt(v)});
    out.write("ca_series.csv", s.text());
    std::cout << "c_A = " << fmt(est.c_a) << " (plateau " << fmt(est.plateau) << ", H = " << fmt(h) << ")\n";
}

void cmd_orbit(const Config& cfg, int workers, Output& out) {
    auto pres = GroupPresentation::from_spec(spec_from_config(cfg));
    const std::string& task = cfg.str("orbit.task");
    const int L = cfg.integer("orbit.L");
    const double s = cfg.num("orbit.s");
    if (task == "poincare") {
        auto p = poincare_partial(pres, s, L, workers);
        CsvTable t({"s", "L", "sum"});
        for (int l = 0; l <= L; ++l) t.row({fmt(s), std::to_string(l), fmt(p.partial(l))});
        out.write("poincare.csv", t.text());
    } else if (task == "patterson") {
        auto x = cfg.numbers("orbit.x");
        if (x.size() != 3) throw ConfigError("orbit.x must be x,y,height");
        auto mu = patterson_truncated(pres, HPoint::from_coords(x[0], x[1], x[2]), s, L, cfg.num("orbit.delta"), workers);
        if (mu.below_critical) std::cerr << "warning: s is not above the delta estimate; mass sits on the frontier\n";
        std::string body = "x,y,height,weight\n";
        for (const auto& a : mu.atoms) body += fmt(a.x) + "," + fmt(a.y) + "," + fmt(a.height) + "," + fmt(a.weight) + "\n";
        out.write("atoms.csv", body);
        std::cout << "atoms " << mu.atoms.size() << "  mass " << fmt(mu.total_mass()) << "\n";
    } else if (task == "norm") {
        auto nc = norm_ball_count(pres, L, cfg.integer("t.per_decade"), workers);
        CsvTable t({"T", "count"});
        for (std::size_t i = 0; i < nc.T.size(); ++i) t.row({fmt(nc.T[i]), std::to_string(nc.count[i])});
        out.write("norm.csv", t.text());
        out.write("norm_fit.csv", fit_row_csv(nc.fit));
        CsvTable b({"max_bridge_defect", "t_saturation"});
        b.row({fmt(nc.max_bridge_defect), fmt(nc.t_saturation)});
        out.write("norm_bridge.csv", b.text());
    } else {
        throw ConfigError("orbit.task must be poincare, patterson or norm");
    }
}

void cmd_render(const Config& cfg, int, Output& out) {
    PackingStore store = load_store(cfg);
    out.store(store);
    auto vp = cfg.numbers("render.viewport");
    if (vp.size() != 4 || !(vp[1] > vp[0]) || !(vp[3] > vp[2])) throw ConfigError("render.viewport must be x0,x1,y0,y1 with x0<x1, y0<y1");
    RenderOptions opts{{vp[0], vp[1], vp[2], vp[3]}, cfg.integer("render.width"), cfg.flag("render.labels")};
    std::size_t drawn = 0;
    std::string svg = render_svg(store, opts, &drawn);
    if (drawn == 0) std::cerr << "warning: no circle meets the viewport\n";
    out.write("packing.svg", svg);
}

// Segment of the line {n.x = h} inside the box, if any.
bool clip_line(const OrientedSphere& l, const Box2& box, double seg[4]) {
    const double nx = l.c[0], ny = l.c[1], h = l.bhat / 2.0;
    std::vector<std::pair<double, double>> pts;
    auto add = [&](double x, double y) {
        if (x < box.x0 - 1e-12 || x > box.x1 + 1e-12 || y < box.y0 - 1e-12 || y > box.y1 + 1e-12) return;
        for (auto& p : pts)
            if (std::abs(p.first - x) < 1e-12 && std::abs(p.second - y) < 1e-12) return;
        pts.emplace_back(x, y);
    };
    if (ny != 0.0) {
        add(box.x0, (h - nx * box.x0) / ny);
        add(box.x1, (h - nx * box.x1) / ny);
    }
    if (nx != 0.0) {
        add((h - ny * box.y0) / nx, box.y0);
        add((h - ny * box.y1) / nx, box.y1);
    }
    if (pts.size() < 2) return false;
    seg[0] = pts[0].first, seg[1] = pts[0].second, seg[2] = pts[1].first, seg[3] = pts[1].second;
    return true;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

Config::Config() : values_(defaults()) {}

void Config::set(const std::string& key, const std::string& value) {
    if (!defaults().count(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

void Config::set(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.find('=') == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected key=value");
        set(line);
    }
}

const std::string& Config::str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double Config::num(const std::string& key) const { return parse_number(key, str(key)); }

int Config::integer(const std::string& key) const {
    double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config key '" + key + "' expects an integer");
    return static_cast<int>(v);
}

bool Config::flag(const std::string& key) const {
    const auto& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' expects true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& p : split(str(key), ',')) out.push_back(parse_number(key, p));
    return out;
}

std::string Config::text() const {
    std::string s;
    for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
    return s;
}

PackingSpec spec_from_config(const Config& cfg) {
    const std::string& kind = cfg.str("packing");
    PackingSpec spec;
    if (kind == "bounded") {
        spec = PackingSpec::bounded();
    } else if (kind == "strip") {
        try {
            spec = PackingSpec::strip(cfg.num("strip.y_lo"), cfg.num("strip.y_hi"));
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    } else if (kind == "sphere3d") {
        spec = PackingSpec::sphere3d();
    } else if (kind == "dual_cluster") {
        spec = PackingSpec::dual_cluster();
    } else {
        throw ConfigError("packing must be bounded, strip, sphere3d or dual_cluster");
    }
    const std::string& mode = cfg.str("mode");
    if (mode == "float" && spec.exact()) {
        spec.float_root = spec.root_float();
        spec.exact_root.clear();
    } else if (mode == "exact" && !spec.exact()) {
        throw ConfigError("packing '" + kind + "' has no exact integral form");
    } else if (mode != "auto" && mode != "exact" && mode != "float") {
        throw ConfigError("mode must be auto, exact or float");
    }
    return spec;
}

GenerationCutoff cutoff_from_config(const Config& cfg) {
    const std::string& kind = cfg.str("cutoff.kind");
    double v = cfg.num("cutoff.value");
    if (kind == "curvature") return GenerationCutoff::curvature(v);
    if (kind == "word_length") return GenerationCutoff::word_length(cfg.integer("cutoff.value"));
    if (kind == "circles") {
        if (v < 0) throw ConfigError("cutoff.value must be non-negative");
        return GenerationCutoff::circles(static_cast<std::size_t>(v));
    }
    throw ConfigError("cutoff.kind must be curvature, word_length or circles");
}

fs::path cache_dir() {
    const char* env = std::getenv("APOLLO_CACHE_DIR");
    return env && *env ? fs::path(env) : fs::path("apollo-cache");
}

fs::path cache_path(const PackingSpec& spec, const GenerationCutoff& cutoff) {
    std::string tag = to_string(cutoff);
    for (char& c : tag)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
    return cache_dir() / (to_hex(spec.fingerprint()).substr(0, 16) + "_" + tag + ".apkg");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& data) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

void CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw DomainError("CSV row width does not match the header");
    rows_.push_back(cells);
}

std::string CsvTable::text() const {
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s + "\n";
    };
    std::string s = join(header_);
    for (const auto& r : rows_) s += join(r);
    return s;
}

std::map<std::string, std::vector<double>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
    auto header = split(line, ',');
    std::map<std::string, std::vector<double>> cols;
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) throw IoError(path.string() + ":" + std::to_string(n) + ": wrong number of fields");
        for (std::size_t i = 0; i < cells.size(); ++i) cols[header[i]].push_back(parse_number(header[i], cells[i]));
    }
    return cols;
}

std::string render_svg(const PackingStore& store, const RenderOptions& opts, std::size_t* drawn) {
    if (store.dim() != 2) throw DomainError("only planar packings can be rendered");
    const Box2& vp = opts.viewport;
    const double scale = opts.width / (vp.x1 - vp.x0);
    const int height = static_cast<int>(std::lround(scale * (vp.y1 - vp.y0)));
    auto X = [&](double x) { return px((x - vp.x0) * scale); };
    auto Y = [&](double y) { return px((vp.y1 - y) * scale); };
    const Region box = Region::rectangle(vp.x0, vp.x1, vp.y0, vp.y1);
    const bool labels = opts.labels && store.exact();

    std::string body;
    std::size_t n = 0;
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& s = store.records[i];
        if (is_flat(s)) {
            double seg[4];
            if (!clip_line(s, vp, seg)) continue;
            body += "<line x1=\"" + X(seg[0]) + "\" y1=\"" + Y(seg[1]) + "\" x2=\"" + X(seg[2]) + "\" y2=\"" + Y(seg[3]) + "\"/>\n";
            ++n;
            continue;
        }
        if (!intersects(s, box)) continue;
        double r = 1.0 / std::abs(s.b), cx = s.c[0] / s.b, cy = s.c[1] / s.b;
        body += "<circle cx=\"" + X(cx) + "\" cy=\"" + Y(cy) + "\" r=\"" + px(r * scale) + "\"/>\n";
        ++n;
        if (labels && s.b > 0 && r * scale >= 6.0) {
            body += "<text x=\"" + X(cx) + "\" y=\"" + Y(cy) + "\" font-size=\"" + px(std::min(r * scale, 24.0)) + "\">" +
                    std::to_string(static_cast<long long>(store.exact_records[i].b)) + "</text>\n";
        }
    }
    if (drawn) *drawn = n;
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opts.width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(opts.width) + " " + std::to_string(height) + "\">\n";
    svg += "<g fill=\"none\" stroke=\"black\" stroke-width=\"0.5\">\n" + body + "</g>\n";
    svg += "</svg>\n";
    return svg;
}

std::vector<std::string> run_command(const std::string& command, const Config& cfg, int workers) {
    Output out(cfg, command);
    if (command == "gen") {
        cmd_gen(cfg, workers, out);
    } else if (command == "count") {
        cmd_count(cfg, workers, out);
    } else if (command == "fit") {
        cmd_fit(cfg, workers, out);
    } else if (command == "dim") {
        cmd_dim(cfg, workers, out);
    } else if (command == "ca") {
        cmd_ca(cfg, workers, out);
    } else if (command == "orbit") {
        cmd_orbit(cfg, workers, out);
    } else if (command == "render") {
        cmd_render(cfg, workers, out);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return out.finish();
}

int exit_code_for(const std::exception& e) {
    if (auto err = dynamic_cast<const Error*>(&e)) return static_cast<int>(err->error_class());
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return 3;
    if (dynamic_cast<const CLI::Error*>(&e)) return 1;
    return 2;
}

}  // namespace apollo::cli
