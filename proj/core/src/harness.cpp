#include "rotorlab/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rotorlab/io.hpp"
#include "rotorlab/parallel.hpp"

namespace rotorlab::harness {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double_strict(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse '" + s + "' as a number for " + what);
    }
}

long parse_int_strict(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse '" + s + "' as an integer for " + what);
    }
}

} // namespace

Period parse_period(const std::string& text) {
    const std::string s = trim(text);
    const std::size_t pipos = s.find("pi");
    if (pipos == std::string::npos) {
        return Period::plain(parse_double_strict(s, "period"));
    }
    // [coeff] pi [/ den] [+|- delta]
    long long coeff = 1;
    const std::string head = trim(s.substr(0, pipos));
    if (!head.empty()) coeff = parse_int_strict(head, "period coefficient");
    std::string rest = trim(s.substr(pipos + 2));
    long long den2 = 2; // T = coeff*pi/den = 2*pi*coeff/(2*den)
    double delta = 0.0;
    if (!rest.empty() && rest[0] == '/') {
        std::size_t cut = rest.find_first_of("+-");
        const std::string den_str = trim(rest.substr(1, cut == std::string::npos
                                                            ? std::string::npos
                                                            : cut - 1));
        den2 = 2 * parse_int_strict(den_str, "period denominator");
        rest = cut == std::string::npos ? "" : rest.substr(cut);
    }
    if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
        delta = parse_double_strict(rest, "period detuning");
        rest.clear();
    } else if (!rest.empty()) {
        throw ConfigError("cannot parse period '" + text + "'");
    }
    const long long g = std::gcd(std::abs(coeff), den2);
    return Period::rational_2pi(coeff / g, den2 / g, delta);
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (cfg.experiment.empty())
        throw ConfigError(path.string() + ": missing 'experiment' key");
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("empty config key");
    if (key == "experiment")
        experiment = value;
    else if (key == "seed")
        seed = static_cast<std::uint64_t>(parse_int_strict(value, "seed"));
    else if (key == "out")
        out_dir = value;
    else
        values[key] = value;
}

ResolvedConfig::ResolvedConfig(const RunConfig& raw, const std::vector<ParamDef>& schema)
    : schema_(&schema), seed_(raw.seed) {
    for (const auto& [key, value] : raw.values) {
        const bool known = std::any_of(schema.begin(), schema.end(),
                                       [&](const ParamDef& d) { return d.key == key; });
        if (!known)
            throw ConfigError("unknown key '" + key + "' for experiment '" + raw.experiment + "'");
        resolved_[key] = value;
    }
    for (const auto& d : schema)
        if (!resolved_.count(d.key)) resolved_[d.key] = d.default_value;
    // type validation up front, before any computation
    for (const auto& d : schema) {
        const std::string& v = resolved_.at(d.key);
        switch (d.type) {
        case ParamType::Double: parse_double_strict(v, d.key); break;
        case ParamType::Int: parse_int_strict(v, d.key); break;
        case ParamType::Bool:
            if (v != "true" && v != "false")
                throw ConfigError("key '" + d.key + "' expects true/false, got '" + v + "'");
            break;
        case ParamType::PeriodT: parse_period(v); break;
        case ParamType::String: break;
        }
    }
}

const ParamDef& ResolvedConfig::def(const std::string& key) const {
    for (const auto& d : *schema_)
        if (d.key == key) return d;
    throw ConfigError("experiment schema has no key '" + key + "'");
}

double ResolvedConfig::get_double(const std::string& key) const {
    return parse_double_strict(resolved_.at(def(key).key), key);
}
long ResolvedConfig::get_int(const std::string& key) const {
    return parse_int_strict(resolved_.at(def(key).key), key);
}
bool ResolvedConfig::get_bool(const std::string& key) const {
    return resolved_.at(def(key).key) == "true";
}
std::string ResolvedConfig::get_string(const std::string& key) const {
    return resolved_.at(def(key).key);
}
Period ResolvedConfig::get_period(const std::string& key) const {
    return parse_period(resolved_.at(def(key).key));
}

RunContext::RunContext(std::filesystem::path out_dir) : out_dir_(std::move(out_dir)) {
    std::filesystem::create_directories(out_dir_);
}

void RunContext::write_series(const std::string& name, const std::string& role,
                              const TimeSeries& s) {
    const std::string content = render_series(s);
    atomic_write_file(out_dir_ / name, content);
    files_.push_back({name, role, content.size(), fnv1a64_hex(content)});
}

void RunContext::write_table(const std::string& name, const std::string& role,
                             const std::vector<std::string>& col_names,
                             const std::vector<const std::vector<double>*>& cols) {
    const std::string content = render_table(col_names, cols);
    atomic_write_file(out_dir_ / name, content);
    files_.push_back({name, role, content.size(), fnv1a64_hex(content)});
}

void RunContext::diag(const std::string& key, double value) { diagnostics_[key] = value; }
void RunContext::diag_text(const std::string& key, const std::string& value) {
    text_diag_[key] = value;
}
void RunContext::warn(const std::string& message) { warnings_.push_back(message); }

const ExperimentDef* find_experiment(const std::string& name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return &e;
    return nullptr;
}

std::filesystem::path run_experiment(const RunConfig& config) {
    const ExperimentDef* def = find_experiment(config.experiment);
    if (!def) throw ConfigError("unknown experiment id '" + config.experiment + "'");
    ResolvedConfig resolved(config, def->params);

    std::filesystem::path out =
        config.out_dir.empty() ? std::filesystem::path("rotorlab-out") / config.experiment
                               : config.out_dir;
    RunContext ctx(out);

    const auto t0 = std::chrono::steady_clock::now();
    def->run(resolved, ctx);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["experiment"] = config.experiment;
    manifest["version"] = artifact_version;
    manifest["seed"] = config.seed;
    json cfg_echo;
    for (const auto& [k, v] : resolved.all()) cfg_echo[k] = v;
    manifest["config"] = cfg_echo;
    manifest["wall_time_s"] = wall;
    json diag;
    for (const auto& [k, v] : ctx.diagnostics()) diag[k] = v;
    for (const auto& [k, v] : ctx.text_diagnostics()) diag[k] = v;
    manifest["diagnostics"] = diag;
    manifest["warnings"] = ctx.warnings();
    json files = json::array();
    for (const auto& f : ctx.files())
        files.push_back({{"name", f.name}, {"role", f.role}, {"bytes", f.bytes}, {"hash", f.hash}});
    manifest["files"] = files;

    const std::filesystem::path manifest_path = ctx.out_dir() / "manifest.json";
    atomic_write_file(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<std::string>& values) {
    if (values.empty()) throw UsageError("sweep: empty values list");
    const ExperimentDef* def = find_experiment(base.experiment);
    if (!def) throw ConfigError("unknown experiment id '" + base.experiment + "'");
    const bool axis_known =
        axis == "seed" || std::any_of(def->params.begin(), def->params.end(),
                                      [&](const ParamDef& d) { return d.key == axis; });
    if (!axis_known)
        throw UsageError("sweep: axis '" + axis + "' is not a parameter of '" + base.experiment +
                         "'");

    std::filesystem::path root =
        base.out_dir.empty() ? std::filesystem::path("rotorlab-out") / (base.experiment + "-sweep")
                             : base.out_dir;
    std::filesystem::create_directories(root);

    SweepOutcome out;
    out.n_total = static_cast<int>(values.size());
    std::vector<std::string> status(values.size());
    std::vector<std::map<std::string, double>> diags(values.size());
    std::vector<std::filesystem::path> manifests(values.size());

    parallel_for_each(values.size(), [&](std::size_t i) {
        RunConfig child = base;
        child.set(axis, values[i]);
        child.out_dir = root / (axis + "=" + values[i]);
        try {
            manifests[i] = run_experiment(child);
            // read diagnostics back for the aggregate table
            json m = json::parse(read_file(manifests[i]));
            for (auto& [k, v] : m["diagnostics"].items())
                if (v.is_number()) diags[i][k] = v.get<double>();
            status[i] = "ok";
        } catch (const std::exception& e) {
            status[i] = std::string("failed: ") + e.what();
        }
    });

    // Aggregate table keyed by axis value.
    std::vector<std::string> diag_keys;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (status[i] == "ok") {
            for (const auto& [k, v] : diags[i]) diag_keys.push_back(k);
            break;
        }
    std::string table = axis + "\tstatus";
    for (const auto& k : diag_keys) table += "\t" + k;
    table += "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        table += values[i] + "\t" + (status[i] == "ok" ? "ok" : "failed");
        for (const auto& k : diag_keys) {
            table += "\t";
            table += diags[i].count(k) ? format_double(diags[i][k]) : "nan";
        }
        table += "\n";
        if (status[i] != "ok") out.n_failed++;
        out.manifests.push_back(manifests[i]);
    }
    out.table = root / "aggregate.tsv";
    atomic_write_file(out.table, table);
    return out;
}

namespace {

struct FigureDef {
    std::string id;
    std::string role_needed;
    std::string title;
    std::string x_label, y_label, x_scale, y_scale;
};

const std::vector<FigureDef>& figure_registry() {
    static const std::vector<FigureDef> figs = {
        {"localization", "distribution", "momentum distribution", "m", "P(m)", "linear", "log"},
        {"energy-growth", "series", "energy growth", "t", "E(t)", "linear", "linear"},
        {"dk-exponential", "dk-series", "exponential spreading", "t", "<J^2>", "linear", "log"},
        {"pump", "pump-series", "Thouless pump", "t", "<I>", "linear", "linear"},
        {"nh-spectrum", "spectrum", "quasienergy spectrum", "Re eps", "ln|lambda|", "linear",
         "linear"},
        {"entanglement", "entanglement-series", "entanglement growth", "t", "S(t)", "log", "log"},
        {"chern", "chern-table", "Chern numbers", "k", "C_n", "linear", "linear"},
        {"ionization", "threshold", "ionization threshold", "omega0", "eps0", "linear", "linear"},
        {"poincare", "section", "Poincare section", "theta", "J", "linear", "linear"},
    };
    return figs;
}

} // namespace

std::filesystem::path emit_plotdata(const std::filesystem::path& manifest_path,
                                    const std::string& figure_id) {
    const FigureDef* fig = nullptr;
    for (const auto& f : figure_registry())
        if (f.id == figure_id) fig = &f;
    if (!fig) throw UsageError("emit_plotdata: unknown figure id '" + figure_id + "'");

    json manifest = json::parse(read_file(manifest_path));
    const std::filesystem::path dir = manifest_path.parent_path();

    std::vector<std::string> matches;
    for (const auto& f : manifest["files"])
        if (f["role"].get<std::string>() == fig->role_needed)
            matches.push_back(f["name"].get<std::string>());
    if (matches.empty())
        throw DataError("emit_plotdata: manifest has no file with role '" + fig->role_needed +
                        "' (required by figure '" + figure_id + "')");

    const std::filesystem::path out = dir / ("plot-" + figure_id);
    std::filesystem::create_directories(out);
    json desc;
    desc["figure"] = figure_id;
    desc["title"] = fig->title;
    desc["x"] = {{"label", fig->x_label}, {"scale", fig->x_scale}};
    desc["y"] = {{"label", fig->y_label}, {"scale", fig->y_scale}};
    json data_files = json::array();
    for (const auto& name : matches) {
        std::filesystem::copy_file(dir / name, out / name,
                                   std::filesystem::copy_options::overwrite_existing);
        data_files.push_back(name);
    }
    desc["data"] = data_files;
    atomic_write_file(out / "plot.json", desc.dump(2) + "\n");
    return out;
}

} // namespace rotorlab::harness
