#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab::harness {

inline constexpr const char* artifact_version = "0.1.0";

// Periods in configs: "0.25", "4pi", "2pi/3", "pi/3", "2pi+0.05".
Period parse_period(const std::string& text);

enum class ParamType { Double, Int, Bool, String, PeriodT };

struct ParamDef {
    std::string key;
    ParamType type;
    std::string default_value;
    std::string help;
};

// Flat key-value run description. Unknown keys are rejected against the
// experiment schema before any computation.
struct RunConfig {
    std::string experiment;
    std::map<std::string, std::string> values;
    std::uint64_t seed = 12345;
    std::filesystem::path out_dir;

    static RunConfig from_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);
};

class ResolvedConfig {
public:
    ResolvedConfig(const RunConfig& raw, const std::vector<ParamDef>& schema);

    double get_double(const std::string& key) const;
    long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    Period get_period(const std::string& key) const;
    std::uint64_t seed() const { return seed_; }
    const std::map<std::string, std::string>& all() const { return resolved_; }

private:
    const ParamDef& def(const std::string& key) const;
    std::map<std::string, std::string> resolved_;
    const std::vector<ParamDef>* schema_;
    std::uint64_t seed_;
};

struct FileRecord {
    std::string name;
    std::string role;
    std::size_t bytes = 0;
    std::string hash; // fnv1a64 hex of the content
};

// Collects emitted files, diagnostics and warnings for the manifest.
class RunContext {
public:
    explicit RunContext(std::filesystem::path out_dir);

    void write_series(const std::string& name, const std::string& role, const TimeSeries& s);
    void write_table(const std::string& name, const std::string& role,
                     const std::vector<std::string>& col_names,
                     const std::vector<const std::vector<double>*>& cols);
    void diag(const std::string& key, double value);
    void diag_text(const std::string& key, const std::string& value);
    void warn(const std::string& message);

    const std::filesystem::path& out_dir() const { return out_dir_; }
    const std::vector<FileRecord>& files() const { return files_; }
    const std::map<std::string, double>& diagnostics() const { return diagnostics_; }
    const std::map<std::string, std::string>& text_diagnostics() const { return text_diag_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::filesystem::path out_dir_;
    std::vector<FileRecord> files_;
    std::map<std::string, double> diagnostics_;
    std::map<std::string, std::string> text_diag_;
    std::vector<std::string> warnings_;
};

using ExperimentFn = std::function<void(const ResolvedConfig&, RunContext&)>;

struct ExperimentDef {
    std::string name;
    std::string summary;
    std::vector<ParamDef> params;
    ExperimentFn run;
};

const std::vector<ExperimentDef>& experiment_registry();
const ExperimentDef* find_experiment(const std::string& name);

// Runs the named experiment, emits data files plus manifest.json (written
// atomically); returns the manifest path.
std::filesystem::path run_experiment(const RunConfig& config);

struct SweepOutcome {
    int n_total = 0;
    int n_failed = 0;
    std::filesystem::path table;
    std::vector<std::filesystem::path> manifests;
};

SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<std::string>& values);

// Plot-ready data bundle next to the manifest: columnar files plus a small
// declarative plot description; no rendering dependency.
std::filesystem::path emit_plotdata(const std::filesystem::path& manifest_path,
                                    const std::string& figure_id);

} // namespace rotorlab::harness
