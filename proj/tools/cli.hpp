#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "apollo/packing.hpp"

namespace apollo::cli {

/// Flat key=value experiment configuration. Every key has a default; unknown keys are rejected.
class Config {
public:
    Config();

    void load_file(const std::filesystem::path& path);
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    const std::string& str(const std::string& key) const;
    double num(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;

    /// Sorted key=value lines; the run's resolved configuration.
    std::string text() const;

private:
    std::map<std::string, std::string> values_;
};

PackingSpec spec_from_config(const Config& cfg);
GenerationCutoff cutoff_from_config(const Config& cfg);

/// Cache directory from APOLLO_CACHE_DIR, defaulting to ./apollo-cache.
std::filesystem::path cache_dir();
std::filesystem::path cache_path(const PackingSpec& spec, const GenerationCutoff& cutoff);

/// %.17g
std::string fmt(double v);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& data);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<std::string>& cells);
    std::string text() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Reads a CSV with a header line into columns by name.
std::map<std::string, std::vector<double>> read_csv(const std::filesystem::path& path);

struct RenderOptions {
    Box2 viewport{-1, 1, -1, 1};
    int width = 800;
    bool labels = true;
};

/// SVG of the store's circles meeting the viewport; curvature labels in exact mode only.
std::string render_svg(const PackingStore& store, const RenderOptions& opts, std::size_t* drawn = nullptr);

/// Executes one subcommand; returns the list of files written (relative to out.dir).
std::vector<std::string> run_command(const std::string& command, const Config& cfg, int workers);

/// Maps an exception to the exit-code contract (1 config, 2 math, 3 io).
int exit_code_for(const std::exception& e);

}  // namespace apollo::cli
