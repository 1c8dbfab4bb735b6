#pragma once

#include "predmdp/bayes.hpp"
#include "predmdp/bola.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace predmdp {

using json = nlohmann::json;

// JSON object forms used by the CLI and the model bundle.
json to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const json& j);

json to_json(const PredictionBatch& batch);
PredictionBatch batch_from_json(const json& j);

json to_json(const ScenarioSet& set);
ScenarioSet scenarios_from_json(const json& j);

json to_json(const BayesValueVector& value);
BayesValueVector bayes_value_from_json(const json& j);

/// Learned-model bundle for the offline/online hand-off.
json bundle_to_json(const EstimatedModel& model, const BayesValueVector& value,
                    double discount, std::uint64_t seed);
struct ModelBundle {
    EstimatedModel model;
    BayesValueVector value;
    double discount = 0.0;
    std::uint64_t seed = 0;
};
ModelBundle bundle_from_json(const json& j);

/// Plain-text tabular MDP format: a header line "|S| |A| gamma", then one
/// line per (s,a) pair in s-major order holding the reward followed by the
/// |S| next-state probabilities.
std::string mdp_to_text(const TabularMdp& mdp);
TabularMdp mdp_from_text(const std::string& text);

void save_mdp_text(const std::string& path, const TabularMdp& mdp);
TabularMdp load_mdp_text(const std::string& path);
void save_mdp_json(const std::string& path, const TabularMdp& mdp);
TabularMdp load_mdp(const std::string& path);  // dispatches on extension

/// Deterministic float formatting shared by every CSV writer.
std::string format_double(double x);

/// Simple CSV emitter with deterministic formatting.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void add_row(const std::vector<double>& values);
    void add_row(const std::vector<std::string>& values);
    std::string str() const;
    void save(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

/// FNV-1a 64-bit checksum of a file, as 16 hex digits.
std::string file_checksum(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Atomically written run manifest: resolved config, seed, wall time, and
/// the emitted files with checksums.
struct RunManifest {
    std::string command;
    json resolved_config;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> files;  // relative to the output directory
};

void write_manifest(const std::string& out_dir, const RunManifest& manifest);

}  // namespace predmdp
