#include "predmdp/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace predmdp {

namespace {

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const json& j) {
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return Mat();
    const Index cols = static_cast<Index>(j.at(0).size());
    Mat m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

json vector_to_json(const Vec& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vec vector_from_json(const json& j) {
    Vec v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

}  // namespace

json to_json(const TabularMdp& mdp) {
    json j;
    j["num_states"] = mdp.num_states;
    j["num_actions"] = mdp.num_actions;
    j["discount"] = mdp.discount;
    j["reward"] = matrix_to_json(mdp.reward);
    j["transition"] = matrix_to_json(mdp.transition);
    if (mdp.feasible.size() != 0) {
        json mask = json::array();
        for (Index s = 0; s < mdp.num_states; ++s) {
            json row = json::array();
            for (Index a = 0; a < mdp.num_actions; ++a) row.push_back(mdp.feasible(s, a));
            mask.push_back(std::move(row));
        }
        j["feasible"] = std::move(mask);
    }
    return j;
}

TabularMdp mdp_from_json(const json& j) {
    TabularMdp mdp = make_mdp(j.at("num_states").get<Index>(), j.at("num_actions").get<Index>(),
                              j.at("discount").get<double>());
    mdp.reward = matrix_from_json(j.at("reward"));
    mdp.transition = matrix_from_json(j.at("transition"));
    if (j.contains("feasible")) {
        mdp.feasible = BoolGrid(mdp.num_states, mdp.num_actions);
        for (Index s = 0; s < mdp.num_states; ++s)
            for (Index a = 0; a < mdp.num_actions; ++a)
                mdp.feasible(s, a) = j.at("feasible").at(s).at(a).get<bool>();
    }
    require_valid(mdp);
    return mdp;
}

json to_json(const PredictionBatch& batch) {
    json j;
    j["horizon"] = batch.horizon();
    j["num_states"] = batch.num_states;
    j["accurate"] = batch.accurate;
    j["predictable_actions"] = batch.predictable_actions();
    json steps = json::array();
    for (const auto& step : batch.steps) steps.push_back(matrix_to_json(step.rows));
    j["steps"] = std::move(steps);
    return j;
}

PredictionBatch batch_from_json(const json& j) {
    PredictionBatch batch;
    batch.num_states = j.at("num_states").get<Index>();
    batch.accurate = j.at("accurate").get<bool>();
    std::vector<Index> actions = j.at("predictable_actions").get<std::vector<Index>>();
    for (const auto& step_json : j.at("steps")) {
        OneStepPrediction step;
        step.predictable_actions = actions;
        step.rows = matrix_from_json(step_json);
        batch.steps.push_back(std::move(step));
    }
    return batch;
}

json to_json(const ScenarioSet& set) {
    json j;
    j["weights"] = vector_to_json(set.weights);
    json scenarios = json::array();
    for (const auto& s : set.scenarios) scenarios.push_back(to_json(s));
    j["scenarios"] = std::move(scenarios);
    return j;
}

ScenarioSet scenarios_from_json(const json& j) {
    ScenarioSet set;
    set.weights = vector_from_json(j.at("weights"));
    for (const auto& s : j.at("scenarios")) set.scenarios.push_back(batch_from_json(s));
    require_valid(set);
    return set;
}

json to_json(const BayesValueVector& value) {
    json j;
    j["values"] = vector_to_json(value.values);
    j["metadata"] = {{"horizon", value.meta.horizon},
                     {"num_predictable", value.meta.num_predictable},
                     {"noise", value.meta.noise},
                     {"residual", value.meta.residual},
                     {"converged", value.meta.converged},
                     {"iterations", value.meta.iterations}};
    return j;
}

BayesValueVector bayes_value_from_json(const json& j) {
    BayesValueVector value;
    value.values = vector_from_json(j.at("values"));
    const auto& m = j.at("metadata");
    value.meta.horizon = m.at("horizon").get<int>();
    value.meta.num_predictable = m.at("num_predictable").get<Index>();
    value.meta.noise = m.at("noise").get<std::string>();
    value.meta.residual = m.at("residual").get<double>();
    value.meta.converged = m.at("converged").get<bool>();
    value.meta.iterations = m.at("iterations").get<int>();
    return value;
}

json bundle_to_json(const EstimatedModel& model, const BayesValueVector& value,
                    double discount, std::uint64_t seed) {
    json j;
    j["num_states"] = model.num_states;
    j["num_actions"] = model.num_actions;
    j["discount"] = discount;
    j["seed"] = seed;
    j["transition_hat"] = matrix_to_json(model.transition_hat);
    j["reward_hat"] = matrix_to_json(model.reward_hat);
    j["scenario_set"] = to_json(model.scenario_set);
    j["spec"] = {{"horizon", model.spec.horizon},
                 {"predictable_actions", model.spec.predictable_actions},
                 {"noise_level", model.spec.noise_level}};
    j["value"] = to_json(value);
    return j;
}

ModelBundle bundle_from_json(const json& j) {
    ModelBundle bundle;
    bundle.model.num_states = j.at("num_states").get<Index>();
    bundle.model.num_actions = j.at("num_actions").get<Index>();
    bundle.discount = j.at("discount").get<double>();
    bundle.seed = j.at("seed").get<std::uint64_t>();
    bundle.model.transition_hat = matrix_from_json(j.at("transition_hat"));
    bundle.model.reward_hat = matrix_from_json(j.at("reward_hat"));
    bundle.model.scenario_set = scenarios_from_json(j.at("scenario_set"));
    bundle.model.spec.horizon = j.at("spec").at("horizon").get<int>();
    bundle.model.spec.predictable_actions =
        j.at("spec").at("predictable_actions").get<std::vector<Index>>();
    bundle.model.spec.noise_level = j.at("spec").at("noise_level").get<double>();
    bundle.value = bayes_value_from_json(j.at("value"));
    return bundle;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string mdp_to_text(const TabularMdp& mdp) {
    std::ostringstream out;
    out << mdp.num_states << " " << mdp.num_actions << " " << format_double(mdp.discount)
        << "\n";
    for (Index s = 0; s < mdp.num_states; ++s) {
        for (Index a = 0; a < mdp.num_actions; ++a) {
            out << format_double(mdp.reward(s, a));
            for (Index s2 = 0; s2 < mdp.num_states; ++s2)
                out << " " << format_double(mdp.transition(mdp.row(s, a), s2));
            out << "\n";
        }
    }
    return out.str();
}

TabularMdp mdp_from_text(const std::string& text) {
    std::istringstream in(text);
    Index S, A;
    double gamma;
    if (!(in >> S >> A >> gamma)) throw std::runtime_error("bad MDP text header");
    TabularMdp mdp = make_mdp(S, A, gamma);
    for (Index s = 0; s < S; ++s) {
        for (Index a = 0; a < A; ++a) {
            if (!(in >> mdp.reward(s, a)))
                throw std::runtime_error("truncated MDP text at reward (" + std::to_string(s) +
                                         "," + std::to_string(a) + ")");
            for (Index s2 = 0; s2 < S; ++s2)
                if (!(in >> mdp.transition(mdp.row(s, a), s2)))
                    throw std::runtime_error("truncated MDP text at transition row (" +
                                             std::to_string(s) + "," + std::to_string(a) + ")");
        }
    }
    require_valid(mdp);
    return mdp;
}

void save_mdp_text(const std::string& path, const TabularMdp& mdp) {
    write_file(path, mdp_to_text(mdp));
}

TabularMdp load_mdp_text(const std::string& path) { return mdp_from_text(read_file(path)); }

void save_mdp_json(const std::string& path, const TabularMdp& mdp) {
    write_file(path, to_json(mdp).dump(2) + "\n");
}

TabularMdp load_mdp(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return mdp_from_json(json::parse(read_file(path)));
    return load_mdp_text(path);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ",";
        row += format_double(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_row(const std::vector<std::string>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ",";
        row += values[i];
    }
    rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ",";
        out += columns_[i];
    }
    out += "\n";
    for (const auto& row : rows_) {
        out += row;
        out += "\n";
    }
    return out;
}

void CsvWriter::save(const std::string& path) const { write_file(path, str()); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string file_checksum(const std::string& path) {
    const std::string content = read_file(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
    json j;
    j["command"] = manifest.command;
    j["resolved_config"] = manifest.resolved_config;
    j["master_seed"] = manifest.master_seed;
    j["wall_seconds"] = manifest.wall_seconds;
    json files = json::array();
    for (const auto& f : manifest.files) {
        files.push_back({{"name", f},
                         {"checksum", file_checksum((std::filesystem::path(out_dir) / f).string())}});
    }
    j["files"] = std::move(files);

    const auto final_path = std::filesystem::path(out_dir) / "manifest.json";
    const auto tmp_path = std::filesystem::path(out_dir) / "manifest.json.tmp";
    write_file(tmp_path.string(), j.dump(2) + "\n");
    std::filesystem::rename(tmp_path, final_path);
}

}  // namespace predmdp
