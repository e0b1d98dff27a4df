#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "margin/grid.hpp"

namespace margin::cli {

struct Column {
    std::string name;
    std::vector<double> values;
};

/// Writes content to path via a sibling temp file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string table_csv(const std::vector<Column>& columns);
nlohmann::json table_json(const std::vector<Column>& columns);

/// Numbered output files for one run, all listed in the manifest.
class ArtifactSet {
public:
    explicit ArtifactSet(const RunConfig& config);

    void table(const std::string& stem, const std::string& role, const std::vector<Column>& columns);
    void grid(const std::string& stem, const std::string& role, const LogDensityGrid& grid);
    /// Always JSON regardless of --format.
    void report(const std::string& stem, const std::string& role, const nlohmann::json& body);
    /// Skipped unless --svg was given.
    void svg(const std::string& stem, const std::string& role, const std::string& document);

    nlohmann::json write_manifest(const nlohmann::json& parameters, const nlohmann::json& statistics);
    const nlohmann::json& outputs() const { return outputs_; }

private:
    std::string prefix(const std::string& stem);
    void ensure_directory();
    void emit(const std::string& file, const std::string& role, const std::string& content);

    const RunConfig& config_;
    int counter_ = 0;
    bool directory_ready_ = false;
    nlohmann::json outputs_ = nlohmann::json::array();
};

}  // namespace margin::cli
