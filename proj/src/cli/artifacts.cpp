#include "artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "margin/error.hpp"
#include "margin/format.hpp"

namespace margin::cli {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw UsageError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw UsageError("cannot move output into place: " + path.string());
    }
}

std::string table_csv(const std::vector<Column>& columns) {
    std::ostringstream out;
    std::size_t rows = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c].name;
        rows = std::max(rows, columns[c].values.size());
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ',';
            if (r < columns[c].values.size()) out << format_double(columns[c].values[r]);
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::json table_json(const std::vector<Column>& columns) {
    nlohmann::json names = nlohmann::json::array();
    nlohmann::json data = nlohmann::json::object();
    for (const auto& c : columns) {
        names.push_back(c.name);
        nlohmann::json values = nlohmann::json::array();
        for (double v : c.values) {
            if (std::isfinite(v)) {
                values.push_back(v);
            } else {
                values.push_back(nullptr);
            }
        }
        data[c.name] = std::move(values);
    }
    return {{"columns", names}, {"data", data}};
}

ArtifactSet::ArtifactSet(const RunConfig& config) : config_(config) {}

void ArtifactSet::ensure_directory() {
    if (directory_ready_) return;
    std::error_code ec;
    std::filesystem::create_directories(config_.out_dir, ec);
    if (ec) throw UsageError("cannot create output directory " + config_.out_dir.string());
    directory_ready_ = true;
}

std::string ArtifactSet::prefix(const std::string& stem) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d_", ++counter_);
    return buf + stem;
}

void ArtifactSet::emit(const std::string& file, const std::string& role, const std::string& content) {
    ensure_directory();
    write_atomic(config_.out_dir / file, content);
    outputs_.push_back({{"file", file}, {"role", role}});
}

void ArtifactSet::table(const std::string& stem, const std::string& role, const std::vector<Column>& columns) {
    const auto base = prefix(stem);
    if (config_.want_csv()) emit(base + ".csv", role, table_csv(columns));
    if (config_.want_json()) emit(base + ".json", role, table_json(columns).dump(1) + "\n");
}

void ArtifactSet::grid(const std::string& stem, const std::string& role, const LogDensityGrid& grid) {
    const auto base = prefix(stem);
    if (config_.want_csv()) {
        std::ostringstream out;
        write_csv(grid, out);
        emit(base + ".csv", role, out.str());
    }
    if (config_.want_json()) emit(base + ".json", role, to_json(grid).dump(1) + "\n");
}

void ArtifactSet::report(const std::string& stem, const std::string& role, const nlohmann::json& body) {
    emit(prefix(stem) + ".json", role, body.dump(2) + "\n");
}

void ArtifactSet::svg(const std::string& stem, const std::string& role, const std::string& document) {
    if (!config_.svg) return;
    emit(prefix(stem) + ".svg", role, document);
}

nlohmann::json ArtifactSet::write_manifest(const nlohmann::json& parameters, const nlohmann::json& statistics) {
    nlohmann::json m;
    m["demo"] = config_.command == "fit" ? "fit-" + config_.name : config_.name;
    m["version"] = kVersion;
    m["seed"] = config_.seed;
    nlohmann::json params = parameters;
    params["format"] = format_name(config_.format);
    params["svg"] = config_.svg;
    if (config_.command == "fit") {
        params["input"] = config_.input.string();
        params["model"] = config_.model;
    }
    m["parameters"] = params;
    m["outputs"] = outputs_;
    m["statistics"] = statistics;
    ensure_directory();
    write_atomic(config_.out_dir / "manifest.json", m.dump(2) + "\n");
    return m;
}

}  // namespace margin::cli
