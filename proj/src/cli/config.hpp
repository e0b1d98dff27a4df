#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

namespace margin::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240101;
inline constexpr const char* kVersion = "1.0.0";

enum class OutputFormat { csv, json, both };

struct RunConfig {
    std::string command;  // "demo" or "fit"
    std::string name;     // demo name or fit subcommand
    std::uint64_t seed = kDefaultSeed;
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::csv;
    bool svg = false;
    std::optional<std::size_t> grid_1d;
    std::optional<std::size_t> grid_2d;
    std::map<std::string, std::string> overrides;
    std::filesystem::path input;  // fit only
    std::string model;            // fit only

    bool want_csv() const { return format != OutputFormat::json; }
    bool want_json() const { return format != OutputFormat::csv; }
};

std::string format_name(OutputFormat f);
OutputFormat parse_format(const std::string& text);

/// Splits "key=value"; throws UsageError on a missing '=' or empty key.
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Typed view of the --set overrides. Each lookup records the resolved value;
/// finish() rejects keys nobody asked for.
class Params {
public:
    explicit Params(const RunConfig& config);

    double real(const std::string& key, double fallback);
    long long integer(const std::string& key, long long fallback);
    std::optional<long long> optional_integer(const std::string& key);
    std::string text(const std::string& key, const std::string& fallback);
    std::size_t grid_1d(std::size_t fallback);
    std::size_t grid_2d(std::size_t fallback);

    void finish() const;
    const nlohmann::json& resolved() const { return resolved_; }

private:
    const std::string* raw(const std::string& key);

    const RunConfig& config_;
    std::set<std::string> used_;
    nlohmann::json resolved_ = nlohmann::json::object();
};

}  // namespace margin::cli
