#include "config.hpp"

#include <cmath>

#include "margin/error.hpp"

namespace margin::cli {

std::string format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
        case OutputFormat::both: return "both";
    }
    return "csv";
}

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    if (text == "both") return OutputFormat::both;
    throw UsageError("unknown format '" + text + "' (expected csv, json or both)");
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

Params::Params(const RunConfig& config) : config_(config) {}

const std::string* Params::raw(const std::string& key) {
    used_.insert(key);
    const auto it = config_.overrides.find(key);
    return it == config_.overrides.end() ? nullptr : &it->second;
}

double Params::real(const std::string& key, double fallback) {
    double v = fallback;
    if (const auto* s = raw(key)) {
        std::size_t used = 0;
        try {
            v = std::stod(*s, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used == 0 || used != s->size() || !std::isfinite(v)) {
            throw UsageError("parameter " + key + ": expected a finite number, got '" + *s + "'");
        }
    }
    resolved_[key] = v;
    return v;
}

long long Params::integer(const std::string& key, long long fallback) {
    long long v = fallback;
    if (const auto* s = raw(key)) {
        std::size_t used = 0;
        try {
            v = std::stoll(*s, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used == 0 || used != s->size()) throw UsageError("parameter " + key + ": expected an integer, got '" + *s + "'");
    }
    resolved_[key] = v;
    return v;
}

std::optional<long long> Params::optional_integer(const std::string& key) {
    if (config_.overrides.count(key) == 0) {
        used_.insert(key);
        resolved_[key] = nullptr;
        return std::nullopt;
    }
    return integer(key, 0);
}

std::string Params::text(const std::string& key, const std::string& fallback) {
    std::string v = fallback;
    if (const auto* s = raw(key)) v = *s;
    resolved_[key] = v;
    return v;
}

std::size_t Params::grid_1d(std::size_t fallback) {
    const std::size_t n = config_.grid_1d.value_or(fallback);
    if (n < 3) throw UsageError("--grid-1d must be >= 3");
    resolved_["grid_1d"] = n;
    return n;
}

std::size_t Params::grid_2d(std::size_t fallback) {
    const std::size_t n = config_.grid_2d.value_or(fallback);
    if (n < 3) throw UsageError("--grid-2d must be >= 3");
    resolved_["grid_2d"] = n;
    return n;
}

void Params::finish() const {
    std::string unknown;
    for (const auto& [key, value] : config_.overrides) {
        if (used_.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) {
        std::string known;
        for (const auto& k : used_) known += (known.empty() ? "" : ", ") + k;
        throw UsageError("unknown parameter(s) for " + config_.name + ": " + unknown + " (accepted: " + known + ")");
    }
}

}  // namespace margin::cli
