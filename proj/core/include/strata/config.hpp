#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

struct TraitCategory {
    std::string name;
    std::vector<std::string> dimensions;

    friend bool operator==(const TraitCategory&, const TraitCategory&) = default;
};

// Named trait dimensions grouped into categories. Persona trait maps may only
// use dimension names listed here.
struct TraitSchema {
    std::vector<TraitCategory> categories;

    bool contains(std::string_view dimension) const;
    std::size_t dimension_count() const;

    friend bool operator==(const TraitSchema&, const TraitSchema&) = default;
};

// 90 dimensions: basic needs and personality, AI alignment, content interests.
const TraitSchema& default_trait_schema();

TraitSchema trait_schema_from_json(const nlohmann::json& doc);
nlohmann::ordered_json trait_schema_to_json(const TraitSchema& schema);
TraitSchema load_trait_schema(const std::filesystem::path& path);

struct HeatWeights {
    double alpha = 1.0;  // visit count
    double beta = 1.0;   // interaction length
    double gamma = 1.0;  // recency
    double mu = 1e7;     // recency time constant, seconds

    friend bool operator==(const HeatWeights&, const HeatWeights&) = default;
};

// Fully populated, validated engine configuration. Default member values are
// the reference hyperparameters.
struct Config {
    std::size_t stm_capacity = 7;
    std::size_t mtm_segment_capacity = 200;
    std::size_t kb_capacity = 100;
    std::size_t agent_traits_capacity = 100;
    double heat_tau = 5.0;
    HeatWeights heat;
    double theta = 0.6;
    std::size_t top_m_segments = 5;
    std::size_t top_k_pages = 10;
    std::size_t lpm_top_n = 10;
    std::size_t embedding_dim = 256;
    TraitSchema trait_schema = default_trait_schema();

    friend bool operator==(const Config&, const Config&) = default;
};

// Config as read from a file or built by hand: anything unset falls back to
// the defaults during validation.
struct RawConfig {
    std::optional<std::int64_t> stm_capacity;
    std::optional<std::int64_t> mtm_segment_capacity;
    std::optional<std::int64_t> kb_capacity;
    std::optional<std::int64_t> agent_traits_capacity;
    std::optional<double> heat_tau;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<double> mu;
    std::optional<double> theta;
    std::optional<std::int64_t> top_m_segments;
    std::optional<std::int64_t> top_k_pages;
    std::optional<std::int64_t> lpm_top_n;
    std::optional<std::int64_t> embedding_dim;
    std::optional<TraitSchema> trait_schema;

    static RawConfig from(const Config& config);
};

// Fills defaults and checks every invariant. Throws ValidationError naming
// the first offending field.
Config validate_config(const RawConfig& raw);

// Parses the JSON config document. Unknown keys are rejected. A relative
// "trait_schema_path" is resolved against base_dir.
RawConfig raw_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RawConfig load_raw_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const Config& config);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Applies STRATA_<FIELD> overrides (e.g. STRATA_STM_CAPACITY=9) for every
// scalar field.
void apply_env_overrides(RawConfig& raw, const EnvLookup& lookup);
std::optional<std::string> process_env(const std::string& name);

} // namespace strata
