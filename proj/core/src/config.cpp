#include "strata/config.hpp"

#include "strata/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace strata {
namespace {

TraitSchema build_default_schema() {
    TraitSchema schema;
    schema.categories.push_back({"basic_needs_personality", {
        "physiological_needs", "safety_needs", "belonging_needs", "esteem_needs",
        "self_actualization", "openness", "conscientiousness", "extraversion",
        "agreeableness", "emotional_stability", "curiosity", "patience",
        "optimism", "humor", "assertiveness", "independence",
        "risk_tolerance", "orderliness", "spontaneity", "empathy",
        "competitiveness", "perfectionism", "sociability", "introspection",
        "resilience", "creativity", "frugality", "ambition",
        "traditionalism", "adventurousness"}});
    schema.categories.push_back({"ai_alignment", {
        "preferred_verbosity", "preferred_formality", "preferred_tone", "explanation_depth",
        "directness", "humor_tolerance", "emoji_preference", "preferred_language",
        "technical_level", "citation_preference", "proactivity_preference", "privacy_sensitivity",
        "safety_sensitivity", "feedback_style", "autonomy_expectation", "trust_in_ai",
        "correction_tolerance", "format_preference", "example_preference", "step_by_step_preference",
        "brevity_preference", "empathy_expectation", "creativity_expectation", "factuality_priority",
        "reminder_preference", "decision_support_style", "persona_consistency", "follow_up_preference",
        "opinion_tolerance", "response_speed_priority"}});
    schema.categories.push_back({"content_interest", {
        "technology", "science", "health_fitness", "food_cooking",
        "travel", "music", "movies_tv", "books_literature",
        "gaming", "sports", "fashion", "finance_investing",
        "education", "career", "parenting", "pets",
        "home_garden", "arts_crafts", "photography", "history",
        "politics", "nature_outdoors", "automotive", "spirituality",
        "entertainment", "news_current_events", "languages", "diy_making",
        "relationships", "productivity"}});
    return schema;
}

void check_schema(const TraitSchema& schema) {
    std::set<std::string> seen;
    for (const auto& category : schema.categories) {
        if (category.name.empty()) throw ValidationError("trait_schema", "category name must not be empty");
        for (const auto& dim : category.dimensions) {
            if (dim.empty()) {
                throw ValidationError("trait_schema", "empty dimension name in category " + category.name);
            }
            if (!seen.insert(dim).second) {
                throw ValidationError("trait_schema", "duplicate dimension name " + dim);
            }
        }
    }
}

std::size_t positive(const std::optional<std::int64_t>& value, std::size_t fallback, const char* field) {
    if (!value) return fallback;
    if (*value < 1) throw ValidationError(field, "must be >= 1, got " + std::to_string(*value));
    return static_cast<std::size_t>(*value);
}

double finite(const std::optional<double>& value, double fallback, const char* field) {
    if (!value) return fallback;
    if (!std::isfinite(*value)) throw ValidationError(field, "must be finite");
    return *value;
}

template <class T>
std::optional<T> json_field(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    if constexpr (std::is_same_v<T, std::int64_t>) {
        if (!it->is_number_integer()) throw ValidationError(key, "must be an integer");
    } else {
        if (!it->is_number()) throw ValidationError(key, "must be a number");
    }
    return it->get<T>();
}

const std::vector<std::string>& integer_keys() {
    static const std::vector<std::string> keys = {
        "stm_capacity", "mtm_segment_capacity", "kb_capacity", "agent_traits_capacity",
        "top_m_segments", "top_k_pages", "lpm_top_n", "embedding_dim"};
    return keys;
}

const std::vector<std::string>& real_keys() {
    static const std::vector<std::string> keys = {"heat_tau", "alpha", "beta", "gamma", "mu", "theta"};
    return keys;
}

std::optional<std::int64_t>* integer_slot(RawConfig& raw, const std::string& key) {
    if (key == "stm_capacity") return &raw.stm_capacity;
    if (key == "mtm_segment_capacity") return &raw.mtm_segment_capacity;
    if (key == "kb_capacity") return &raw.kb_capacity;
    if (key == "agent_traits_capacity") return &raw.agent_traits_capacity;
    if (key == "top_m_segments") return &raw.top_m_segments;
    if (key == "top_k_pages") return &raw.top_k_pages;
    if (key == "lpm_top_n") return &raw.lpm_top_n;
    if (key == "embedding_dim") return &raw.embedding_dim;
    return nullptr;
}

std::optional<double>* real_slot(RawConfig& raw, const std::string& key) {
    if (key == "heat_tau") return &raw.heat_tau;
    if (key == "alpha") return &raw.alpha;
    if (key == "beta") return &raw.beta;
    if (key == "gamma") return &raw.gamma;
    if (key == "mu") return &raw.mu;
    if (key == "theta") return &raw.theta;
    return nullptr;
}

} // namespace

bool TraitSchema::contains(std::string_view dimension) const {
    for (const auto& category : categories) {
        for (const auto& dim : category.dimensions) {
            if (dim == dimension) return true;
        }
    }
    return false;
}

std::size_t TraitSchema::dimension_count() const {
    std::size_t count = 0;
    for (const auto& category : categories) count += category.dimensions.size();
    return count;
}

const TraitSchema& default_trait_schema() {
    static const TraitSchema schema = build_default_schema();
    return schema;
}

TraitSchema trait_schema_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("categories") || !doc["categories"].is_array()) {
        throw ValidationError("trait_schema", "expected an object with a \"categories\" array");
    }
    TraitSchema schema;
    for (const auto& entry : doc["categories"]) {
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string() ||
            !entry.contains("dimensions") || !entry["dimensions"].is_array()) {
            throw ValidationError("trait_schema", "each category needs a name and a dimensions array");
        }
        TraitCategory category;
        category.name = entry["name"].get<std::string>();
        for (const auto& dim : entry["dimensions"]) {
            if (!dim.is_string()) throw ValidationError("trait_schema", "dimension names must be strings");
            category.dimensions.push_back(dim.get<std::string>());
        }
        schema.categories.push_back(std::move(category));
    }
    check_schema(schema);
    return schema;
}

nlohmann::ordered_json trait_schema_to_json(const TraitSchema& schema) {
    nlohmann::ordered_json categories = nlohmann::ordered_json::array();
    for (const auto& category : schema.categories) {
        nlohmann::ordered_json entry;
        entry["name"] = category.name;
        entry["dimensions"] = category.dimensions;
        categories.push_back(std::move(entry));
    }
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["categories"] = std::move(categories);
    return doc;
}

TraitSchema load_trait_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "trait schema not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse, path.string() + ": " + e.what());
    }
    return trait_schema_from_json(doc);
}

RawConfig RawConfig::from(const Config& config) {
    RawConfig raw;
    raw.stm_capacity = static_cast<std::int64_t>(config.stm_capacity);
    raw.mtm_segment_capacity = static_cast<std::int64_t>(config.mtm_segment_capacity);
    raw.kb_capacity = static_cast<std::int64_t>(config.kb_capacity);
    raw.agent_traits_capacity = static_cast<std::int64_t>(config.agent_traits_capacity);
    raw.heat_tau = config.heat_tau;
    raw.alpha = config.heat.alpha;
    raw.beta = config.heat.beta;
    raw.gamma = config.heat.gamma;
    raw.mu = config.heat.mu;
    raw.theta = config.theta;
    raw.top_m_segments = static_cast<std::int64_t>(config.top_m_segments);
    raw.top_k_pages = static_cast<std::int64_t>(config.top_k_pages);
    raw.lpm_top_n = static_cast<std::int64_t>(config.lpm_top_n);
    raw.embedding_dim = static_cast<std::int64_t>(config.embedding_dim);
    raw.trait_schema = config.trait_schema;
    return raw;
}

Config validate_config(const RawConfig& raw) {
    const Config defaults;
    Config config;
    config.stm_capacity = positive(raw.stm_capacity, defaults.stm_capacity, "stm_capacity");
    config.mtm_segment_capacity =
        positive(raw.mtm_segment_capacity, defaults.mtm_segment_capacity, "mtm_segment_capacity");
    config.kb_capacity = positive(raw.kb_capacity, defaults.kb_capacity, "kb_capacity");
    config.agent_traits_capacity =
        positive(raw.agent_traits_capacity, defaults.agent_traits_capacity, "agent_traits_capacity");
    config.heat_tau = finite(raw.heat_tau, defaults.heat_tau, "heat_tau");

    config.heat.alpha = finite(raw.alpha, defaults.heat.alpha, "alpha");
    config.heat.beta = finite(raw.beta, defaults.heat.beta, "beta");
    config.heat.gamma = finite(raw.gamma, defaults.heat.gamma, "gamma");
    if (config.heat.alpha < 0) throw ValidationError("alpha", "must be >= 0");
    if (config.heat.beta < 0) throw ValidationError("beta", "must be >= 0");
    if (config.heat.gamma < 0) throw ValidationError("gamma", "must be >= 0");
    config.heat.mu = finite(raw.mu, defaults.heat.mu, "mu");
    if (config.heat.mu <= 0) throw ValidationError("mu", "must be > 0");

    config.theta = finite(raw.theta, defaults.theta, "theta");
    if (config.theta < -1.0 || config.theta > 2.0) {
        throw ValidationError("theta", "must lie within [-1, 2], the range of the matching score");
    }
    config.top_m_segments = positive(raw.top_m_segments, defaults.top_m_segments, "top_m_segments");
    config.top_k_pages = positive(raw.top_k_pages, defaults.top_k_pages, "top_k_pages");
    config.lpm_top_n = positive(raw.lpm_top_n, defaults.lpm_top_n, "lpm_top_n");
    config.embedding_dim = positive(raw.embedding_dim, defaults.embedding_dim, "embedding_dim");
    if (raw.trait_schema) {
        check_schema(*raw.trait_schema);
        config.trait_schema = *raw.trait_schema;
    }
    return config;
}

RawConfig raw_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ValidationError("config", "expected a JSON object");
    RawConfig raw;
    for (const auto& [key, value] : doc.items()) {
        if (auto* slot = integer_slot(raw, key)) {
            *slot = json_field<std::int64_t>(doc, key.c_str());
        } else if (auto* rslot = real_slot(raw, key)) {
            *rslot = json_field<double>(doc, key.c_str());
        } else if (key == "trait_schema") {
            raw.trait_schema = trait_schema_from_json(value);
        } else if (key == "trait_schema_path") {
            if (!value.is_string()) throw ValidationError(key, "must be a string");
            std::filesystem::path path = value.get<std::string>();
            if (path.is_relative()) path = base_dir / path;
            raw.trait_schema = load_trait_schema(path);
        } else if (key == "version" || key == "$comment") {
            continue;
        } else {
            throw ValidationError(key, "unknown config key");
        }
    }
    return raw;
}

RawConfig load_raw_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "config file not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse, path.string() + ": " + e.what());
    }
    return raw_config_from_json(doc, path.parent_path());
}

nlohmann::ordered_json config_to_json(const Config& config) {
    nlohmann::ordered_json doc;
    doc["stm_capacity"] = config.stm_capacity;
    doc["mtm_segment_capacity"] = config.mtm_segment_capacity;
    doc["kb_capacity"] = config.kb_capacity;
    doc["agent_traits_capacity"] = config.agent_traits_capacity;
    doc["heat_tau"] = config.heat_tau;
    doc["alpha"] = config.heat.alpha;
    doc["beta"] = config.heat.beta;
    doc["gamma"] = config.heat.gamma;
    doc["mu"] = config.heat.mu;
    doc["theta"] = config.theta;
    doc["top_m_segments"] = config.top_m_segments;
    doc["top_k_pages"] = config.top_k_pages;
    doc["lpm_top_n"] = config.lpm_top_n;
    doc["embedding_dim"] = config.embedding_dim;
    doc["trait_schema"] = trait_schema_to_json(config.trait_schema);
    return doc;
}

void apply_env_overrides(RawConfig& raw, const EnvLookup& lookup) {
    auto env_name = [](const std::string& key) {
        std::string name = "STRATA_";
        for (char c : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        return name;
    };
    for (const auto& key : integer_keys()) {
        auto value = lookup(env_name(key));
        if (!value) continue;
        try {
            std::size_t used = 0;
            long long parsed = std::stoll(*value, &used);
            if (used != value->size()) throw std::invalid_argument("trailing characters");
            *integer_slot(raw, key) = parsed;
        } catch (const std::exception&) {
            throw ValidationError(key, "environment override " + env_name(key) + " is not an integer");
        }
    }
    for (const auto& key : real_keys()) {
        auto value = lookup(env_name(key));
        if (!value) continue;
        try {
            std::size_t used = 0;
            double parsed = std::stod(*value, &used);
            if (used != value->size()) throw std::invalid_argument("trailing characters");
            *real_slot(raw, key) = parsed;
        } catch (const std::exception&) {
            throw ValidationError(key, "environment override " + env_name(key) + " is not a number");
        }
    }
}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* value = std::getenv(name.c_str())) return std::string(value);
    return std::nullopt;
}

} // namespace strata
