#pragma once

#include <stdexcept>
#include <string>

namespace sas {

// Feature-set configurations for the ablation study. BASE bundles the bag
// learners with topic, well-formedness and length features; each BASE_X adds
// one syntactic family; ALL adds all five.
enum class FeatureConfig {
    BowOnly,
    Base,
    BaseNgrams,
    BaseKnnBleu,
    BaseSegments,
    BaseLm,
    BaseDeps,
    All,
};

constexpr FeatureConfig kAllFeatureConfigs[] = {
    FeatureConfig::BowOnly,  FeatureConfig::Base,     FeatureConfig::BaseNgrams,
    FeatureConfig::BaseKnnBleu, FeatureConfig::BaseSegments, FeatureConfig::BaseLm,
    FeatureConfig::BaseDeps, FeatureConfig::All,
};

inline const char* feature_config_name(FeatureConfig c) {
    switch (c) {
        case FeatureConfig::BowOnly: return "BOW_ONLY";
        case FeatureConfig::Base: return "BASE";
        case FeatureConfig::BaseNgrams: return "BASE_NGRAMS";
        case FeatureConfig::BaseKnnBleu: return "BASE_KNN_BLEU";
        case FeatureConfig::BaseSegments: return "BASE_SEGMENTS";
        case FeatureConfig::BaseLm: return "BASE_LM";
        case FeatureConfig::BaseDeps: return "BASE_DEPS";
        case FeatureConfig::All: return "ALL";
    }
    return "?";
}

// Row labels in the ablation table.
inline const char* feature_config_label(FeatureConfig c) {
    switch (c) {
        case FeatureConfig::BowOnly: return "BOW Only";
        case FeatureConfig::Base: return "BASE";
        case FeatureConfig::BaseNgrams: return "BASE+NGRAMS";
        case FeatureConfig::BaseKnnBleu: return "BASE+KNN-BLEU";
        case FeatureConfig::BaseSegments: return "BASE+SEGMENTS";
        case FeatureConfig::BaseLm: return "BASE+LM";
        case FeatureConfig::BaseDeps: return "BASE+DEPS";
        case FeatureConfig::All: return "ALL";
    }
    return "?";
}

inline FeatureConfig parse_feature_config(const std::string& name) {
    for (FeatureConfig c : kAllFeatureConfigs)
        if (name == feature_config_name(c)) return c;
    throw std::invalid_argument("unknown feature config: " + name);
}

inline bool config_has_base(FeatureConfig c) { return c != FeatureConfig::BowOnly; }
inline bool config_has_ngrams(FeatureConfig c) {
    return c == FeatureConfig::BaseNgrams || c == FeatureConfig::All;
}
inline bool config_has_knn(FeatureConfig c) {
    return c == FeatureConfig::BaseKnnBleu || c == FeatureConfig::All;
}
inline bool config_has_segments(FeatureConfig c) {
    return c == FeatureConfig::BaseSegments || c == FeatureConfig::All;
}
inline bool config_has_lm(FeatureConfig c) {
    return c == FeatureConfig::BaseLm || c == FeatureConfig::All;
}
inline bool config_has_deps(FeatureConfig c) {
    return c == FeatureConfig::BaseDeps || c == FeatureConfig::All;
}

}  // namespace sas
