#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqeval/correctness.hpp"
#include "uqeval/judge.hpp"
#include "uqeval/records.hpp"

namespace uqeval {

inline constexpr const char* kToolName = "uqeval";
inline constexpr const char* kToolVersion = "0.1.0";

/// One correctness column of the report: a metric id plus, for continuous
/// metrics, the binarization threshold. llm_judge has no threshold.
struct MetricCell {
    std::string metric_id;
    std::optional<double> threshold;

    std::string cell_id() const;
    static MetricCell parse(const std::string& text);  // "rougeL_f1@0.5" or "llm_judge"
};

/// Effective run configuration for evaluate/agree/sweep/correlate.
struct RunConfig {
    std::vector<std::string> methods;
    std::vector<MetricCell> metrics;
    ThresholdCatalog catalog = ThresholdCatalog::defaults();
    bool normalize_clusters = true;
    bool naive_entropy_unique = false;
    /// "exact_match" (built-in) or "judge" (bidirectional entailment
    /// through the configured judge endpoint).
    std::string semantic_oracle = "exact_match";
    std::optional<std::string> annotations_path;
    std::optional<std::string> generator_model;
    std::optional<JudgeConfig> judge;

    /// Methods applied when a config file names none.
    static std::vector<std::string> default_methods();
    /// Metric cells applied when a config file names none (lexical metrics
    /// at their catalogued thresholds; llm_judge when a judge is set).
    static std::vector<MetricCell> default_metrics(const ThresholdCatalog& catalog,
                                                   bool with_judge);
};

/// Parses the JSON run-config document. Missing keys get defaults.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

struct EvaluateOptions {
    std::string records_path;
    std::uint64_t seed = 0;
    int workers = 1;
    /// When set, trained probe models are written here as JSON files.
    std::optional<std::string> probe_model_dir;
};

/// The full evaluation report: every configured (method, metric) AUROC
/// cell (value or explicit undefined marker), Spearman-vs-length per
/// method, kappa-vs-human when annotations are configured, run metadata.
nlohmann::ordered_json cmd_evaluate(const std::vector<GenerationRecord>& records,
                                    const RunConfig& config, const EvaluateOptions& options);

/// Kappa agreement of every configured metric cell against the human
/// majority label, plus inter-annotator agreement.
nlohmann::ordered_json cmd_agree(const std::vector<GenerationRecord>& records,
                                 const std::vector<HumanAnnotation>& annotations,
                                 const RunConfig& config);

/// Kappa-vs-threshold curve for one continuous metric, CSV ordered by
/// threshold. Throws ConfigError for inherently binary metrics.
std::string cmd_sweep(const std::vector<GenerationRecord>& records,
                      const std::vector<HumanAnnotation>& annotations,
                      const std::string& metric_id, const std::vector<double>& grid);

/// Spearman correlation of every method's scores against answer length.
nlohmann::ordered_json cmd_correlate(const std::vector<GenerationRecord>& records,
                                     const RunConfig& config, std::uint64_t seed);

/// Majority vote per record id; records with tied votes are dropped and
/// counted in ties_excluded.
struct HumanMajority {
    std::map<std::string, int> labels;
    std::size_t ties_excluded = 0;
};
HumanMajority human_majority(const std::vector<HumanAnnotation>& annotations);

/// FNV-1a fingerprint of a file's bytes, as hex. Empty string when the
/// file cannot be read.
std::string file_fingerprint(const std::string& path);

}  // namespace uqeval
