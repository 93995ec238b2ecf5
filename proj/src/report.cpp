#include "uqeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "uqeval/errors.hpp"
#include "uqeval/hash.hpp"
#include "uqeval/probe.hpp"
#include "uqeval/stats.hpp"
#include "uqeval/uq.hpp"

namespace uqeval {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string format_threshold(double t) { return json(t).dump(); }

bool is_probe_method(const std::string& method_id) { return method_id.rfind("probe:", 0) == 0; }

bool known_method(const std::string& method_id) {
    static const char* ids[] = {"neg_seq_prob",     "perplexity",
                                "mean_token_entropy", "naive_entropy",
                                "semantic_entropy", "semantic_entropy_lennorm",
                                "len_tokens",       "len_chars"};
    if (is_probe_method(method_id)) return true;
    return std::any_of(std::begin(ids), std::end(ids),
                       [&](const char* id) { return method_id == id; });
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions must
/// be handled inside fn; results land in preallocated slots so the output
/// is independent of scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const int thread_count = std::max(1, workers);
    if (thread_count == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = static_cast<std::size_t>(t); i < n;
                 i += static_cast<std::size_t>(thread_count)) {
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

struct PerRecord {
    std::map<std::string, double> methods;           // defined method scores
    std::map<std::string, double> raw_metrics;       // metric id -> raw score
    std::map<std::string, std::string> metric_errors;  // metric id -> reason
    std::optional<int> judge_label;
    std::optional<std::string> judge_error;
};

struct ScoringResult {
    std::vector<PerRecord> per_record;
    ordered_json probe_info = ordered_json::object();
    std::map<std::string, ProbeModel> probe_models;      // method id -> trained model
    std::map<std::string, std::string> column_failures;  // method id -> reason
    std::vector<std::string> warnings;
};

double compute_method_value(const GenerationRecord& record, const std::string& method_id,
                            const RunConfig& config, const EquivalenceOracle& equivalent) {
    const auto& greedy = record.greedy;
    if (method_id == "neg_seq_prob") return neg_sequence_probability(greedy).value;
    if (method_id == "perplexity") return perplexity(greedy).value;
    if (method_id == "mean_token_entropy") return mean_token_entropy(greedy).value;
    if (method_id == "len_tokens") return length_baseline(greedy, LengthUnit::Tokens).value;
    if (method_id == "len_chars") return length_baseline(greedy, LengthUnit::Chars).value;
    if (method_id == "naive_entropy") {
        if (record.samples.empty()) throw EstimatorUnavailableError("record has no samples");
        return naive_entropy(record.samples, {config.naive_entropy_unique}).value;
    }
    if (method_id == "semantic_entropy" || method_id == "semantic_entropy_lennorm") {
        if (record.samples.empty()) throw EstimatorUnavailableError("record has no samples");
        const auto clusters = cluster_samples(record.samples, equivalent);
        SemanticEntropyOptions opts;
        opts.length_normalized = method_id == "semantic_entropy_lennorm";
        opts.normalize_clusters = config.normalize_clusters;
        return semantic_entropy(clusters, record.samples, opts).value;
    }
    throw ConfigError("unknown UQ method: " + method_id);
}

bool is_semantic_method(const std::string& method_id) {
    return method_id == "semantic_entropy" || method_id == "semantic_entropy_lennorm";
}

/// Label for one record under one metric cell, if defined.
std::optional<int> cell_label(const PerRecord& scores, const MetricCell& cell) {
    if (cell.metric_id == "llm_judge") return scores.judge_label;
    auto it = scores.raw_metrics.find(cell.metric_id);
    if (it == scores.raw_metrics.end()) return std::nullopt;
    return binarize(it->second, *cell.threshold);
}

void run_probe_method(const std::string& method_id, const std::vector<GenerationRecord>& records,
                      ScoringResult& result, std::uint64_t seed) {
    const std::string label_spec = method_id.substr(6);
    MetricCell label_cell = MetricCell::parse(label_spec);

    std::vector<std::size_t> labeled_rows;
    std::size_t with_embedding = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].embedding) continue;
        ++with_embedding;
        if (cell_label(result.per_record[i], label_cell)) labeled_rows.push_back(i);
    }
    if (with_embedding == 0) {
        result.column_failures[method_id] = "no embeddings";
        return;
    }
    if (labeled_rows.empty()) {
        result.column_failures[method_id] = "no labeled rows for " + label_cell.cell_id();
        return;
    }

    std::vector<std::size_t> train_rows, eval_rows;
    for (std::size_t i : labeled_rows) {
        (in_probe_train_split(records[i].id, seed) ? train_rows : eval_rows).push_back(i);
    }

    const std::size_t dim = records[labeled_rows.front()].embedding->size();
    FeatureMatrix features;
    features.rows = train_rows.size();
    features.cols = dim;
    features.data.reserve(train_rows.size() * dim);
    std::vector<int> labels;
    labels.reserve(train_rows.size());
    for (std::size_t i : train_rows) {
        const auto& emb = *records[i].embedding;
        features.data.insert(features.data.end(), emb.begin(), emb.end());
        labels.push_back(*cell_label(result.per_record[i], label_cell));
    }

    ProbeModel model;
    try {
        model = train_probe(features, labels, {}, label_cell.cell_id());
    } catch (const TrainingError& e) {
        result.column_failures[method_id] = std::string("training failed: ") + e.what();
        return;
    }

    // Held-out scoring: the probe is evaluated on its eval split only.
    for (std::size_t i : eval_rows) {
        result.per_record[i].methods[method_id] =
            probe_uncertainty(model, *records[i].embedding).value;
    }

    ordered_json info;
    info["label_source"] = model.label_source;
    info["iterations"] = model.iterations;
    info["converged"] = model.converged;
    info["final_gradient_norm"] = model.final_gradient_norm;
    info["train_rows"] = train_rows.size();
    info["eval_rows"] = eval_rows.size();
    result.probe_info[method_id] = std::move(info);
    result.probe_models[method_id] = std::move(model);
}

std::string probe_model_filename(const std::string& method_id) {
    std::string name = method_id;
    for (char& c : name) {
        if (c == ':' || c == '@' || c == '/') c = '_';
    }
    return name + ".json";
}

ScoringResult compute_scores(const std::vector<GenerationRecord>& records,
                             const RunConfig& config, std::uint64_t seed, int workers) {
    ScoringResult result;
    result.per_record.resize(records.size());

    // Metric raw scores needed by cells and by probe label sources.
    std::set<std::string> needed_metrics;
    bool need_judge = false;
    for (const auto& cell : config.metrics) {
        if (cell.metric_id == "llm_judge") need_judge = true;
        else needed_metrics.insert(cell.metric_id);
    }
    std::vector<std::string> probe_methods;
    bool any_semantic = false;
    for (const auto& method : config.methods) {
        if (!known_method(method)) throw ConfigError("unknown UQ method: " + method);
        if (is_semantic_method(method)) any_semantic = true;
        if (!is_probe_method(method)) continue;
        probe_methods.push_back(method);
        MetricCell label_cell = MetricCell::parse(method.substr(6));
        if (label_cell.metric_id == "llm_judge") need_judge = true;
        else needed_metrics.insert(label_cell.metric_id);
    }
    const bool judge_oracle = config.semantic_oracle == "judge";
    if (judge_oracle && any_semantic) need_judge = true;

    std::unique_ptr<JudgeClient> judge_client;
    if (need_judge) {
        if (!config.judge) {
            // llm_judge cells surface "no judge endpoint" markers at assembly
            result.warnings.push_back("llm_judge requested but no judge endpoint configured");
        } else {
            judge_client = std::make_unique<JudgeClient>(*config.judge);
            if (config.generator_model && *config.generator_model == config.judge->model) {
                result.warnings.push_back(
                    "judge model equals the generating model (" + *config.generator_model +
                    "); judge errors may correlate with the UQ methods under test");
            }
        }
    }

    EquivalenceOracle equivalent = normalized_exact_match;
    if (judge_oracle && any_semantic) {
        if (judge_client) {
            equivalent = make_judge_equivalence_oracle(*judge_client);
        } else {
            for (const auto& method : config.methods) {
                if (is_semantic_method(method)) {
                    result.column_failures[method] =
                        "semantic oracle 'judge' requires a judge endpoint";
                }
            }
        }
    }

    parallel_for(records.size(), workers, [&](std::size_t i) {
        const auto& record = records[i];
        PerRecord& out = result.per_record[i];
        for (const auto& method : config.methods) {
            if (is_probe_method(method)) continue;
            if (result.column_failures.count(method)) continue;
            try {
                out.methods[method] = compute_method_value(record, method, config, equivalent);
            } catch (const Error&) {
                // estimator unavailable for this record; the cell simply
                // loses this observation
            }
        }
        for (const auto& metric : needed_metrics) {
            try {
                out.raw_metrics[metric] = raw_score(record, metric);
            } catch (const LookupError& e) {
                out.metric_errors[metric] = e.what();
            }
        }
        if (judge_client) {
            try {
                out.judge_label = judge_client->judge(record).label;
            } catch (const Error& e) {
                out.judge_error = e.what();
            }
        }
    });

    for (const auto& method : probe_methods) {
        run_probe_method(method, records, result, seed);
    }
    return result;
}

ordered_json auroc_cell_json(const std::vector<ScoredLabel>& pairs) {
    if (pairs.empty()) return ordered_json{{"undefined", "no-scores"}};
    try {
        const AurocEstimate est = auroc(pairs);
        ordered_json j;
        j["value"] = est.value;
        j["n_pos"] = est.n_pos;
        j["n_neg"] = est.n_neg;
        j["tie_pairs"] = est.tie_pairs;
        return j;
    } catch (const UndefinedStatError&) {
        return ordered_json{{"undefined", "single-class"}};
    }
}

ordered_json spearman_cell_json(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) return ordered_json{{"undefined", "too-few-records"}};
    try {
        return ordered_json(spearman(x, y));
    } catch (const UndefinedStatError&) {
        return ordered_json{{"undefined", "constant-vector"}};
    }
}

ordered_json kappa_cell_json(const std::vector<int>& metric_labels,
                             const std::vector<int>& human_labels) {
    ordered_json j;
    if (metric_labels.empty()) {
        j["undefined"] = "no-overlap";
        return j;
    }
    const KappaResult kappa = cohen_kappa(metric_labels, human_labels);
    j["kappa"] = kappa.value;
    j["degenerate"] = kappa.degenerate;
    j["n"] = metric_labels.size();
    return j;
}

ordered_json config_echo(const RunConfig& config) {
    ordered_json j;
    j["methods"] = config.methods;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : config.metrics) cells.push_back(cell.cell_id());
    j["metrics"] = std::move(cells);
    ordered_json catalog;
    for (const auto& [metric, thresholds] : config.catalog.all()) catalog[metric] = thresholds;
    j["threshold_catalog"] = std::move(catalog);
    j["normalize_clusters"] = config.normalize_clusters;
    j["naive_entropy_unique"] = config.naive_entropy_unique;
    j["semantic_oracle"] = config.semantic_oracle;
    j["annotations"] = config.annotations_path ? ordered_json(*config.annotations_path)
                                               : ordered_json(nullptr);
    j["generator_model"] = config.generator_model ? ordered_json(*config.generator_model)
                                                  : ordered_json(nullptr);
    if (config.judge) {
        j["judge"] = ordered_json{{"endpoint", config.judge->endpoint_url},
                                  {"model", config.judge->model},
                                  {"template", config.judge->template_id}};
    } else {
        j["judge"] = nullptr;
    }
    return j;
}

double mean_pairwise_annotator_kappa(const std::vector<HumanAnnotation>& annotations,
                                     std::size_t& pair_count) {
    std::map<std::string, std::map<std::string, int>> by_annotator;  // annotator -> record -> label
    for (const auto& ann : annotations) by_annotator[ann.annotator_id][ann.record_id] = ann.label;
    std::vector<std::string> annotators;
    for (const auto& [id, _] : by_annotator) annotators.push_back(id);

    double sum = 0.0;
    pair_count = 0;
    for (std::size_t a = 0; a < annotators.size(); ++a) {
        for (std::size_t b = a + 1; b < annotators.size(); ++b) {
            std::vector<int> va, vb;
            for (const auto& [rec, label] : by_annotator[annotators[a]]) {
                auto it = by_annotator[annotators[b]].find(rec);
                if (it == by_annotator[annotators[b]].end()) continue;
                va.push_back(label);
                vb.push_back(it->second);
            }
            if (va.empty()) continue;
            sum += cohen_kappa(va, vb).value;
            ++pair_count;
        }
    }
    return pair_count == 0 ? 0.0 : sum / static_cast<double>(pair_count);
}

}  // namespace

std::string MetricCell::cell_id() const {
    if (!threshold) return metric_id;
    return metric_id + "@" + format_threshold(*threshold);
}

MetricCell MetricCell::parse(const std::string& text) {
    MetricCell cell;
    const auto at = text.rfind('@');
    if (at == std::string::npos) {
        cell.metric_id = text;
    } else {
        cell.metric_id = text.substr(0, at);
        try {
            cell.threshold = std::stod(text.substr(at + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad threshold in metric spec: " + text);
        }
    }
    if (cell.metric_id == "llm_judge") {
        if (cell.threshold) throw ConfigError("llm_judge is inherently binary, no threshold");
        return cell;
    }
    if (!known_metric(cell.metric_id)) throw ConfigError("unknown metric: " + cell.metric_id);
    return cell;
}

std::vector<std::string> RunConfig::default_methods() {
    return {"neg_seq_prob",     "perplexity",       "mean_token_entropy",
            "naive_entropy",    "semantic_entropy", "semantic_entropy_lennorm",
            "len_tokens",       "len_chars"};
}

std::vector<MetricCell> RunConfig::default_metrics(const ThresholdCatalog& catalog,
                                                   bool with_judge) {
    std::vector<MetricCell> cells;
    for (const char* metric : {"rouge1_f1", "rougeL_f1", "rougeL_recall", "squad_f1"}) {
        for (double t : catalog.thresholds(metric)) cells.push_back({metric, t});
    }
    if (with_judge) cells.push_back({"llm_judge", std::nullopt});
    return cells;
}

RunConfig parse_run_config(const json& doc) {
    RunConfig config;
    if (!doc.is_object() && !doc.is_null()) throw ConfigError("run config must be a JSON object");

    if (doc.contains("thresholds")) {
        for (const auto& [metric, list] : doc.at("thresholds").items()) {
            if (!known_metric(metric)) throw ConfigError("unknown metric in thresholds: " + metric);
            config.catalog.set(metric, list.get<std::vector<double>>());
        }
    }
    config.normalize_clusters = doc.value("normalize_clusters", true);
    config.naive_entropy_unique = doc.value("naive_entropy_unique", false);
    config.semantic_oracle = doc.value("semantic_oracle", "exact_match");
    if (config.semantic_oracle != "exact_match" && config.semantic_oracle != "judge") {
        throw ConfigError("semantic_oracle must be exact_match or judge, got " +
                          config.semantic_oracle);
    }
    if (doc.contains("annotations") && !doc.at("annotations").is_null()) {
        config.annotations_path = doc.at("annotations").get<std::string>();
    }
    if (doc.contains("generator_model") && !doc.at("generator_model").is_null()) {
        config.generator_model = doc.at("generator_model").get<std::string>();
    }
    if (doc.contains("judge") && !doc.at("judge").is_null()) {
        const auto& jj = doc.at("judge");
        JudgeConfig judge;
        judge.endpoint_url = jj.value("endpoint", "");
        judge.model = jj.value("model", "");
        judge.template_id = jj.value("template", "v1");
        judge.max_retries = jj.value("max_retries", 2);
        judge.timeout_seconds = jj.value("timeout_seconds", 60.0);
        if (jj.contains("cache") && !jj.at("cache").is_null()) {
            judge.cache_path = jj.at("cache").get<std::string>();
        }
        judge.generator_model = config.generator_model;
        config.judge = std::move(judge);
    }

    if (doc.contains("methods")) {
        config.methods = doc.at("methods").get<std::vector<std::string>>();
        for (const auto& method : config.methods) {
            if (!known_method(method)) throw ConfigError("unknown UQ method: " + method);
            if (is_probe_method(method)) MetricCell::parse(method.substr(6));  // validates label
        }
    } else {
        config.methods = RunConfig::default_methods();
    }
    if (doc.contains("metrics")) {
        for (const auto& entry : doc.at("metrics")) {
            const std::string text = entry.get<std::string>();
            MetricCell cell = MetricCell::parse(text);
            if (!cell.threshold && cell.metric_id != "llm_judge") {
                for (double t : config.catalog.thresholds(cell.metric_id)) {
                    config.metrics.push_back({cell.metric_id, t});
                }
            } else {
                config.metrics.push_back(std::move(cell));
            }
        }
    } else {
        config.metrics = RunConfig::default_metrics(config.catalog, config.judge.has_value());
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("bad config file " + path + ": " + e.what());
    }
    return parse_run_config(doc);
}

HumanMajority human_majority(const std::vector<HumanAnnotation>& annotations) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> votes;  // id -> (ones, total)
    for (const auto& ann : annotations) {
        auto& [ones, total] = votes[ann.record_id];
        ones += static_cast<std::size_t>(ann.label);
        ++total;
    }
    HumanMajority result;
    for (const auto& [id, tally] : votes) {
        const auto [ones, total] = tally;
        if (2 * ones == total) {
            ++result.ties_excluded;
            continue;
        }
        result.labels[id] = 2 * ones > total ? 1 : 0;
    }
    return result;
}

std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return to_hex(fnv1a64(buffer.str()));
}

nlohmann::ordered_json cmd_evaluate(const std::vector<GenerationRecord>& records,
                                    const RunConfig& config, const EvaluateOptions& options) {
    ScoringResult scores = compute_scores(records, config, options.seed, options.workers);

    if (options.probe_model_dir) {
        for (const auto& [method, model] : scores.probe_models) {
            const std::string path = *options.probe_model_dir + "/" + probe_model_filename(method);
            std::ofstream out(path);
            if (!out) throw ConfigError("cannot write probe model file: " + path);
            out << model.to_json() << '\n';
        }
    }

    ordered_json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["seed"] = options.seed;
    report["dataset"] = ordered_json{{"path", options.records_path},
                                     {"fnv1a64", file_fingerprint(options.records_path)},
                                     {"n_records", records.size()}};
    report["config"] = config_echo(config);

    ordered_json method_list = ordered_json::array();
    for (const auto& m : config.methods) method_list.push_back(m);
    report["methods"] = std::move(method_list);
    ordered_json cell_list = ordered_json::array();
    for (const auto& c : config.metrics) cell_list.push_back(c.cell_id());
    report["metrics"] = std::move(cell_list);

    // AUROC matrix, one row per metric cell, one entry per method.
    ordered_json matrix;
    ordered_json exclusions;
    for (const auto& cell : config.metrics) {
        const std::string cell_name = cell.cell_id();
        if (cell.metric_id == "llm_judge" && !config.judge) {
            ordered_json row;
            for (const auto& method : config.methods) {
                row[method] = ordered_json{{"undefined", "no judge endpoint configured"}};
            }
            matrix[cell_name] = std::move(row);
            continue;
        }
        std::size_t excluded = 0;
        std::vector<std::optional<int>> labels(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            labels[i] = cell_label(scores.per_record[i], cell);
            if (!labels[i]) ++excluded;
        }
        ordered_json row;
        for (const auto& method : config.methods) {
            if (auto it = scores.column_failures.find(method); it != scores.column_failures.end()) {
                row[method] = ordered_json{{"undefined", it->second}};
                continue;
            }
            std::vector<ScoredLabel> pairs;
            for (std::size_t i = 0; i < records.size(); ++i) {
                if (!labels[i]) continue;
                auto mit = scores.per_record[i].methods.find(method);
                if (mit == scores.per_record[i].methods.end()) continue;
                pairs.push_back({mit->second, *labels[i]});
            }
            row[method] = auroc_cell_json(pairs);
        }
        matrix[cell_name] = std::move(row);
        if (excluded > 0) exclusions[cell_name] = excluded;
    }
    report["auroc"] = std::move(matrix);
    report["label_exclusions"] = std::move(exclusions);

    // Length diagnostics per method.
    ordered_json length_corr;
    for (const auto& method : config.methods) {
        std::vector<double> values, token_lengths, char_lengths;
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto it = scores.per_record[i].methods.find(method);
            if (it == scores.per_record[i].methods.end()) continue;
            values.push_back(it->second);
            token_lengths.push_back(static_cast<double>(records[i].greedy.tokens.size()));
            char_lengths.push_back(static_cast<double>(records[i].greedy.text.size()));
        }
        ordered_json entry;
        entry["tokens"] = spearman_cell_json(values, token_lengths);
        entry["chars"] = spearman_cell_json(values, char_lengths);
        length_corr[method] = std::move(entry);
    }
    report["spearman_vs_length"] = std::move(length_corr);

    // Kappa against human majority, when annotations are configured.
    if (config.annotations_path) {
        const auto annotations = parse_annotations_file(*config.annotations_path);
        const HumanMajority majority = human_majority(annotations);
        std::map<std::string, std::size_t> index_by_id;
        for (std::size_t i = 0; i < records.size(); ++i) index_by_id[records[i].id] = i;

        ordered_json kappa_section;
        for (const auto& cell : config.metrics) {
            std::vector<int> metric_labels, human_labels;
            for (const auto& [rec_id, human_label] : majority.labels) {
                auto idx = index_by_id.find(rec_id);
                if (idx == index_by_id.end()) continue;
                const auto label = cell_label(scores.per_record[idx->second], cell);
                if (!label) continue;
                metric_labels.push_back(*label);
                human_labels.push_back(human_label);
            }
            kappa_section[cell.cell_id()] = kappa_cell_json(metric_labels, human_labels);
        }
        std::size_t pair_count = 0;
        const double inter_annotator = mean_pairwise_annotator_kappa(annotations, pair_count);
        report["kappa_vs_human"] = std::move(kappa_section);
        report["human"] = ordered_json{{"n_majority_labels", majority.labels.size()},
                                       {"ties_excluded", majority.ties_excluded},
                                       {"inter_annotator_kappa", inter_annotator},
                                       {"annotator_pairs", pair_count}};
    } else {
        report["kappa_vs_human"] = nullptr;
        report["human"] = nullptr;
    }

    report["probe"] = scores.probe_info;
    ordered_json warnings = ordered_json::array();
    for (const auto& w : scores.warnings) warnings.push_back(w);
    report["warnings"] = std::move(warnings);
    return report;
}

nlohmann::ordered_json cmd_agree(const std::vector<GenerationRecord>& records,
                                 const std::vector<HumanAnnotation>& annotations,
                                 const RunConfig& config) {
    const HumanMajority majority = human_majority(annotations);
    std::map<std::string, std::size_t> index_by_id;
    for (std::size_t i = 0; i < records.size(); ++i) index_by_id[records[i].id] = i;

    bool any_overlap = false;
    for (const auto& [rec_id, _] : majority.labels) {
        if (index_by_id.count(rec_id)) {
            any_overlap = true;
            break;
        }
    }
    if (!any_overlap) {
        throw ContractError("empty join: no annotation record ids overlap the dataset");
    }

    ScoringResult scores = compute_scores(records, config, /*seed=*/0, /*workers=*/1);

    ordered_json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["n_annotations"] = annotations.size();
    report["n_majority_labels"] = majority.labels.size();
    report["ties_excluded"] = majority.ties_excluded;

    std::size_t pair_count = 0;
    const double inter_annotator = mean_pairwise_annotator_kappa(annotations, pair_count);
    report["inter_annotator_kappa"] =
        ordered_json{{"mean_pairwise", inter_annotator}, {"annotator_pairs", pair_count}};

    ordered_json kappa_section;
    for (const auto& cell : config.metrics) {
        if (cell.metric_id == "llm_judge" && !config.judge) {
            kappa_section[cell.cell_id()] = ordered_json{{"undefined", "no judge endpoint configured"}};
            continue;
        }
        std::vector<int> metric_labels, human_labels;
        for (const auto& [rec_id, human_label] : majority.labels) {
            auto idx = index_by_id.find(rec_id);
            if (idx == index_by_id.end()) continue;
            const auto label = cell_label(scores.per_record[idx->second], cell);
            if (!label) continue;
            metric_labels.push_back(*label);
            human_labels.push_back(human_label);
        }
        kappa_section[cell.cell_id()] = kappa_cell_json(metric_labels, human_labels);
    }
    report["kappa"] = std::move(kappa_section);
    return report;
}

std::string cmd_sweep(const std::vector<GenerationRecord>& records,
                      const std::vector<HumanAnnotation>& annotations,
                      const std::string& metric_id, const std::vector<double>& grid) {
    if (metric_id == "llm_judge") {
        throw ConfigError("llm_judge is inherently binary and cannot be threshold-swept");
    }
    if (!known_metric(metric_id)) throw ConfigError("unknown metric: " + metric_id);
    if (grid.empty()) throw ConfigError("sweep grid is empty");

    const HumanMajority majority = human_majority(annotations);
    std::vector<double> raws;
    std::vector<int> human_labels;
    for (const auto& record : records) {
        auto it = majority.labels.find(record.id);
        if (it == majority.labels.end()) continue;
        try {
            raws.push_back(raw_score(record, metric_id));
        } catch (const LookupError&) {
            continue;  // record lacks this external metric
        }
        human_labels.push_back(it->second);
    }
    if (raws.empty()) {
        throw ContractError("empty join: no annotated record has a " + metric_id + " score");
    }

    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end());
    std::ostringstream csv;
    csv << "threshold,kappa,degenerate,n\n";
    for (double t : sorted_grid) {
        std::vector<int> metric_labels;
        metric_labels.reserve(raws.size());
        for (double raw : raws) metric_labels.push_back(binarize(raw, t));
        const KappaResult kappa = cohen_kappa(metric_labels, human_labels);
        csv << format_threshold(t) << ',' << json(kappa.value).dump() << ','
            << (kappa.degenerate ? 1 : 0) << ',' << raws.size() << '\n';
    }
    return csv.str();
}

nlohmann::ordered_json cmd_correlate(const std::vector<GenerationRecord>& records,
                                     const RunConfig& config, std::uint64_t seed) {
    if (records.size() < 2) throw ContractError("correlate needs at least 2 records");
    ScoringResult scores = compute_scores(records, config, seed, /*workers=*/1);

    ordered_json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["n_records"] = records.size();
    ordered_json table;
    for (const auto& method : config.methods) {
        std::vector<double> values, token_lengths, char_lengths;
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto it = scores.per_record[i].methods.find(method);
            if (it == scores.per_record[i].methods.end()) continue;
            values.push_back(it->second);
            token_lengths.push_back(static_cast<double>(records[i].greedy.tokens.size()));
            char_lengths.push_back(static_cast<double>(records[i].greedy.text.size()));
        }
        ordered_json entry;
        entry["tokens"] = spearman_cell_json(values, token_lengths);
        entry["chars"] = spearman_cell_json(values, char_lengths);
        table[method] = std::move(entry);
    }
    report["spearman"] = std::move(table);
    return report;
}

}  // namespace uqeval
