#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcurator/ingestion.hpp"
#include "tcurator/model.hpp"
#include "tcurator/persistence.hpp"
#include "tcurator/trust_metrics.hpp"

namespace tcurator {

struct OperatorConfig {
  OperatorKind kind = OperatorKind::Extract;
  nlohmann::json params = nlohmann::json::object();
};

struct InputSpec {
  std::filesystem::path path;
  LogFormat format;
  std::string source_dataset;
  /// Log identifier; the file stem when empty.
  std::string id;
};

struct KnowledgeBasePaths {
  std::optional<std::filesystem::path> blacklist;
  std::optional<std::filesystem::path> orgmap;
  std::optional<std::filesystem::path> topics;
  std::optional<std::filesystem::path> vocabulary;
  std::optional<std::filesystem::path> vocabulary_prefixes;
};

struct OutputSpec {
  std::optional<std::filesystem::path> path;
  FileFormat format = FileFormat::NdjsonLike;
  std::optional<std::filesystem::path> stats;
};

/// The first input is the log being curated; later inputs are donors for
/// LogsJoin and LogsEnrichment.
struct PipelineSpec {
  std::string run_id;
  std::vector<OperatorConfig> operators;
  std::vector<InputSpec> inputs;
  KnowledgeBasePaths kb;
  OutputSpec output;
  std::optional<std::filesystem::path> store;
};

/// Relative paths resolve against `base_dir`. Throws InvalidConfig or
/// UnknownOperator.
PipelineSpec parse_pipeline(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
/// Throws FileNotReadable, InvalidConfig or UnknownOperator.
PipelineSpec load_pipeline(const std::filesystem::path& path);
std::string pipeline_to_yaml(const PipelineSpec& spec);

struct ParamSchema {
  std::string name;
  /// number, integer, enum, enum_set or string_list
  std::string type;
  nlohmann::json default_value;
  std::vector<std::string> choices;
  std::optional<double> min;
  std::optional<double> max;
  bool min_exclusive = false;
  std::string description;
};

struct OperatorDescriptor {
  OperatorKind kind = OperatorKind::Extract;
  std::string group;
  std::string description;
  std::vector<ParamSchema> params;
  std::vector<std::string> requires_;
};

/// One descriptor per operator, in canonical order.
const std::vector<OperatorDescriptor>& operator_registry();
const OperatorDescriptor& describe(OperatorKind kind);
nlohmann::json registry_to_json();

/// Fills defaults; throws InvalidConfig on an unknown parameter or a value
/// outside its schema.
nlohmann::json resolve_params(OperatorKind kind, const nlohmann::json& params);

/// Sorts the selection into canonical order. Throws InvalidConfig on a
/// repeated operator and MissingDependency naming the missing prerequisite.
std::vector<OperatorConfig> order_operators(std::vector<OperatorConfig> selected, std::size_t input_logs);
/// Throws UnknownOperator for a name outside the registry.
std::vector<OperatorConfig> order_operators(const std::vector<std::string>& names, std::size_t input_logs);

/// Ordered operators with Extract and FormatConvert inserted when absent and
/// every parameter map resolved. Also checks run id and inputs.
PipelineSpec validate_pipeline(PipelineSpec spec);

struct CurationResult {
  std::string run_id;
  std::vector<OperatorKind> order;
  std::vector<CuratedQuery> trusted;
  RunStatistics stats;
  /// Ingestion counters of the curated (first) input.
  std::size_t lines_read = 0;
  std::size_t rejected_entries = 0;
  std::size_t line_errors = 0;
  /// Stages taken from checkpoints instead of being executed.
  std::size_t reused_stages = 0;
};

struct RunObserver {
  std::function<void(std::size_t index, OperatorKind op)> stage_started;
  std::function<void(std::size_t index, const OperatorOutcome& outcome)> stage_finished;
};

/// Executes the validated pipeline, checkpointing every stage into `store`.
/// Throws StageFailure naming the stage; FileNotReadable for inputs and
/// knowledge bases that cannot be opened.
CurationResult run_pipeline(const PipelineSpec& spec, Store& store, const RunObserver& observer = {});
/// Opens spec.store (or a private in-memory store).
CurationResult run_pipeline(const PipelineSpec& spec, const RunObserver& observer = {});

/// Re-executes a stored run from `from_stage`, reusing the checkpoints of the
/// stages before it. Without `from_stage` it continues after the last
/// checkpoint, and a finished run is returned as stored. Throws
/// MissingCheckpoint.
CurationResult resume(Store& store, const std::string& run_id, std::optional<OperatorKind> from_stage = std::nullopt,
                      const RunObserver& observer = {});

}  // namespace tcurator
