#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_map>

#include "tcurator/error.hpp"
#include "tcurator/ops_crosslog.hpp"
#include "tcurator/ops_session.hpp"
#include "tcurator/ops_single.hpp"
#include "tcurator/pipeline.hpp"
#include "tcurator/sparql/corrector.hpp"
#include "tcurator/sparql/features.hpp"
#include "tcurator/sparql/parser.hpp"
#include "tcurator/sparql/semantics.hpp"

namespace tcurator {

using nlohmann::json;

namespace {

struct Context {
  const PipelineSpec* spec = nullptr;
  Store* store = nullptr;
  IpKnowledgeBase kb;
  TopicReferenceBase topics;
  sparql::ReferenceVocabulary vocab;
  std::vector<QueryLog> logs;  // primary first, then donors, as extracted
  std::unordered_map<QueryId, const CuratedQuery*> originals;

  std::vector<QueryLog> donors() const { return {logs.begin() + 1, logs.end()}; }
  void index_originals() {
    originals.clear();
    for (const auto& l : logs) {
      for (const auto& q : l.entries) originals.emplace(q.id, &q);
    }
  }
};

void load_knowledge(Context& ctx, const PipelineSpec& spec) {
  ctx.kb = IpKnowledgeBase::load(spec.kb.blacklist, spec.kb.orgmap);
  if (spec.kb.topics) ctx.topics = TopicReferenceBase::load(*spec.kb.topics);
  if (spec.kb.vocabulary) ctx.vocab = sparql::ReferenceVocabulary::load(*spec.kb.vocabulary, spec.kb.vocabulary_prefixes);
}

template <typename T>
std::set<T> enum_set(const json& values, std::optional<T> (*parse)(std::string_view) noexcept) {
  std::set<T> out;
  for (const auto& v : values) out.insert(*parse(v.get<std::string>()));
  return out;
}

std::set<sparql::QueryForm> keep_forms(const PipelineSpec& spec) {
  for (const auto& c : spec.operators) {
    if (c.kind == OperatorKind::Extract) return enum_set(c.params.at("keep_forms"), &sparql::parse_query_form);
  }
  return default_keep_forms();
}

std::chrono::milliseconds minutes(double m) {
  return std::chrono::milliseconds(static_cast<std::int64_t>(m * 60000.0 + 0.5));
}

void set_parse(CuratedQuery& q) {
  auto r = sparql::parse_query(q.text);
  if (sparql::parsed_ok(r)) {
    q.parse = std::get<sparql::ParsedQuery>(std::move(r));
    q.features = sparql::extract_features(*q.parsed());
  } else {
    q.parse = std::get<std::vector<sparql::SyntaxIssue>>(std::move(r));
    q.features.reset();
  }
}

StageOutput keep_all(OperatorKind op, std::vector<CuratedQuery> in, const std::vector<std::string>& labels, Instant at) {
  std::vector<bool> keep(in.size(), true);
  return partition(op, std::move(in), keep, labels, at);
}

StageOutput format_convert(std::vector<CuratedQuery> in, Instant at) {
  std::vector<std::string> labels(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    set_parse(in[i]);
    labels[i] = in[i].parsed() ? "Parsed" : "ParseFailed";
  }
  return keep_all(OperatorKind::FormatConvert, std::move(in), labels, at);
}

StageOutput syntactic_correct(std::vector<CuratedQuery> in, Instant at) {
  std::vector<bool> keep(in.size());
  std::vector<std::string> labels(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto& q = in[i];
    if (std::holds_alternative<Unparsed>(q.parse)) set_parse(q);
    if (q.parsed()) {
      keep[i] = true;
      labels[i] = "Valid";
      continue;
    }
    auto fix = sparql::correct_syntax(q.text);
    if (fix.parses() && fix.repaired()) {
      q.text = std::move(fix.text);
      set_parse(q);
    }
    keep[i] = q.parsed() != nullptr;
    labels[i] = keep[i] ? "Repaired" : "Unrepairable";
  }
  return partition(OperatorKind::SyntacticCorrector, std::move(in), keep, labels, at);
}

StageOutput semantic_correct(std::vector<CuratedQuery> in, const sparql::ReferenceVocabulary& vocab,
                             std::size_t max_distance, Instant at) {
  std::vector<bool> keep(in.size());
  std::vector<std::string> labels(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto& q = in[i];
    if (std::holds_alternative<Unparsed>(q.parse)) set_parse(q);
    if (!q.parsed()) {
      labels[i] = "Unrepaired";
      continue;
    }
    if (sparql::check_semantics(*q.parsed(), vocab).empty()) {
      keep[i] = true;
      labels[i] = "Clean";
      continue;
    }
    auto fix = sparql::correct_semantics(*q.parsed(), vocab, max_distance);
    if (fix.changed()) {
      auto text = sparql::apply_repairs(q.text, fix.repairs);
      auto r = sparql::parse_query(text);
      if (sparql::parsed_ok(r) && sparql::check_semantics(std::get<sparql::ParsedQuery>(r), vocab).empty()) {
        q.text = std::move(text);
        set_parse(q);
        keep[i] = true;
        labels[i] = "Repaired";
        continue;
      }
    }
    labels[i] = "Unrepaired";
  }
  return partition(OperatorKind::SemanticCorrector, std::move(in), keep, labels, at);
}

StageOutput topic_stage(std::vector<CuratedQuery> in, const TopicReferenceBase& base, const json& keep_param,
                        Instant at) {
  auto topics = cluster_topics(in, base);
  std::set<std::string> keep;
  if (keep_param.is_null()) {
    for (const auto& [id, t] : topics) keep.insert(t);
  } else {
    for (const auto& v : keep_param) keep.insert(v.get<std::string>());
  }
  return filter_topics(std::move(in), topics, keep, at);
}

StageOutput join_stage(std::vector<CuratedQuery> in, const Context& ctx, double theta, Instant at) {
  const auto& primary = ctx.logs.front();
  std::unordered_map<QueryId, std::string> matched;
  QueryLog target{primary.id, primary.source_dataset, in};
  for (std::size_t d = 1; d < ctx.logs.size(); ++d) {
    for (const auto& pair : join_logs(target, ctx.logs[d], theta)) matched.emplace(pair.a, "Joined:" + ctx.logs[d].id);
  }
  std::vector<std::string> labels(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (auto it = matched.find(in[i].id); it != matched.end()) labels[i] = it->second;
  }
  return keep_all(OperatorKind::LogsJoin, std::move(in), labels, at);
}

StageOutput execute(const OperatorConfig& c, std::vector<CuratedQuery> in, Context& ctx, Instant at) {
  const auto& p = c.params;
  switch (c.kind) {
    case OperatorKind::Extract: return keep_all(c.kind, std::move(in), {}, at);
    case OperatorKind::FormatConvert: return format_convert(std::move(in), at);
    case OperatorKind::RobotCleaner: {
      RobotConfig cfg;
      cfg.rate_threshold = p.at("rate_threshold").get<double>();
      cfg.regularity_cv = p.at("regularity_cv").get<double>();
      cfg.agent_patterns = p.at("agent_patterns").get<std::vector<std::string>>();
      cfg.min_session_length = p.at("min_session_length").get<std::size_t>();
      cfg.gap = minutes(p.at("session_gap_minutes").get<double>());
      return clean_robots(std::move(in), cfg, at);
    }
    case OperatorKind::BusinessAcademic:
      return filter_origin(std::move(in), ctx.kb, enum_set(p.at("keep"), &parse_origin_category), at);
    case OperatorKind::VulnerableEliminator: return eliminate_vulnerable(std::move(in), ctx.kb, at);
    case OperatorKind::Deduplicator:
      return deduplicate(std::move(in), *parse_dedup_mode(p.at("mode").get<std::string>()), at);
    case OperatorKind::SyntacticCorrector: return syntactic_correct(std::move(in), at);
    case OperatorKind::SemanticCorrector:
      return semantic_correct(std::move(in), ctx.vocab, p.at("max_distance").get<std::size_t>(), at);
    case OperatorKind::TopicClustering: return topic_stage(std::move(in), ctx.topics, p.at("keep"), at);
    case OperatorKind::SchemaRanking: return rank_schema(std::move(in), p.at("theta").get<double>(), at);
    case OperatorKind::ComplexityFilter: {
      const auto& max = p.at("max_depth");
      return filter_complexity(std::move(in), enum_set(p.at("shapes"), &sparql::parse_query_shape),
                               p.at("min_depth").get<std::size_t>(),
                               max.is_null() ? kUnboundedDepth : max.get<std::size_t>(), at);
    }
    case OperatorKind::ExpertiseFilter:
      return filter_expertise(std::move(in), enum_set(p.at("keep"), &parse_expertise_level),
                              minutes(p.at("session_gap_minutes").get<double>()), at);
    case OperatorKind::AnalyticSelector:
      return select_analytic(std::move(in), *parse_analytic_keep(p.at("keep").get<std::string>()), at);
    case OperatorKind::LogsJoin: return join_stage(std::move(in), ctx, p.at("theta").get<double>(), at);
    case OperatorKind::LogsEnrichment: {
      const auto& primary = ctx.logs.front();
      auto r = enrich_log(QueryLog{primary.id, primary.source_dataset, std::move(in)}, ctx.donors(),
                          p.at("theta").get<double>(), at);
      return StageOutput{std::move(r.outcome), std::move(r.log.entries), std::move(r.rejected)};
    }
    case OperatorKind::Load: {
      ctx.store->load_queries(in, ctx.spec->run_id);
      return keep_all(c.kind, std::move(in), {}, at);
    }
  }
  throw Error(ErrorCode::UnknownOperator, std::string(to_string(c.kind)));
}

QuerySnapshot snapshot(const CuratedQuery& q, const Context& ctx) {
  QuerySnapshot s{q.id, q.source_log, std::nullopt, q.annotations};
  auto it = ctx.originals.find(q.id);
  if (it == ctx.originals.end() || it->second->text != q.text) s.text = q.text;
  return s;
}

CuratedQuery restore(const QuerySnapshot& s, const Context& ctx) {
  auto it = ctx.originals.find(s.id);
  if (it == ctx.originals.end()) {
    throw Error(ErrorCode::MissingCheckpoint, "checkpointed query " + s.id.value + " is absent from the run inputs");
  }
  CuratedQuery q = *it->second;
  q.source_log = s.source_log;
  if (s.text) q.text = *s.text;
  q.annotations = s.annotations;
  const bool converted = std::any_of(q.annotations.begin(), q.annotations.end(),
                                     [](const TrustAnnotation& a) { return a.op == OperatorKind::FormatConvert; });
  if (converted) set_parse(q);
  return q;
}

CurationResult execute_from(Context& ctx, std::size_t start, std::vector<CuratedQuery> current,
                            std::vector<OperatorOutcome> outcomes, const RunObserver& observer) {
  const auto& spec = *ctx.spec;
  for (std::size_t i = start; i < spec.operators.size(); ++i) {
    const auto& c = spec.operators[i];
    const std::string stage(to_string(c.kind));
    if (observer.stage_started) observer.stage_started(i, c.kind);
    StageOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = execute(c, std::move(current), ctx, now_ms());
    } catch (const Error& e) {
      throw Error(ErrorCode::StageFailure, stage + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::StageFailure, stage + ": " + e.what());
    }
    out.outcome.duration =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    Checkpoint cp;
    cp.outcome = out.outcome;
    for (const auto& q : out.trusted) cp.trusted.push_back(snapshot(q, ctx));
    for (const auto& q : out.untrusted) cp.untrusted.push_back(snapshot(q, ctx));
    ctx.store->write_checkpoint(spec.run_id, stage, cp);
    if (observer.stage_finished) observer.stage_finished(i, out.outcome);
    outcomes.push_back(std::move(out.outcome));
    current = std::move(out.trusted);
  }

  CurationResult result;
  result.run_id = spec.run_id;
  for (const auto& c : spec.operators) result.order.push_back(c.kind);
  result.stats = accumulate(spec.run_id, outcomes);
  result.trusted = std::move(current);
  result.reused_stages = start;
  if (spec.output.path) load_to_file(result.trusted, *spec.output.path, spec.output.format);
  if (spec.output.stats) emit_stats(result.stats, *spec.output.stats);
  ctx.store->finish_run(spec.run_id, now_ms());
  return result;
}

}  // namespace

CurationResult run_pipeline(const PipelineSpec& raw, Store& store, const RunObserver& observer) {
  const auto spec = validate_pipeline(raw);
  Context ctx;
  ctx.spec = &spec;
  ctx.store = &store;
  load_knowledge(ctx, spec);

  const auto forms = keep_forms(spec);
  std::size_t lines = 0, rejected = 0, line_errors = 0;
  for (const auto& in : spec.inputs) {
    auto ex = extract_log(in.path, in.format, in.id, in.source_dataset, forms);
    if (ctx.logs.empty()) {
      lines = ex.lines;
      rejected = ex.rejected;
      line_errors = ex.line_errors.size();
    }
    ctx.logs.push_back(std::move(ex.log));
  }
  ctx.index_originals();

  store.begin_run(spec.run_id, pipeline_to_yaml(spec), now_ms());
  store.clear_checkpoints(spec.run_id);
  store.save_inputs(spec.run_id, ctx.logs);

  auto result = execute_from(ctx, 0, ctx.logs.front().entries, {}, observer);
  result.lines_read = lines;
  result.rejected_entries = rejected;
  result.line_errors = line_errors;
  return result;
}

CurationResult run_pipeline(const PipelineSpec& spec, const RunObserver& observer) {
  Store store(spec.store.value_or(std::filesystem::path{}));
  return run_pipeline(spec, store, observer);
}

CurationResult resume(Store& store, const std::string& run_id, std::optional<OperatorKind> from_stage,
                      const RunObserver& observer) {
  const auto record = store.read_run(run_id);
  if (!record) throw Error(ErrorCode::MissingCheckpoint, "unknown run '" + run_id + "'");
  const auto spec = validate_pipeline(parse_pipeline(record->spec_yaml));
  Context ctx;
  ctx.spec = &spec;
  ctx.store = &store;
  ctx.logs = store.read_inputs(run_id);
  if (ctx.logs.empty()) throw Error(ErrorCode::MissingCheckpoint, "run '" + run_id + "' has no stored inputs");
  ctx.index_originals();

  const auto n = spec.operators.size();
  std::size_t start = 0;
  if (from_stage) {
    auto it = std::find_if(spec.operators.begin(), spec.operators.end(),
                           [&](const OperatorConfig& c) { return c.kind == *from_stage; });
    if (it == spec.operators.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(*from_stage)) + " is not a stage of run '" + run_id + "'");
    }
    start = static_cast<std::size_t>(it - spec.operators.begin());
  } else {
    while (start < n && store.has_checkpoint(run_id, std::string(to_string(spec.operators[start].kind)))) ++start;
  }

  std::vector<OperatorOutcome> outcomes;
  std::optional<Checkpoint> last;
  for (std::size_t i = 0; i < start; ++i) {
    last = store.read_checkpoint(run_id, std::string(to_string(spec.operators[i].kind)));
    outcomes.push_back(last->outcome);
  }
  std::vector<CuratedQuery> current;
  if (last) {
    for (const auto& s : last->trusted) current.push_back(restore(s, ctx));
  } else {
    current = ctx.logs.front().entries;
  }

  if (start == n) {
    CurationResult result;
    result.run_id = run_id;
    for (const auto& c : spec.operators) result.order.push_back(c.kind);
    result.stats = accumulate(run_id, outcomes);
    result.trusted = std::move(current);
    result.reused_stages = n;
    return result;
  }
  load_knowledge(ctx, spec);
  return execute_from(ctx, start, std::move(current), std::move(outcomes), observer);
}

}  // namespace tcurator
