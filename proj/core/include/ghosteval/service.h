// Annotation service core: serves blind tasks to rostered annotators,
// persists submissions to an append-only log (fsync before ack) and exports
// the accepted records as JSONL.

#ifndef GHOSTEVAL_SERVICE_H_
#define GHOSTEVAL_SERVICE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ghosteval/annotation.h"
#include "ghosteval/error.h"
#include "ghosteval/verse.h"

namespace ghosteval {

/// Validation failure of a line-grading submission that left eligible lines
/// unlabelled.
class MissingLinesError : public Error {
 public:
  MissingLinesError(const std::string& message, std::vector<std::size_t> lines)
      : Error(ErrorKind::kValidation, message), lines_(std::move(lines)) {}

  const std::vector<std::size_t>& lines() const { return lines_; }

 private:
  std::vector<std::size_t> lines_;
};

struct Annotator {
  std::string id;
  /// Bearer token presented by the annotator's client.
  std::string token;
};

struct Roster {
  std::vector<Annotator> annotators;
  std::string admin_token;

  static Roster from_json(std::string_view json);
  std::string to_json() const;
};

enum class TaskKind { kStyle, kFluency, kCoherence };

std::string_view task_kind_name(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view name);

struct StylePageTask {
  StyleMatchPage page;
  std::vector<std::string> eval_lines;
  std::vector<std::vector<std::string>> choice_lines;  // parallel to choices
};

struct LineGradingTask {
  LineTask task = LineTask::kFluency;
  std::string verse_id;
  std::vector<std::string> lines;
};

/// Everything the service serves. Written by the `pages` step.
struct TaskPlan {
  std::vector<StylePageTask> pages;
  std::vector<LineGradingTask> line_tasks;

  static TaskPlan from_json(std::string_view json);
  std::string to_json() const;
};

/// Resolves page choices and eval verses to text. Every line-grading verse
/// gets a fluency and a coherence task. Throws Error(kNotFound) for unknown
/// verse ids.
TaskPlan make_task_plan(const std::vector<StyleMatchPage>& pages,
                        const std::map<std::string, Verse>& verses_by_id,
                        const std::vector<Verse>& line_task_verses);

struct TaskAssignment {
  std::string assignment_id;
  std::string annotator_id;
  TaskKind kind = TaskKind::kStyle;
  std::size_t item = 0;  // index into plan.pages or plan.line_tasks
  bool submitted = false;
};

/// Each task goes to two distinct annotators: task t is owned by roster
/// entries (2t) mod R and (2t + 1) mod R. Needs R >= 2.
std::vector<TaskAssignment> assign_round_robin(const TaskPlan& plan,
                                               const Roster& roster);

struct Progress {
  std::size_t total = 0;
  std::size_t submitted = 0;
};

class AnnotationService {
 public:
  using Clock = std::function<std::string()>;

  /// Replays `log_path` if it exists. Throws Error(kValidation) when the
  /// roster has fewer than two annotators or the log is inconsistent with
  /// the plan.
  AnnotationService(TaskPlan plan, Roster roster,
                    std::filesystem::path log_path, Clock clock = {});

  /// Oldest pending assignment of the annotator as a blind JSON payload, or
  /// nullopt when everything is done. Throws Error(kAuth) for an unknown
  /// token.
  std::optional<std::string> next_task(std::string_view annotator_token) const;

  /// Validates and durably appends the submission, returning the ack JSON.
  /// A repeated submission of an already accepted assignment returns the
  /// original ack and appends nothing. `payload` is the request body:
  /// {"assignment_id", "chosen_index"} for style pages,
  /// {"assignment_id", "labels": [{"line_index", "label"}, ...]} otherwise.
  std::string submit(std::string_view annotator_token, std::string_view payload);

  /// Accepted records in submission order; `task` filters by kind.
  std::string export_jsonl(std::optional<TaskKind> task = std::nullopt) const;

  Progress progress() const;
  Progress progress(std::string_view annotator_token) const;

  bool is_admin(std::string_view token) const;

  const TaskPlan& plan() const { return plan_; }
  std::vector<TaskAssignment> assignments() const;

 private:
  struct Submission {
    std::uint64_t sequence = 0;
    std::string assignment_id;
    std::string ack;
    TaskKind kind = TaskKind::kStyle;
    std::vector<std::string> records;  // JSONL lines
  };

  const Annotator& authenticate(std::string_view token) const;
  std::string payload_for(const TaskAssignment& a) const;
  void replay();
  void append_durably(const std::string& line);

  TaskPlan plan_;
  Roster roster_;
  std::filesystem::path log_path_;
  Clock clock_;

  mutable std::shared_mutex mu_;
  std::vector<TaskAssignment> assignments_;
  std::unordered_map<std::string, std::size_t> assignment_index_;
  std::map<std::string, std::vector<std::size_t>> by_annotator_;
  std::vector<Submission> submissions_;
  std::unordered_map<std::string, std::size_t> submission_by_assignment_;
};

/// RFC 3339 UTC time with millisecond precision.
std::string utc_timestamp_now();

}  // namespace ghosteval

#endif  // GHOSTEVAL_SERVICE_H_
