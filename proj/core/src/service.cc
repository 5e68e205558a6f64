#include "ghosteval/service.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "ghosteval/error.h"
#include "json.hpp"

namespace ghosteval {

namespace {

using nlohmann::ordered_json;

std::string make_ack(const std::string& assignment_id, std::uint64_t sequence,
                     std::size_t records) {
  ordered_json ack;
  ack["assignment_id"] = assignment_id;
  ack["status"] = "accepted";
  ack["sequence"] = sequence;
  ack["records"] = records;
  return ack.dump();
}

ordered_json parse_object(std::string_view text, const char* what) {
  try {
    auto j = ordered_json::parse(text);
    if (!j.is_object()) throw Error(ErrorKind::kValidation, std::string(what) + " must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string(what) + ": " + e.what());
  }
}

std::vector<std::size_t> eligible_lines(const LineGradingTask& task) {
  std::vector<std::size_t> out;
  const std::size_t first = task.task == LineTask::kCoherence ? 1 : 0;
  for (std::size_t i = first; i < task.lines.size(); ++i) out.push_back(i);
  return out;
}

std::string joined(const std::vector<std::size_t>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(items[i]);
  }
  return out;
}

}  // namespace

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kStyle: return "style";
    case TaskKind::kFluency: return "fluency";
    case TaskKind::kCoherence: return "coherence";
  }
  return "style";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  if (name == "style") return TaskKind::kStyle;
  if (name == "fluency") return TaskKind::kFluency;
  if (name == "coherence") return TaskKind::kCoherence;
  return std::nullopt;
}

std::string utc_timestamp_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t secs = system_clock::to_time_t(now);
  const auto ms =
      duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

Roster Roster::from_json(std::string_view text) {
  const auto j = parse_object(text, "roster");
  Roster roster;
  try {
    for (const auto& a : j.at("annotators")) {
      roster.annotators.push_back(
          {a.at("id").get<std::string>(), a.at("token").get<std::string>()});
    }
    roster.admin_token = j.value("admin_token", "");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("roster: ") + e.what());
  }
  return roster;
}

std::string Roster::to_json() const {
  ordered_json j;
  j["annotators"] = ordered_json::array();
  for (const auto& a : annotators) {
    j["annotators"].push_back({{"id", a.id}, {"token", a.token}});
  }
  j["admin_token"] = admin_token;
  return j.dump(2);
}

std::string TaskPlan::to_json() const {
  ordered_json j;
  j["pages"] = ordered_json::parse(
      pages_to_json([this] {
        std::vector<StyleMatchPage> out;
        for (const auto& p : pages) out.push_back(p.page);
        return out;
      }()));
  for (std::size_t i = 0; i < pages.size(); ++i) {
    j["pages"][i]["eval_lines"] = pages[i].eval_lines;
    j["pages"][i]["choice_lines"] = pages[i].choice_lines;
  }
  j["line_tasks"] = ordered_json::array();
  for (const auto& t : line_tasks) {
    ordered_json item;
    item["task"] = line_task_name(t.task);
    item["verse_id"] = t.verse_id;
    item["lines"] = t.lines;
    j["line_tasks"].push_back(std::move(item));
  }
  return j.dump(1) + "\n";
}

TaskPlan TaskPlan::from_json(std::string_view text) {
  const auto j = parse_object(text, "task plan");
  TaskPlan plan;
  try {
    const auto pages = pages_from_json(j.at("pages").dump());
    for (std::size_t i = 0; i < pages.size(); ++i) {
      StylePageTask task;
      task.page = pages[i];
      task.eval_lines =
          j.at("pages")[i].at("eval_lines").get<std::vector<std::string>>();
      task.choice_lines = j.at("pages")[i]
                              .at("choice_lines")
                              .get<std::vector<std::vector<std::string>>>();
      if (task.choice_lines.size() != task.page.choices.size()) {
        throw Error(ErrorKind::kValidation,
                    "task plan: choice text count mismatch on " +
                        task.page.page_id);
      }
      plan.pages.push_back(std::move(task));
    }
    for (const auto& item : j.at("line_tasks")) {
      LineGradingTask t;
      const auto name = item.at("task").get<std::string>();
      if (name != "fluency" && name != "coherence") {
        throw Error(ErrorKind::kValidation, "task plan: bad task " + name);
      }
      t.task = name == "fluency" ? LineTask::kFluency : LineTask::kCoherence;
      t.verse_id = item.at("verse_id").get<std::string>();
      t.lines = item.at("lines").get<std::vector<std::string>>();
      plan.line_tasks.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("task plan: ") + e.what());
  }
  return plan;
}

namespace {

std::vector<std::string> verse_lines_text(const Verse& verse) {
  std::vector<std::string> out;
  for (const auto& line : verse.lines) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) text.push_back(' ');
      text += line[i];
    }
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace

TaskPlan make_task_plan(const std::vector<StyleMatchPage>& pages,
                        const std::map<std::string, Verse>& verses_by_id,
                        const std::vector<Verse>& line_task_verses) {
  auto lookup = [&verses_by_id](const std::string& id) -> const Verse& {
    auto it = verses_by_id.find(id);
    if (it == verses_by_id.end()) {
      throw Error(ErrorKind::kNotFound, "unknown verse id '" + id + "'");
    }
    return it->second;
  };
  TaskPlan plan;
  for (const auto& page : pages) {
    StylePageTask task;
    task.page = page;
    task.eval_lines = verse_lines_text(lookup(page.eval_verse_id));
    for (const auto& c : page.choices) {
      task.choice_lines.push_back(verse_lines_text(lookup(c.verse_id)));
    }
    plan.pages.push_back(std::move(task));
  }
  for (const auto& verse : line_task_verses) {
    for (LineTask kind : {LineTask::kFluency, LineTask::kCoherence}) {
      plan.line_tasks.push_back({kind, verse.verse_id, verse_lines_text(verse)});
    }
  }
  return plan;
}

std::vector<TaskAssignment> assign_round_robin(const TaskPlan& plan,
                                               const Roster& roster) {
  const std::size_t r = roster.annotators.size();
  if (r < 2) {
    throw Error(ErrorKind::kValidation,
                "roster needs at least two annotators, has " + std::to_string(r));
  }
  std::vector<TaskAssignment> out;
  std::size_t task_no = 0;
  auto add = [&](TaskKind kind, std::size_t item) {
    for (std::size_t slot = 0; slot < 2; ++slot) {
      TaskAssignment a;
      a.assignment_id = "asg-" + std::to_string(out.size());
      a.annotator_id = roster.annotators[(2 * task_no + slot) % r].id;
      a.kind = kind;
      a.item = item;
      out.push_back(std::move(a));
    }
    ++task_no;
  };
  for (std::size_t i = 0; i < plan.pages.size(); ++i) add(TaskKind::kStyle, i);
  for (std::size_t i = 0; i < plan.line_tasks.size(); ++i) {
    add(plan.line_tasks[i].task == LineTask::kFluency ? TaskKind::kFluency
                                                      : TaskKind::kCoherence,
        i);
  }
  return out;
}

AnnotationService::AnnotationService(TaskPlan plan, Roster roster,
                                     std::filesystem::path log_path,
                                     Clock clock)
    : plan_(std::move(plan)),
      roster_(std::move(roster)),
      log_path_(std::move(log_path)),
      clock_(clock ? std::move(clock) : Clock(utc_timestamp_now)) {
  std::set<std::string> ids;
  std::set<std::string> tokens;
  for (const auto& a : roster_.annotators) {
    if (a.id.empty() || a.token.empty() || !ids.insert(a.id).second ||
        !tokens.insert(a.token).second) {
      throw Error(ErrorKind::kValidation,
                  "roster entries need unique non-empty ids and tokens");
    }
  }
  assignments_ = assign_round_robin(plan_, roster_);
  for (std::size_t i = 0; i < assignments_.size(); ++i) {
    assignment_index_.emplace(assignments_[i].assignment_id, i);
    by_annotator_[assignments_[i].annotator_id].push_back(i);
  }
  replay();
  const int fd = ::open(log_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::kInternal, "cannot open annotation log " +
                                          log_path_.string() + ": " +
                                          std::strerror(errno));
  }
  ::close(fd);
}

const Annotator& AnnotationService::authenticate(std::string_view token) const {
  for (const auto& a : roster_.annotators) {
    if (a.token == token) return a;
  }
  throw Error(ErrorKind::kAuth, "unknown annotator token");
}

bool AnnotationService::is_admin(std::string_view token) const {
  return !roster_.admin_token.empty() && token == roster_.admin_token;
}

std::string AnnotationService::payload_for(const TaskAssignment& a) const {
  ordered_json j;
  j["assignment_id"] = a.assignment_id;
  j["kind"] = task_kind_name(a.kind);
  if (a.kind == TaskKind::kStyle) {
    const StylePageTask& page = plan_.pages[a.item];
    j["eval"] = {{"lines", page.eval_lines}};
    j["choices"] = ordered_json::array();
    for (std::size_t c = 0; c < page.choice_lines.size(); ++c) {
      j["choices"].push_back({{"index", c}, {"lines", page.choice_lines[c]}});
    }
  } else {
    const LineGradingTask& task = plan_.line_tasks[a.item];
    j["lines"] = task.lines;
    j["eligible_lines"] = eligible_lines(task);
  }
  return j.dump();
}

std::optional<std::string> AnnotationService::next_task(
    std::string_view annotator_token) const {
  std::shared_lock lock(mu_);
  const Annotator& who = authenticate(annotator_token);
  auto it = by_annotator_.find(who.id);
  if (it == by_annotator_.end()) return std::nullopt;
  for (std::size_t idx : it->second) {
    if (!assignments_[idx].submitted) return payload_for(assignments_[idx]);
  }
  return std::nullopt;
}

std::string AnnotationService::submit(std::string_view annotator_token,
                                      std::string_view payload) {
  const auto body = parse_object(payload, "submission");
  std::unique_lock lock(mu_);
  const Annotator& who = authenticate(annotator_token);

  if (!body.contains("assignment_id") || !body["assignment_id"].is_string()) {
    throw Error(ErrorKind::kValidation, "submission lacks assignment_id");
  }
  const auto assignment_id = body["assignment_id"].get<std::string>();
  auto found = assignment_index_.find(assignment_id);
  if (found == assignment_index_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown assignment " + assignment_id);
  }
  TaskAssignment& assignment = assignments_[found->second];
  if (assignment.annotator_id != who.id) {
    throw Error(ErrorKind::kForbidden,
                "assignment " + assignment_id + " belongs to another annotator");
  }
  if (assignment.submitted) {
    return submissions_[submission_by_assignment_.at(assignment_id)].ack;
  }

  const std::string timestamp = clock_();
  std::vector<std::string> records;
  if (assignment.kind == TaskKind::kStyle) {
    const StylePageTask& page = plan_.pages[assignment.item];
    if (!body.contains("chosen_index") ||
        !body["chosen_index"].is_number_integer()) {
      throw Error(ErrorKind::kValidation, "style submission needs chosen_index");
    }
    const auto chosen = body["chosen_index"].get<std::int64_t>();
    if (chosen < 0 || static_cast<std::size_t>(chosen) >= page.page.choices.size()) {
      throw Error(ErrorKind::kValidation,
                  "chosen_index " + std::to_string(chosen) + " out of range");
    }
    StyleMatchAnnotation r{page.page.page_id, who.id,
                           static_cast<std::size_t>(chosen), timestamp};
    records.push_back(to_jsonl(r));
  } else {
    const LineGradingTask& task = plan_.line_tasks[assignment.item];
    if (!body.contains("labels") || !body["labels"].is_array()) {
      throw Error(ErrorKind::kValidation, "line submission needs labels");
    }
    std::map<std::size_t, Label> labels;
    for (const auto& item : body["labels"]) {
      if (!item.is_object() || !item.contains("line_index") ||
          !item["line_index"].is_number_unsigned() || !item.contains("label") ||
          !item["label"].is_string()) {
        throw Error(ErrorKind::kValidation,
                    "each label needs line_index and label");
      }
      const auto line = item["line_index"].get<std::size_t>();
      const auto label = parse_label(item["label"].get<std::string>());
      if (!label) {
        throw Error(ErrorKind::kValidation,
                    "bad label on line " + std::to_string(line));
      }
      const auto eligible = eligible_lines(task);
      if (std::find(eligible.begin(), eligible.end(), line) == eligible.end()) {
        throw Error(ErrorKind::kValidation,
                    "line " + std::to_string(line) + " is not gradable");
      }
      if (!labels.emplace(line, *label).second) {
        throw Error(ErrorKind::kValidation,
                    "line " + std::to_string(line) + " labelled twice");
      }
    }
    std::vector<std::size_t> missing;
    for (std::size_t line : eligible_lines(task)) {
      if (!labels.contains(line)) missing.push_back(line);
    }
    if (!missing.empty()) {
      throw MissingLinesError("missing labels for lines: " + joined(missing),
                              missing);
    }
    for (const auto& [line, label] : labels) {
      LineAnnotation r{task.task, task.verse_id, line, who.id, label, timestamp};
      records.push_back(to_jsonl(r));
    }
  }

  const std::uint64_t sequence = submissions_.size();
  ordered_json entry;
  entry["sequence"] = sequence;
  entry["assignment_id"] = assignment_id;
  entry["records"] = ordered_json::array();
  for (const auto& r : records) entry["records"].push_back(ordered_json::parse(r));
  append_durably(entry.dump());

  Submission s;
  s.sequence = sequence;
  s.assignment_id = assignment_id;
  s.kind = assignment.kind;
  s.ack = make_ack(assignment_id, sequence, records.size());
  s.records = std::move(records);
  submission_by_assignment_.emplace(assignment_id, submissions_.size());
  submissions_.push_back(std::move(s));
  assignment.submitted = true;
  return submissions_.back().ack;
}

void AnnotationService::append_durably(const std::string& line) {
  const std::string data = line + "\n";
  const int fd = ::open(log_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::kInternal, "cannot open annotation log " +
                                          log_path_.string() + ": " +
                                          std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw Error(ErrorKind::kInternal,
                  std::string("annotation log write failed: ") + std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw Error(ErrorKind::kInternal,
                std::string("annotation log fsync failed: ") + std::strerror(err));
  }
  ::close(fd);
}

void AnnotationService::replay() {
  std::ifstream in(log_path_, std::ios::binary);
  if (!in) return;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  const bool ends_with_newline = [&] {
    std::ifstream tail(log_path_, std::ios::binary | std::ios::ate);
    const auto size = tail.tellg();
    if (size <= 0) return true;
    tail.seekg(-1, std::ios::end);
    return tail.get() == '\n';
  }();

  std::uintmax_t offset = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::uintmax_t line_start = offset;
    offset += lines[i].size() + 1;
    // A final line without its newline is a torn write that was never
    // acknowledged; cut it so later appends start on a fresh line.
    if (i + 1 == lines.size() && !ends_with_newline) {
      in.close();
      std::filesystem::resize_file(log_path_, line_start);
      break;
    }
    if (lines[i].empty()) continue;
    ordered_json entry;
    try {
      entry = ordered_json::parse(lines[i]);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::kValidation,
                  "corrupt annotation log line " + std::to_string(i + 1));
    }
    const auto assignment_id = entry.at("assignment_id").get<std::string>();
    auto found = assignment_index_.find(assignment_id);
    if (found == assignment_index_.end()) {
      throw Error(ErrorKind::kValidation,
                  "annotation log names unknown assignment " + assignment_id);
    }
    TaskAssignment& a = assignments_[found->second];
    if (a.submitted) continue;
    Submission s;
    s.sequence = submissions_.size();
    s.assignment_id = assignment_id;
    s.kind = a.kind;
    for (const auto& r : entry.at("records")) s.records.push_back(r.dump());
    s.ack = make_ack(assignment_id, s.sequence, s.records.size());
    submission_by_assignment_.emplace(assignment_id, submissions_.size());
    submissions_.push_back(std::move(s));
    a.submitted = true;
  }
}

std::string AnnotationService::export_jsonl(std::optional<TaskKind> task) const {
  std::shared_lock lock(mu_);
  std::string out;
  for (const auto& s : submissions_) {
    if (task && s.kind != *task) continue;
    for (const auto& r : s.records) {
      out += r;
      out.push_back('\n');
    }
  }
  return out;
}

Progress AnnotationService::progress() const {
  std::shared_lock lock(mu_);
  Progress p;
  p.total = assignments_.size();
  p.submitted = submissions_.size();
  return p;
}

Progress AnnotationService::progress(std::string_view annotator_token) const {
  std::shared_lock lock(mu_);
  const Annotator& who = authenticate(annotator_token);
  Progress p;
  auto it = by_annotator_.find(who.id);
  if (it == by_annotator_.end()) return p;
  for (std::size_t idx : it->second) {
    ++p.total;
    if (assignments_[idx].submitted) ++p.submitted;
  }
  return p;
}

std::vector<TaskAssignment> AnnotationService::assignments() const {
  std::shared_lock lock(mu_);
  return assignments_;
}

}  // namespace ghosteval
