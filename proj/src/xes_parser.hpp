#pragma once

#include <expat.h>

#include <optional>
#include <string>
#include <vector>

#include "actorcast/event_log.hpp"

namespace actorcast {

void record_row_error(IngestReport& report, size_t line, std::string message);
void enforce_error_budget(const IngestReport& report, const ParseOptions& options);
std::optional<Timestamp> parse_timestamp_field(std::string_view text, const ParseOptions& options);

/// Incremental XES reader on top of expat. Only attributes that are direct
/// children of <trace> or <event> are read; <global> defaults are ignored.
class XesParser {
 public:
  explicit XesParser(const ParseOptions& options);
  ~XesParser();
  XesParser(const XesParser&) = delete;
  XesParser& operator=(const XesParser&) = delete;

  void feed(const char* data, size_t size, bool final);
  ParsedLog finish();

 private:
  struct PendingEvent {
    std::optional<std::string> activity;
    std::optional<std::string> timestamp;
    std::optional<std::string> resource;
    size_t line = 0;
  };

  static void on_start(void* self, const XML_Char* name, const XML_Char** attrs);
  static void on_end(void* self, const XML_Char* name);
  void start_element(const std::string& name, const XML_Char** attrs);
  void end_element(const std::string& name);

  ParseOptions options_;
  XML_Parser parser_;
  std::vector<std::string> stack_;
  size_t trace_index_ = 0;
  std::optional<std::string> trace_name_;
  std::vector<PendingEvent> trace_events_;
  std::vector<Event> events_;
  IngestReport report_;
};

ParsedLog parse_xes_gz_file(const std::string& path, const ParseOptions& options);

}  // namespace actorcast
