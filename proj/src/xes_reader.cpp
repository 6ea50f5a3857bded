#include <zlib.h>

#include <cstring>

#include "actorcast/errors.hpp"
#include "xes_parser.hpp"

namespace actorcast {

namespace {

const XML_Char* attribute(const XML_Char** attrs, const char* name) {
  for (size_t i = 0; attrs[i]; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return nullptr;
}

bool is_attribute_element(const std::string& name) {
  return name == "string" || name == "date" || name == "int" || name == "float" || name == "boolean" ||
         name == "id";
}

}  // namespace

XesParser::XesParser(const ParseOptions& options) : options_(options), parser_(XML_ParserCreate(nullptr)) {
  if (!parser_) throw std::runtime_error("xes: cannot allocate XML parser");
  XML_SetUserData(parser_, this);
  XML_SetElementHandler(parser_, &XesParser::on_start, &XesParser::on_end);
}

XesParser::~XesParser() { XML_ParserFree(parser_); }

void XesParser::on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
  static_cast<XesParser*>(self)->start_element(name, attrs);
}

void XesParser::on_end(void* self, const XML_Char* name) { static_cast<XesParser*>(self)->end_element(name); }

void XesParser::start_element(const std::string& name, const XML_Char** attrs) {
  const std::string parent = stack_.empty() ? std::string() : stack_.back();
  stack_.push_back(name);
  if (name == "trace" && parent == "log") {
    trace_name_.reset();
    trace_events_.clear();
    return;
  }
  if (name == "event" && parent == "trace") {
    PendingEvent pending;
    pending.line = static_cast<size_t>(XML_GetCurrentLineNumber(parser_));
    trace_events_.push_back(std::move(pending));
    return;
  }
  if (!is_attribute_element(name)) return;
  const XML_Char* key = attribute(attrs, "key");
  const XML_Char* value = attribute(attrs, "value");
  if (!key || !value) return;
  if (parent == "trace" && std::strcmp(key, "concept:name") == 0) {
    trace_name_ = value;
  } else if (parent == "event" && stack_.size() >= 3 && stack_[stack_.size() - 3] == "trace") {
    PendingEvent& e = trace_events_.back();
    if (std::strcmp(key, "concept:name") == 0) {
      e.activity = value;
    } else if (std::strcmp(key, "time:timestamp") == 0) {
      e.timestamp = value;
    } else if (std::strcmp(key, "org:resource") == 0) {
      e.resource = value;
    }
  }
}

void XesParser::end_element(const std::string& name) {
  stack_.pop_back();
  if (name != "trace" || stack_.empty() || stack_.back() != "log") return;

  std::string case_id;
  if (trace_name_ && !trace_name_->empty()) {
    case_id = *trace_name_;
  } else {
    case_id = "trace_" + std::to_string(trace_index_);
    ++report_.synthesized_case_ids;
    report_.warnings.push_back("trace #" + std::to_string(trace_index_) +
                               " has no concept:name; using '" + case_id + "'");
  }
  ++trace_index_;

  for (PendingEvent& pending : trace_events_) {
    ++report_.records_read;
    if (!pending.activity || pending.activity->empty()) {
      record_row_error(report_, pending.line, "event without concept:name");
      continue;
    }
    if (!pending.timestamp) {
      record_row_error(report_, pending.line, "event without time:timestamp");
      continue;
    }
    const auto ts = parse_timestamp_field(*pending.timestamp, options_);
    if (!ts) {
      record_row_error(report_, pending.line, "unparseable timestamp '" + *pending.timestamp + "'");
      continue;
    }
    Event e;
    e.case_id = case_id;
    e.activity = std::move(*pending.activity);
    e.timestamp = *ts;
    if (pending.resource && !pending.resource->empty()) {
      e.resource = std::move(*pending.resource);
    } else {
      e.resource = kUnknownResource;
      ++report_.unknown_resources;
    }
    events_.push_back(std::move(e));
  }
  trace_events_.clear();
}

void XesParser::feed(const char* data, size_t size, bool final) {
  if (XML_Parse(parser_, data, static_cast<int>(size), final ? 1 : 0) == XML_STATUS_ERROR) {
    throw DataError("xes: malformed XML at line " + std::to_string(XML_GetCurrentLineNumber(parser_)) + ": " +
                    XML_ErrorString(XML_GetErrorCode(parser_)));
  }
}

ParsedLog XesParser::finish() {
  enforce_error_budget(report_, options_);
  ParsedLog result;
  result.report = std::move(report_);
  result.log = EventLog(std::move(events_), options_.source_name);
  return result;
}

ParsedLog parse_xes_gz_file(const std::string& path, const ParseOptions& options) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (!file) throw DataError("cannot open log '" + path + "'");
  XesParser parser(options);
  std::vector<char> buffer(1 << 16);
  try {
    for (;;) {
      const int got = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()));
      if (got < 0) throw DataError("xes: gzip read error in '" + path + "'");
      if (got == 0) break;
      parser.feed(buffer.data(), static_cast<size_t>(got), false);
    }
    parser.feed(nullptr, 0, true);
  } catch (...) {
    gzclose(file);
    throw;
  }
  gzclose(file);
  return parser.finish();
}

}  // namespace actorcast
