#pragma once

// Line-oriented output records. Every record carries a schema tag; the same
// record renders as
//   text:        <schema> key=value key=value ...
//   csv:         a header row "schema,key,..." whenever the key set changes,
//                then "<schema>,value,..."
//   json-lines:  {"schema":"<schema>","key":value,...}
// See docs/formats.md for the schemas.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxlb/bounds.hpp"
#include "boxlb/construct.hpp"
#include "boxlb/trials.hpp"

namespace boxlb {

enum class Format { text, csv, json_lines };

std::optional<Format> parse_format(std::string_view name);

class Record {
 public:
  explicit Record(std::string schema) : schema_(std::move(schema)) {}

  Record& integer(std::string key, std::uint64_t value);
  Record& number(std::string key, double value);
  /// Emitted verbatim (no quotes in JSON); `value` must be a JSON number.
  Record& decimal(std::string key, std::string value);
  Record& text(std::string key, std::string value);
  Record& flag(std::string key, bool value);

  const std::string& schema() const { return schema_; }

 private:
  friend class RecordWriter;
  enum class Kind { raw, string, boolean };
  struct Entry {
    std::string key;
    std::string value;
    Kind kind;
  };
  std::string schema_;
  std::vector<Entry> entries_;
};

class RecordWriter {
 public:
  RecordWriter(std::ostream& os, Format format) : os_(os), format_(format) {}
  void write(const Record& record);

 private:
  std::ostream& os_;
  Format format_;
  std::vector<std::string> last_header_;
};

/// Shortest round-trip decimal for a double.
std::string format_double(double value);

/// Aligned text rows "d  deletion  grs  new" (no header), or records in the
/// other formats with exact-rational side columns.
void write_table(std::ostream& os, const std::vector<BoundsRow>& rows, Format format);

Record run_record(std::string schema, const Params& params);
Record trial_record(const TrialRecord& rec);
Record summary_record(const TrialStats& stats);

/// Header record, one record per trial in index order, then the summary.
void write_trials(std::ostream& os, const Params& params, const TrialStats& stats,
                  Format format);

}  // namespace boxlb
