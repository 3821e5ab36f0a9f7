#include "boxlb/records.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

#include "json.hpp"

namespace boxlb {

std::optional<Format> parse_format(std::string_view name) {
  if (name == "text") return Format::text;
  if (name == "csv") return Format::csv;
  if (name == "json-lines") return Format::json_lines;
  return std::nullopt;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

Record& Record::integer(std::string key, std::uint64_t value) {
  entries_.push_back({std::move(key), std::to_string(value), Kind::raw});
  return *this;
}

Record& Record::number(std::string key, double value) {
  entries_.push_back(
      {std::move(key), format_double(value), std::isfinite(value) ? Kind::raw : Kind::string});
  return *this;
}

Record& Record::decimal(std::string key, std::string value) {
  entries_.push_back({std::move(key), std::move(value), Kind::raw});
  return *this;
}

Record& Record::text(std::string key, std::string value) {
  entries_.push_back({std::move(key), std::move(value), Kind::string});
  return *this;
}

Record& Record::flag(std::string key, bool value) {
  entries_.push_back({std::move(key), value ? "true" : "false", Kind::boolean});
  return *this;
}

void RecordWriter::write(const Record& record) {
  switch (format_) {
    case Format::text: {
      os_ << record.schema_;
      for (const auto& e : record.entries_) os_ << ' ' << e.key << '=' << e.value;
      os_ << '\n';
      break;
    }
    case Format::csv: {
      std::vector<std::string> header{"schema"};
      for (const auto& e : record.entries_) header.push_back(e.key);
      if (header != last_header_) {
        for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << '\n';
        last_header_ = header;
      }
      os_ << record.schema_;
      for (const auto& e : record.entries_) {
        const bool quote = e.value.find_first_of(",\"\n") != std::string::npos;
        if (quote) {
          std::string v;
          for (char c : e.value) v += c == '"' ? std::string("\"\"") : std::string(1, c);
          os_ << ",\"" << v << '"';
        } else {
          os_ << ',' << e.value;
        }
      }
      os_ << '\n';
      break;
    }
    case Format::json_lines: {
      os_ << "{\"schema\":" << nlohmann::json(record.schema_).dump();
      for (const auto& e : record.entries_) {
        os_ << ',' << nlohmann::json(e.key).dump() << ':';
        if (e.kind == Record::Kind::string) {
          os_ << nlohmann::json(e.value).dump();
        } else {
          os_ << e.value;
        }
      }
      os_ << "}\n";
      break;
    }
  }
}

void write_table(std::ostream& os, const std::vector<BoundsRow>& rows, Format format) {
  if (format == Format::text) {
    std::vector<std::array<std::string, 4>> cells;
    for (const auto& row : rows) {
      cells.push_back({std::to_string(row.d), truncate_decimal(row.alpha_deletion, 2),
                       row.grs ? truncate_decimal(row.grs->alpha, 2) : std::string(),
                       truncate_decimal(row.best.alpha, 2)});
    }
    std::array<std::size_t, 4> width{};
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < 4; ++i) width[i] = std::max(width[i], c[i].size());
    }
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < 4; ++i) {
        if (i) os << "  ";
        os << std::string(width[i] - c[i].size(), ' ') << c[i];
      }
      os << '\n';
    }
    return;
  }
  RecordWriter writer(os, format);
  for (const auto& row : rows) {
    Record rec("boxlb.bounds.v1");
    rec.integer("d", static_cast<std::uint64_t>(row.d))
        .decimal("upper", truncate_decimal(row.alpha_upper, 2))
        .decimal("deletion", truncate_decimal(row.alpha_deletion, 2))
        .text("grs", row.grs ? truncate_decimal(row.grs->alpha, 2) : "")
        .decimal("new", truncate_decimal(row.best.alpha, 2))
        .text("upper_exact", exact_string(row.alpha_upper))
        .text("deletion_exact", row.alpha_deletion.str())
        .text("grs_s", row.grs ? row.grs->s.str() : "")
        .text("grs_exact", row.grs ? row.grs->alpha.str() : "")
        .text("new_r", row.best.r.str())
        .text("new_s", row.best.s.str())
        .text("new_exact", row.best.alpha.str());
    writer.write(rec);
  }
}

Record run_record(std::string schema, const Params& params) {
  Record rec(std::move(schema));
  std::string modulus;
  for (std::size_t i = 0; i < params.field().modulus().size(); ++i) {
    modulus += (i ? "," : "") + std::to_string(params.field().modulus()[i]);
  }
  rec.integer("d", params.d())
      .integer("r", params.r())
      .integer("s", params.s())
      .integer("p", params.field().characteristic())
      .integer("k", params.field().degree())
      .integer("q", params.q())
      .text("modulus", modulus)
      .integer("n", params.n())
      .text("target_exponent", params.target_exponent().str())
      .flag("theorem_regime", params.theorem_regime())
      .number("leading_constant", params.leading_constant());
  return rec;
}

Record trial_record(const TrialRecord& r) {
  Record rec("boxlb.trial.v1");
  rec.integer("trial", r.index)
      .integer("edges", r.edges)
      .integer("boxes", r.boxes)
      .integer("lines", r.lines)
      .integer("bad", r.bad)
      .integer("kept", r.kept)
      .flag("box_free", r.box_free)
      .flag("meets_target", r.meets_target);
  return rec;
}

Record summary_record(const TrialStats& st) {
  Record rec("boxlb.summary.v1");
  rec.text("mode", st.mode == Mode::exact ? "exact" : "sample")
      .integer("seed", st.seed)
      .integer("trials", st.records.size())
      .integer("box_free", st.box_free)
      .integer("meets_target", st.meets_target)
      .number("delta", st.delta)
      .integer("direct_checked", st.direct_checked)
      .number("mean_edges", to_double(st.edges.mean()))
      .text("mean_edges_exact", exact_string(st.edges.mean()))
      .number("se_edges", st.edges.std_error())
      .number("expected_edges", to_double(st.expected_edges))
      .text("expected_edges_exact", exact_string(st.expected_edges))
      .number("z_edges", st.edges.z_score(st.expected_edges))
      .flag("edges_match_exactly", st.edges.mean() == st.expected_edges)
      .number("mean_boxes", to_double(st.boxes.mean()))
      .text("mean_boxes_exact", exact_string(st.boxes.mean()))
      .number("se_boxes", st.boxes.std_error())
      .number("expected_boxes", to_double(st.expected_boxes))
      .text("expected_boxes_exact", exact_string(st.expected_boxes))
      .number("z_boxes", st.boxes.z_score(st.expected_boxes))
      .flag("boxes_match_exactly", st.boxes.mean() == st.expected_boxes)
      .number("mean_lines", to_double(st.lines.mean()))
      .number("mean_bad", to_double(st.bad.mean()))
      .number("se_bad", st.bad.std_error())
      .number("bad_bound", to_double(st.bad_bound))
      .number("mean_kept", to_double(st.kept.mean()))
      .number("target_edges", to_double(st.target_edges))
      .number("bad_fraction", st.bad_fraction());
  return rec;
}

void write_trials(std::ostream& os, const Params& params, const TrialStats& stats,
                  Format format) {
  RecordWriter writer(os, format);
  writer.write(run_record("boxlb.run.v1", params));
  for (const auto& r : stats.records) writer.write(trial_record(r));
  writer.write(summary_record(stats));
}

}  // namespace boxlb
