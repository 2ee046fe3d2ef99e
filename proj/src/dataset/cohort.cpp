#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "strokeforest/dataset.hpp"

namespace strokeforest {

ParseError::ParseError(std::size_t row, std::string column, const std::string& what)
    : std::runtime_error("row " + std::to_string(row) +
                         (column.empty() ? std::string() : ", column " + column) + ": " + what),
      row_(row),
      column_(std::move(column)) {}

std::optional<double> Cohort::value(std::size_t row, std::string_view feature) const {
  return records.at(row).values.at(codebook->require(feature));
}

Cohort Cohort::subset(std::span<const std::size_t> rows) const {
  Cohort out{codebook, {}, {}, provenance};
  out.records.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (auto r : rows) {
    out.records.push_back(records.at(r));
    out.labels.push_back(labels.at(r));
  }
  return out;
}

void validate_record(const FeatureCodebook& codebook, const PatientRecord& record) {
  if (record.values.size() != codebook.size()) {
    throw std::invalid_argument("record has " + std::to_string(record.values.size()) +
                                " values, codebook has " + std::to_string(codebook.size()));
  }
  if (record.mrs_3m < 0 || record.mrs_3m > 6) {
    throw std::invalid_argument("mrs_3m out of [0,6]: " + std::to_string(record.mrs_3m));
  }
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    const auto& v = record.values[i];
    if (!v) continue;
    const auto& def = codebook[i];
    const double x = *v;
    if (!std::isfinite(x)) throw std::invalid_argument(def.name + " is not finite");
    if (def.kind == FeatureKind::Binary && x != 0.0 && x != 1.0) {
      throw std::invalid_argument(def.name + " must be 0 or 1");
    }
    if (def.name.starts_with("NIHSS") && (x < 0.0 || x > 42.0)) {
      throw std::invalid_argument(def.name + " out of [0,42]");
    }
    if (def.name == "T0" && (x < 30.0 || x > 43.0)) {
      throw std::invalid_argument("T0 out of [30,43]");
    }
    if (def.lower >= 0.0 && x < 0.0) throw std::invalid_argument(def.name + " is negative");
  }
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_number(std::string_view cell) {
  double x = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return x;
}

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool parse_flag(std::string_view cell, std::size_t row, const std::string& column) {
  if (cell == "0") return false;
  if (cell == "1") return true;
  throw ParseError(row, column, "expected 0 or 1, got '" + std::string(cell) + "'");
}

}  // namespace

Cohort read_cohort_csv(std::istream& in, std::shared_ptr<const FeatureCodebook> codebook,
                       std::string source) {
  Cohort cohort{codebook, {}, {}, {Provenance::Kind::LoadedFromFile, 0, std::move(source)}};
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "", "missing header row");

  constexpr std::size_t kNotFeature = static_cast<std::size_t>(-1);
  const auto header = split_line(line);
  std::vector<std::string> names;
  std::vector<std::size_t> feature_of(header.size(), kNotFeature);
  std::array<std::optional<std::size_t>, kMetaColumns.size()> meta_col;
  std::vector<bool> seen(codebook->size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    names.emplace_back(name);
    auto meta = std::find(kMetaColumns.begin(), kMetaColumns.end(), name);
    if (meta != kMetaColumns.end()) {
      auto m = static_cast<std::size_t>(meta - kMetaColumns.begin());
      if (meta_col[m]) throw ParseError(1, names.back(), "duplicate column");
      meta_col[m] = c;
      continue;
    }
    auto idx = codebook->index_of(name);
    if (!idx) throw ParseError(1, names.back(), "unknown column name");
    if (seen[*idx]) throw ParseError(1, names.back(), "duplicate column");
    seen[*idx] = true;
    feature_of[c] = *idx;
  }
  for (std::size_t m = 0; m < kMetaColumns.size(); ++m) {
    if (!meta_col[m]) {
      throw ParseError(1, std::string(kMetaColumns[m]), "required column missing from header");
    }
  }

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(row, "", "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(cells.size()));
    }
    PatientRecord rec;
    rec.values.assign(codebook->size(), std::nullopt);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = trim(cells[c]);
      if (feature_of[c] == kNotFeature) continue;
      if (cell.empty()) continue;
      auto x = parse_number(cell);
      if (!x) {
        throw ParseError(row, names[c], "unparseable numeric value '" + std::string(cell) + "'");
      }
      const auto& def = (*codebook)[feature_of[c]];
      if (def.kind == FeatureKind::Binary && *x != 0.0 && *x != 1.0) {
        throw ParseError(row, names[c], "binary field must be 0 or 1");
      }
      rec.values[feature_of[c]] = *x;
    }
    const auto mrs_cell = trim(cells[*meta_col[0]]);
    auto mrs = parse_number(mrs_cell);
    if (!mrs || *mrs != std::floor(*mrs)) {
      throw ParseError(row, "mrs_3m", "expected an integer, got '" + std::string(mrs_cell) + "'");
    }
    if (*mrs < 0 || *mrs > 6) throw ParseError(row, "mrs_3m", "mRS out of [0,6]");
    rec.mrs_3m = static_cast<int>(*mrs);
    try {
      rec.stroke_type = parse_stroke_type(trim(cells[*meta_col[1]]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(row, "stroke_type", e.what());
    }
    rec.died_first_24h = parse_flag(trim(cells[*meta_col[2]]), row, "died_first_24h");
    rec.lost_followup = parse_flag(trim(cells[*meta_col[3]]), row, "lost_followup");
    try {
      validate_record(*codebook, rec);
    } catch (const std::invalid_argument& e) {
      throw ParseError(row, "", e.what());
    }
    cohort.labels.push_back(derive_outcome(rec.mrs_3m));
    cohort.records.push_back(std::move(rec));
  }
  return cohort;
}

Cohort load_cohort_csv(const std::string& path, std::shared_ptr<const FeatureCodebook> codebook) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cohort file: " + path);
  return read_cohort_csv(in, std::move(codebook), path);
}

void write_cohort_csv(std::ostream& out, const Cohort& cohort) {
  const auto& cb = *cohort.codebook;
  for (std::size_t i = 0; i < cb.size(); ++i) out << cb[i].name << ',';
  out << "mrs_3m,stroke_type,died_first_24h,lost_followup\n";
  for (const auto& rec : cohort.records) {
    for (const auto& v : rec.values) {
      if (v) out << format_number(*v);
      out << ',';
    }
    out << rec.mrs_3m << ',' << to_string(rec.stroke_type) << ',' << (rec.died_first_24h ? 1 : 0)
        << ',' << (rec.lost_followup ? 1 : 0) << '\n';
  }
}

}  // namespace strokeforest
