#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace strokeforest {

enum class FeatureKind { Binary, Continuous, Ordinal, Categorical };
enum class StrokeType { IS, ICH };
enum class Group { IS, ICH, All };

std::string_view to_string(FeatureKind kind);
std::string_view to_string(StrokeType type);
std::string_view to_string(Group group);
StrokeType parse_stroke_type(std::string_view text);
Group parse_group(std::string_view text);

/// Raised for malformed cohort files. The message names the offending row
/// (1-based file line, header is line 1) and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what);
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

struct GroupSet {
  bool is = true;
  bool ich = true;

  bool contains(StrokeType type) const { return type == StrokeType::IS ? is : ich; }
  bool applies_to(Group group) const;
};

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::string units;
  std::string description;
  GroupSet groups;
  // Physiologic range; generator samples are truncated to it.
  double lower = 0.0;
  double upper = 0.0;
  // Decimal places kept by the generator.
  int decimals = 1;
  // Non-empty for members of a one-hot expanded categorical variable.
  std::string block;
};

/// Registry schema. The standard codebook holds the 65 registry variables;
/// multi-level categorical variables (TOAST, ICH etiology, topography,
/// hemorrhagic transformation) appear as one-hot binary members.
class FeatureCodebook {
 public:
  static constexpr std::array<std::string_view, 7> kShortlist = {
      "NIHSS0", "NIHSS24", "NIHSS48", "T0", "ED", "LEU0", "GLU0"};

  explicit FeatureCodebook(std::vector<FeatureDef> entries);

  static std::shared_ptr<const FeatureCodebook> standard();

  std::size_t size() const { return entries_.size(); }
  const std::vector<FeatureDef>& entries() const { return entries_; }
  const FeatureDef& operator[](std::size_t i) const { return entries_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require(std::string_view name) const;

  /// Codebook indices of features measured in `group`, in codebook order.
  std::vector<std::size_t> applicable(Group group) const;

 private:
  std::vector<FeatureDef> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct PatientRecord {
  std::vector<std::optional<double>> values;  // codebook order; nullopt = missing
  StrokeType stroke_type = StrokeType::IS;
  int mrs_3m = 0;
  bool died_first_24h = false;
  bool lost_followup = false;
};

struct OutcomeLabel {
  bool poor_outcome = false;
  bool morbidity = false;
  bool mortality = false;

  bool operator==(const OutcomeLabel&) const = default;
};

struct Provenance {
  enum class Kind { LoadedFromFile, Synthetic };
  Kind kind = Kind::LoadedFromFile;
  std::uint64_t seed = 0;
  std::string source;
};

/// Patients, their outcome labels and the schema they conform to.
/// Treated as an immutable value once built.
struct Cohort {
  std::shared_ptr<const FeatureCodebook> codebook;
  std::vector<PatientRecord> records;
  std::vector<OutcomeLabel> labels;
  Provenance provenance;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::optional<double> value(std::size_t row, std::string_view feature) const;
  Cohort subset(std::span<const std::size_t> rows) const;
};

/// Throws std::invalid_argument if `record` violates the value ranges
/// (mRS, NIHSS, temperature, binary coding, nonnegative measurements).
void validate_record(const FeatureCodebook& codebook, const PatientRecord& record);

// ---------------------------------------------------------------------------
// Clinical definitions

OutcomeLabel derive_outcome(int mrs_3m);

struct ClinicalFlags {
  bool early_deterioration = false;
  bool effective_reperfusion = false;
};

ClinicalFlags derive_clinical_flags(int nihss0, int nihss24, int nihss48);

/// Hematoma volume in ml from three orthogonal diameters in cm.
double abc2_volume(double a, double b, double c);

struct ExclusionResult {
  Cohort cohort;
  std::size_t died_first_24h = 0;
  std::size_t lost_followup = 0;
};

/// Drops early deaths and patients lost to follow-up. A record carrying
/// both flags is counted once, under died_first_24h.
ExclusionResult apply_exclusions(const Cohort& cohort);

/// Keeps one stroke type (All keeps everything). Features not measured in
/// the kept group are blanked.
Cohort filter_group(const Cohort& cohort, Group group);

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::array<std::string_view, 4> kMetaColumns = {
    "mrs_3m", "stroke_type", "died_first_24h", "lost_followup"};

Cohort read_cohort_csv(std::istream& in, std::shared_ptr<const FeatureCodebook> codebook,
                       std::string source = "<stream>");
Cohort load_cohort_csv(const std::string& path,
                       std::shared_ptr<const FeatureCodebook> codebook);
void write_cohort_csv(std::ostream& out, const Cohort& cohort);

// ---------------------------------------------------------------------------
// Synthetic cohort generator

enum class Distribution { Normal, LogNormal };

struct ContinuousParams {
  double mean = 0.0;
  double sd = 1.0;
  Distribution family = Distribution::Normal;
};

/// One-hot block sampled as a single categorical draw. Probabilities may sum
/// to less than one; the remainder is "none of the members".
struct CategoryParams {
  std::vector<std::string> members;
  std::vector<double> probabilities;
};

/// NIHSS trajectory. Baseline is a rounded truncated normal; a fraction of
/// patients deteriorate (positive increments), the rest follow multiplicative
/// log-normal recovery ratios.
struct NihssTrajectory {
  double baseline_mean = 13.0;
  double baseline_sd = 8.0;
  double recovery24_log_mean = -0.5;
  double recovery24_log_sd = 0.5;
  double recovery48_log_mean = -0.1;
  double recovery48_log_sd = 0.3;
  double deterioration_prob = 0.05;
  double worsen24_mean = 5.0;
  double worsen24_sd = 2.5;
  double worsen48_mean = 1.5;
  double worsen48_sd = 2.5;
  // Reference quartiles (q1, median, q3) the trajectory approximates.
  std::array<double, 3> nihss0_quartiles{7, 13, 19};
  std::array<double, 3> nihss24_quartiles{3, 7, 15};
  std::array<double, 3> nihss48_quartiles{2, 6, 14};
};

struct OutcomeTargets {
  double poor_outcome = 0.5;
  double morbidity = 0.35;
  double mortality = 0.15;
};

struct GroupSpec {
  std::map<std::string, double> binary_prevalence;
  std::map<std::string, ContinuousParams> continuous;
  std::map<std::string, std::vector<double>> ordinal_probabilities;  // P(value = 0, 1, ...)
  std::vector<CategoryParams> categories;
  NihssTrajectory nihss;
  OutcomeTargets targets;
  std::array<double, 3> good_mrs_probabilities{0.3, 0.35, 0.35};       // mRS 0, 1, 2
  std::array<double, 3> morbidity_mrs_probabilities{0.4, 0.35, 0.25};  // mRS 3, 4, 5
};

/// Log-odds contribution weight * (x - center) / scale of a shortlist feature.
struct SignalTerm {
  std::string feature;
  double center = 0.0;
  double scale = 1.0;
  double mortality_weight = 0.0;
  double morbidity_weight = 0.0;
};

struct CohortSpec {
  std::size_t n_total = 6022;  // retained patients, before the flagged extras
  double is_fraction = 0.818;
  std::size_t n_early_death = 228;
  std::size_t n_lost_followup = 84;
  // Per-cell missingness for continuous features outside the shortlist.
  double missing_fraction = 0.02;
  GroupSpec is;
  GroupSpec ich;
  std::vector<SignalTerm> signal;

  const GroupSpec& group(StrokeType type) const { return type == StrokeType::IS ? is : ich; }
};

/// Default spec with the registry cohort statistics.
CohortSpec default_cohort_spec();

/// Throws std::invalid_argument naming the first violated constraint.
void validate(const CohortSpec& spec, const FeatureCodebook& codebook);

nlohmann::json to_json(const CohortSpec& spec);
CohortSpec cohort_spec_from_json(const nlohmann::json& doc);

class CalibrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Synthetic cohort drawn from `spec`; a pure function of (spec, seed).
Cohort generate_synthetic_cohort(const CohortSpec& spec, std::uint64_t seed,
                                 std::shared_ptr<const FeatureCodebook> codebook =
                                     FeatureCodebook::standard());

/// Underlying normal (mu, sigma) whose truncation to [lower, upper] has the
/// requested mean and SD. Throws CalibrationError when unattainable.
std::pair<double, double> fit_truncated_normal(double mean, double sd, double lower,
                                               double upper);

}  // namespace strokeforest
