#include <stdexcept>
#include <utility>

#include "strokeforest/dataset.hpp"

namespace strokeforest {

namespace {

constexpr GroupSet kBoth{true, true};
constexpr GroupSet kIsOnly{true, false};
constexpr GroupSet kIchOnly{false, true};

FeatureDef binary(std::string name, std::string description, GroupSet groups = kBoth,
                  std::string block = {}) {
  return {std::move(name), FeatureKind::Binary, "0/1", std::move(description), groups,
          0.0, 1.0, 0, std::move(block)};
}

FeatureDef continuous(std::string name, std::string units, std::string description,
                      double lower, double upper, int decimals, GroupSet groups = kBoth) {
  return {std::move(name), FeatureKind::Continuous, std::move(units), std::move(description),
          groups, lower, upper, decimals, {}};
}

FeatureDef ordinal(std::string name, std::string units, std::string description, double lower,
                   double upper) {
  return {std::move(name), FeatureKind::Ordinal, std::move(units), std::move(description),
          kBoth, lower, upper, 0, {}};
}

std::vector<FeatureDef> standard_entries() {
  return {
      // Demographics and history
      continuous("AGE", "years", "Age", 18, 105, 0),
      binary("FEMALE", "Female gender"),
      binary("HTA", "Arterial hypertension"),
      binary("DM", "Diabetes mellitus"),
      binary("ALCOHOL", "Alcohol consumption"),
      binary("SMOKING", "Smoking"),
      binary("DYSLIPIDEMIA", "Dyslipidemia"),
      binary("PAD", "Peripheral arterial disease"),
      binary("IHD", "Ischemic heart disease"),
      binary("AF", "Atrial fibrillation"),
      binary("PREV_TIA", "Previous transient ischemic attack"),
      binary("PREV_IS", "Previous ischemic stroke"),
      binary("PREV_ICH", "Previous intracerebral hemorrhage"),
      binary("PREV_ANTICOAG", "Previous anticoagulants"),
      binary("PREV_ANTIPLATELET", "Previous platelet antiaggregants"),
      // Clinical
      binary("WAKEUP", "Stroke on awakening"),
      ordinal("PREV_MRS", "points", "Previous modified Rankin Scale", 0, 5),
      continuous("ONSET_MIN", "minutes", "Time from stroke onset", 0, 1440, 0),
      ordinal("NIHSS0", "points", "NIHSS score at admission", 0, 42),
      ordinal("NIHSS24", "points", "NIHSS score at 24 h", 0, 42),
      ordinal("NIHSS48", "points", "NIHSS score at 48 h", 0, 42),
      binary("ED", "Early neurological deterioration"),
      binary("TOAST_ATHERO", "TOAST atherothrombotic", kIsOnly, "TOAST"),
      binary("TOAST_CARDIO", "TOAST cardioembolic", kIsOnly, "TOAST"),
      binary("TOAST_LACUNAR", "TOAST lacunar", kIsOnly, "TOAST"),
      binary("TOAST_UNDET", "TOAST undetermined", kIsOnly, "TOAST"),
      binary("TOAST_OTHER", "TOAST other", kIsOnly, "TOAST"),
      binary("IV_FIBRINOLYSIS", "Intravenous fibrinolysis", kIsOnly),
      binary("THROMBECTOMY", "Thrombectomy", kIsOnly),
      continuous("DWI_VOL", "ml", "DWI lesion volume at admission", 0, 800, 1, kIsOnly),
      continuous("CT_VOL_D4_7", "ml", "CT lesion volume 4th-7th day", 0, 800, 1, kIsOnly),
      binary("HT_IH1", "Hemorrhagic transformation IH1", kIsOnly, "HT"),
      binary("HT_IH2", "Hemorrhagic transformation IH2", kIsOnly, "HT"),
      binary("HT_PH1", "Hemorrhagic transformation PH1", kIsOnly, "HT"),
      binary("HT_PH2", "Hemorrhagic transformation PH2", kIsOnly, "HT"),
      binary("ICH_HYPERTENSIVE", "ICH etiology hypertensive", kIchOnly, "ICH_ETIOLOGY"),
      binary("ICH_AMYLOID", "ICH etiology amyloid angiopathy", kIchOnly, "ICH_ETIOLOGY"),
      binary("ICH_ANTICOAG", "ICH etiology anticoagulants", kIchOnly, "ICH_ETIOLOGY"),
      binary("ICH_OTHER", "ICH etiology other/undetermined", kIchOnly, "ICH_ETIOLOGY"),
      continuous("HEMATOMA_VOL0", "ml", "Hematoma volume at admission", 0, 400, 1, kIchOnly),
      continuous("HEMATOMA_VOL_D4_7", "ml", "Hematoma volume 4th-7th day", 0, 400, 1,
                 kIchOnly),
      continuous("HEMATOMA_VOL_TOTAL", "ml", "Total hematoma volume", 0, 500, 1, kIchOnly),
      continuous("HYPODENSITY_VOL", "ml", "Volume of hypodensity", 0, 300, 1, kIchOnly),
      continuous("HEMATOMA_GROWTH", "ml", "Hematoma growth", 0, 300, 1, kIchOnly),
      binary("TOPO_DEEP", "Deep hemispheric", kIchOnly, "TOPOGRAPHY"),
      binary("TOPO_LOBAR", "Lobar", kIchOnly, "TOPOGRAPHY"),
      binary("TOPO_CEREBELLAR", "Cerebellar", kIchOnly, "TOPOGRAPHY"),
      binary("TOPO_BRAINSTEM", "Brainstem", kIchOnly, "TOPOGRAPHY"),
      binary("TOPO_IVH", "Primary intraventricular", kIchOnly, "TOPOGRAPHY"),
      continuous("T0", "degC", "Axillary temperature at admission", 30, 43, 1),
      continuous("GLU0", "mg/dl", "Blood glucose at admission", 20, 800, 0),
      continuous("ESR", "mm", "Sedimentation rate", 0, 150, 0),
      continuous("HBA1C", "%", "Glycosylated hemoglobin", 3, 20, 1),
      continuous("LDL", "mg/dl", "LDL cholesterol", 10, 400, 0),
      continuous("HDL", "mg/dl", "HDL cholesterol", 5, 150, 0),
      continuous("TG", "mg/dl", "Triglycerides", 20, 1500, 0),
      continuous("PLATELETS", "x10^3/ml", "Platelets", 10, 1000, 0),
      continuous("HB", "g/dl", "Hemoglobin", 4, 22, 1),
      continuous("DBP", "mmHg", "Diastolic blood pressure at admission", 30, 180, 0),
      continuous("SBP", "mmHg", "Systolic blood pressure at admission", 60, 280, 0),
      // Molecular markers
      continuous("LEU0", "x10^3/ml", "Leukocytes at admission", 0.5, 60, 1),
      continuous("FIBRINOGEN", "mg/dl", "Fibrinogen at admission", 100, 1200, 0),
      continuous("CRP", "mg/dl", "C-reactive protein at admission", 0, 60, 2),
      continuous("MICROALB", "mg/24h", "Microalbuminuria", 0, 1000, 1),
      continuous("NTPROBNP", "pg/ml", "NT-pro-BNP", 0, 70000, 0),
  };
}

}  // namespace

bool GroupSet::applies_to(Group group) const {
  switch (group) {
    case Group::IS: return is;
    case Group::ICH: return ich;
    case Group::All: return is || ich;
  }
  return false;
}

FeatureCodebook::FeatureCodebook(std::vector<FeatureDef> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.name.empty()) throw std::invalid_argument("codebook entry with empty name");
    if (!index_.emplace(e.name, i).second) {
      throw std::invalid_argument("duplicate codebook feature: " + e.name);
    }
    if (e.upper < e.lower) throw std::invalid_argument("inverted bounds for " + e.name);
  }
}

std::shared_ptr<const FeatureCodebook> FeatureCodebook::standard() {
  static const auto instance = std::make_shared<const FeatureCodebook>(standard_entries());
  return instance;
}

std::optional<std::size_t> FeatureCodebook::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureCodebook::require(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw std::invalid_argument("unknown feature: " + std::string(name));
  return *idx;
}

std::vector<std::size_t> FeatureCodebook::applicable(Group group) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].groups.applies_to(group)) out.push_back(i);
  }
  return out;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Binary: return "binary";
    case FeatureKind::Continuous: return "continuous";
    case FeatureKind::Ordinal: return "ordinal";
    case FeatureKind::Categorical: return "categorical";
  }
  return "?";
}

std::string_view to_string(StrokeType type) { return type == StrokeType::IS ? "IS" : "ICH"; }

std::string_view to_string(Group group) {
  switch (group) {
    case Group::IS: return "IS";
    case Group::ICH: return "ICH";
    case Group::All: return "ALL";
  }
  return "?";
}

StrokeType parse_stroke_type(std::string_view text) {
  if (text == "IS") return StrokeType::IS;
  if (text == "ICH") return StrokeType::ICH;
  throw std::invalid_argument("stroke type must be IS or ICH, got '" + std::string(text) + "'");
}

Group parse_group(std::string_view text) {
  if (text == "IS") return Group::IS;
  if (text == "ICH") return Group::ICH;
  if (text == "ALL") return Group::All;
  throw std::invalid_argument("group must be IS, ICH or ALL, got '" + std::string(text) + "'");
}

}  // namespace strokeforest
