#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace drlab::env {

// Dataset columns, one value per hour. Prediction columns carry the value the
// matching base feature will take 6/12/24 hours later.
enum DatasetColumn : std::size_t {
  kMonth = 0,
  kDayType,
  kHour,
  kTemperature,
  kTemperaturePred6h,
  kTemperaturePred12h,
  kTemperaturePred24h,
  kHumidity,
  kHumidityPred6h,
  kHumidityPred12h,
  kHumidityPred24h,
  kDiffuseIrradiance,
  kDiffusePred6h,
  kDiffusePred12h,
  kDiffusePred24h,
  kDirectIrradiance,
  kDirectPred6h,
  kDirectPred12h,
  kDirectPred24h,
  kCarbonIntensity,
  kNonShiftableLoad,
  kSolarGeneration,
  kPricing,
  kPricingPred6h,
  kPricingPred12h,
  kPricingPred24h,
  kDatasetColumnCount,
};

// Observation layout: every dataset column, then battery state of charge and
// the previous hour's net electricity consumption.
inline constexpr std::size_t kSocFeature = kDatasetColumnCount;
inline constexpr std::size_t kNetConsumptionFeature = kDatasetColumnCount + 1;
inline constexpr std::size_t kObservationWidth = kDatasetColumnCount + 2;

enum class FeatureCategory {
  Temporal,
  Temperature,
  Humidity,
  DiffuseIrradiance,
  DirectIrradiance,
  CarbonIntensity,
  NonShiftableLoad,
  SolarGeneration,
  Pricing,
  StorageSoc,
  NetConsumption,
};

const std::array<std::string, kDatasetColumnCount>& dataset_column_names();
const std::array<std::string, kObservationWidth>& observation_feature_names();
FeatureCategory feature_category(std::size_t observation_index);
std::vector<std::size_t> features_in_category(FeatureCategory category);

/// Hourly records for one episode, raw physical units, length divisible by 24.
struct BuildingDataset {
  std::vector<std::array<double, kDatasetColumnCount>> rows;

  std::size_t hours() const { return rows.size(); }
  std::size_t days() const { return rows.size() / 24; }
  double at(std::size_t hour, DatasetColumn col) const { return rows[hour][col]; }
};

/// Thrown when a dataset file or record violates the schema; the message
/// names the offending row and column.
struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate_dataset(const BuildingDataset& dataset);

/// Comma-separated text, one header row with the exact column names.
BuildingDataset load_dataset(const std::string& path);
void save_dataset(const BuildingDataset& dataset, const std::string& path);

/// Deterministic synthetic year-like data: diurnal solar (zero at night),
/// daily plus seasonal temperature cycles, weekday/weekend load shapes,
/// time-of-use pricing. Prediction columns are perfect foresight (wrapping
/// at the end of the episode).
BuildingDataset generate_synthetic(std::uint64_t seed, std::size_t days);

}  // namespace drlab::env
