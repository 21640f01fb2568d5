#include "drlab/env/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace drlab::env {

namespace {

std::array<std::string, kDatasetColumnCount> make_column_names() {
  return {
      "month",
      "day_type",
      "hour",
      "outdoor_dry_bulb_temperature",
      "outdoor_dry_bulb_temperature_predicted_6h",
      "outdoor_dry_bulb_temperature_predicted_12h",
      "outdoor_dry_bulb_temperature_predicted_24h",
      "outdoor_relative_humidity",
      "outdoor_relative_humidity_predicted_6h",
      "outdoor_relative_humidity_predicted_12h",
      "outdoor_relative_humidity_predicted_24h",
      "diffuse_solar_irradiance",
      "diffuse_solar_irradiance_predicted_6h",
      "diffuse_solar_irradiance_predicted_12h",
      "diffuse_solar_irradiance_predicted_24h",
      "direct_solar_irradiance",
      "direct_solar_irradiance_predicted_6h",
      "direct_solar_irradiance_predicted_12h",
      "direct_solar_irradiance_predicted_24h",
      "carbon_intensity",
      "non_shiftable_load",
      "solar_generation",
      "electricity_pricing",
      "electricity_pricing_predicted_6h",
      "electricity_pricing_predicted_12h",
      "electricity_pricing_predicted_24h",
  };
}

bool in_category_range(DatasetColumn lo, DatasetColumn hi, std::size_t idx) {
  return idx >= lo && idx <= hi;
}

[[noreturn]] void fail(std::size_t row, const std::string& column, const std::string& what) {
  throw DatasetError("dataset row " + std::to_string(row) + ", column '" + column + "': " + what);
}

void check_range(std::size_t row, DatasetColumn col, double v, double lo, double hi) {
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << "value " << v << " outside [" << lo << ", " << hi << "]";
    fail(row, dataset_column_names()[col], os.str());
  }
}

void check_nonnegative(std::size_t row, DatasetColumn col, double v) {
  if (v < 0.0) fail(row, dataset_column_names()[col], "negative value " + std::to_string(v));
}

}  // namespace

const std::array<std::string, kDatasetColumnCount>& dataset_column_names() {
  static const auto names = make_column_names();
  return names;
}

const std::array<std::string, kObservationWidth>& observation_feature_names() {
  static const auto names = [] {
    std::array<std::string, kObservationWidth> all;
    for (std::size_t i = 0; i < kDatasetColumnCount; ++i) all[i] = dataset_column_names()[i];
    all[kSocFeature] = "electrical_storage_soc";
    all[kNetConsumptionFeature] = "net_electricity_consumption";
    return all;
  }();
  return names;
}

FeatureCategory feature_category(std::size_t idx) {
  if (idx <= kHour) return FeatureCategory::Temporal;
  if (in_category_range(kTemperature, kTemperaturePred24h, idx)) return FeatureCategory::Temperature;
  if (in_category_range(kHumidity, kHumidityPred24h, idx)) return FeatureCategory::Humidity;
  if (in_category_range(kDiffuseIrradiance, kDiffusePred24h, idx))
    return FeatureCategory::DiffuseIrradiance;
  if (in_category_range(kDirectIrradiance, kDirectPred24h, idx))
    return FeatureCategory::DirectIrradiance;
  if (idx == kCarbonIntensity) return FeatureCategory::CarbonIntensity;
  if (idx == kNonShiftableLoad) return FeatureCategory::NonShiftableLoad;
  if (idx == kSolarGeneration) return FeatureCategory::SolarGeneration;
  if (in_category_range(kPricing, kPricingPred24h, idx)) return FeatureCategory::Pricing;
  if (idx == kSocFeature) return FeatureCategory::StorageSoc;
  if (idx == kNetConsumptionFeature) return FeatureCategory::NetConsumption;
  throw std::out_of_range("observation feature index out of range");
}

std::vector<std::size_t> features_in_category(FeatureCategory category) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kObservationWidth; ++i)
    if (feature_category(i) == category) out.push_back(i);
  return out;
}

void validate_dataset(const BuildingDataset& dataset) {
  if (dataset.rows.empty()) throw DatasetError("dataset is empty");
  if (dataset.rows.size() % 24 != 0)
    throw DatasetError("dataset hour count " + std::to_string(dataset.rows.size()) +
                       " is not divisible by 24");
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    const auto& row = dataset.rows[r];
    for (std::size_t c = 0; c < kDatasetColumnCount; ++c)
      if (!std::isfinite(row[c])) fail(r, dataset_column_names()[c], "non-finite value");
    check_range(r, kMonth, row[kMonth], 1, 12);
    check_range(r, kDayType, row[kDayType], 1, 7);
    check_range(r, kHour, row[kHour], 0, 23);
    for (std::size_t c = kHumidity; c <= kHumidityPred24h; ++c)
      check_range(r, static_cast<DatasetColumn>(c), row[c], 0, 100);
    for (std::size_t c = kDiffuseIrradiance; c <= kDirectPred24h; ++c)
      check_nonnegative(r, static_cast<DatasetColumn>(c), row[c]);
    check_nonnegative(r, kNonShiftableLoad, row[kNonShiftableLoad]);
    check_nonnegative(r, kSolarGeneration, row[kSolarGeneration]);
    for (std::size_t c = kPricing; c <= kPricingPred24h; ++c)
      check_nonnegative(r, static_cast<DatasetColumn>(c), row[c]);
  }
}

BuildingDataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DatasetError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(is, line)) throw DatasetError("dataset file has no header: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto& names = dataset_column_names();
  if (header.size() != names.size())
    throw DatasetError("dataset header has " + std::to_string(header.size()) + " columns, expected " +
                       std::to_string(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c)
    if (header[c] != names[c])
      throw DatasetError("dataset header column " + std::to_string(c) + " is '" + header[c] +
                         "', expected '" + names[c] + "'");

  BuildingDataset dataset;
  std::size_t row_index = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, kDatasetColumnCount> row{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= kDatasetColumnCount) fail(row_index, "<extra>", "too many cells");
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end)
        fail(row_index, names[c], "non-numeric cell '" + cell + "'");
      row[c] = v;
      ++c;
    }
    if (c != kDatasetColumnCount)
      fail(row_index, "<missing>", "row has " + std::to_string(c) + " cells, expected " +
                                       std::to_string(kDatasetColumnCount));
    dataset.rows.push_back(row);
    ++row_index;
  }
  validate_dataset(dataset);
  return dataset;
}

void save_dataset(const BuildingDataset& dataset, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DatasetError("cannot open dataset file for write: " + path);
  const auto& names = dataset_column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) os << ',';
    os << names[c];
  }
  os << '\n';
  char buf[40];
  for (const auto& row : dataset.rows) {
    for (std::size_t c = 0; c < kDatasetColumnCount; ++c) {
      if (c) os << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace drlab::env
