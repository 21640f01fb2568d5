#include <algorithm>
#include <cmath>
#include <random>

#include "drlab/env/dataset.hpp"

namespace drlab::env {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Zero outside [6, 18], bell-shaped inside. Keeps irradiance exactly 0 at night.
double daylight(int hour) {
  if (hour < 6 || hour > 18) return 0.0;
  const double s = std::sin(kPi * (hour - 6) / 12.0);
  return s * s;
}

double bump(double hour, double center, double width) {
  const double d = (hour - center) / width;
  return std::exp(-0.5 * d * d);
}

}  // namespace

BuildingDataset generate_synthetic(std::uint64_t seed, std::size_t days) {
  if (days < 1) throw DatasetError("synthetic dataset needs days >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const std::size_t hours = days * 24;
  std::vector<double> temperature(hours), humidity(hours), diffuse(hours), direct(hours),
      carbon(hours), load(hours), generation(hours), pricing(hours);
  std::vector<int> month(hours), day_type(hours), hour_of_day(hours);

  for (std::size_t d = 0; d < days; ++d) {
    // Daily cloudiness factor shared by irradiance and PV output.
    const double weather = 0.6 + 0.4 * unif(rng);
    // Phase chosen so short episodes start in a sunny stretch while a full
    // year still sweeps the whole cycle.
    const double season = std::sin(2.0 * kPi * (static_cast<double>(d) + 20.0) / 365.0);
    const int dtype = 1 + static_cast<int>(d % 7);
    const bool weekend = dtype >= 6;
    for (int h = 0; h < 24; ++h) {
      const std::size_t t = d * 24 + static_cast<std::size_t>(h);
      month[t] = 1 + static_cast<int>((d / 30) % 12);
      day_type[t] = dtype;
      hour_of_day[t] = h;

      temperature[t] = 14.0 + 9.0 * season + 5.5 * std::sin(2.0 * kPi * (h - 9) / 24.0) +
                       0.6 * gauss(rng);
      humidity[t] = std::clamp(
          62.0 - 18.0 * std::sin(2.0 * kPi * (h - 10) / 24.0) - 8.0 * season + 3.0 * gauss(rng),
          5.0, 100.0);

      const double sun = daylight(h) * (0.75 + 0.25 * season) * weather;
      direct[t] = std::max(0.0, 850.0 * sun * (1.0 + 0.05 * gauss(rng)));
      diffuse[t] = std::max(0.0, (120.0 + 160.0 * (1.0 - weather)) * daylight(h) *
                                     (0.75 + 0.25 * season) * (1.0 + 0.05 * gauss(rng)));
      generation[t] = std::max(0.0, 3.6 * sun * (1.0 + 0.03 * gauss(rng)));

      carbon[t] = std::max(0.05, 0.25 + 0.08 * std::sin(2.0 * kPi * (h - 13) / 24.0) +
                                     0.01 * gauss(rng));

      double base = 0.5;
      if (weekend)
        base += 1.1 * bump(h, 13.0, 3.0) + 1.3 * bump(h, 19.5, 2.5);
      else
        base += 0.9 * bump(h, 7.5, 1.5) + 1.8 * bump(h, 19.0, 2.2);
      load[t] = std::max(0.1, base + 0.08 * gauss(rng));

      if (weekend)
        pricing[t] = 0.14;
      else if (h >= 16 && h <= 21)
        pricing[t] = 0.30;
      else if (h >= 7 && h <= 23)
        pricing[t] = 0.18;
      else
        pricing[t] = 0.10;
    }
  }

  BuildingDataset dataset;
  dataset.rows.resize(hours);
  auto future = [hours](std::size_t t, std::size_t lead) { return (t + lead) % hours; };
  for (std::size_t t = 0; t < hours; ++t) {
    auto& row = dataset.rows[t];
    row[kMonth] = month[t];
    row[kDayType] = day_type[t];
    row[kHour] = hour_of_day[t];
    row[kTemperature] = temperature[t];
    row[kTemperaturePred6h] = temperature[future(t, 6)];
    row[kTemperaturePred12h] = temperature[future(t, 12)];
    row[kTemperaturePred24h] = temperature[future(t, 24)];
    row[kHumidity] = humidity[t];
    row[kHumidityPred6h] = humidity[future(t, 6)];
    row[kHumidityPred12h] = humidity[future(t, 12)];
    row[kHumidityPred24h] = humidity[future(t, 24)];
    row[kDiffuseIrradiance] = diffuse[t];
    row[kDiffusePred6h] = diffuse[future(t, 6)];
    row[kDiffusePred12h] = diffuse[future(t, 12)];
    row[kDiffusePred24h] = diffuse[future(t, 24)];
    row[kDirectIrradiance] = direct[t];
    row[kDirectPred6h] = direct[future(t, 6)];
    row[kDirectPred12h] = direct[future(t, 12)];
    row[kDirectPred24h] = direct[future(t, 24)];
    row[kCarbonIntensity] = carbon[t];
    row[kNonShiftableLoad] = load[t];
    row[kSolarGeneration] = generation[t];
    row[kPricing] = pricing[t];
    row[kPricingPred6h] = pricing[future(t, 6)];
    row[kPricingPred12h] = pricing[future(t, 12)];
    row[kPricingPred24h] = pricing[future(t, 24)];
  }
  validate_dataset(dataset);
  return dataset;
}

}  // namespace drlab::env
