// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ingest/emulator.hpp"
#include "common/error.hpp"

#include <algorithm>
#include <cmath>

namespace airchain::ingest
{
void check(const SensorNoiseModel& model)
{
    if (!(model.rmse_ug_m3 > 0))
        throw ConfigError{"noise model: rmse must be positive"};
    if (!(model.consistency_bound >= 0 && model.consistency_bound <= 1))
        throw ConfigError{"noise model: consistency bound must lie in [0, 1]"};
}

int64_t emulate_sensor(int64_t true_value, const SensorNoiseModel& model, std::mt19937_64& rng)
{
    const double t = static_cast<double>(std::max<int64_t>(true_value, 0));
    std::normal_distribution<double> noise{0.0, model.rmse_ug_m3};
    const double sample = std::round(t + noise(rng));
    const double lo = std::ceil(t * (1 - model.consistency_bound));
    const double hi = std::floor(t * (1 + model.consistency_bound));
    return std::max<int64_t>(0, static_cast<int64_t>(std::clamp(sample, lo, hi)));
}

bool within_envelope(const SensorNoiseModel& model, double temp_c, double humidity_pct) noexcept
{
    return temp_c >= model.temp_min_c && temp_c <= model.temp_max_c &&
           humidity_pct >= model.humidity_min_pct && humidity_pct <= model.humidity_max_pct;
}

EmulatedDevice::EmulatedDevice(DeviceConfig config)
  : config_{std::move(config)}, rng_{config_.seed}
{
    check(config_.noise);
}

std::string EmulatedDevice::sample_serial(const Ambient& ambient)
{
    RawReading raw;
    raw.pm1_0 = emulate_sensor(ambient.pm1_0, config_.noise, rng_);
    raw.pm2_5 = emulate_sensor(ambient.pm2_5, config_.noise, rng_);
    raw.pm10_0 = emulate_sensor(ambient.pm10_0, config_.noise, rng_);
    return format_serial(raw);
}

std::optional<family::AirReading> EmulatedDevice::read(const Ambient& ambient, int64_t now_s)
{
    const auto text = sample_serial(ambient);
    if (!within_envelope(config_.noise, ambient.temp_c, ambient.humidity_pct))
        return std::nullopt;
    const auto parsed = parser_.feed(text);
    if (parsed.size() != 1)
        return std::nullopt;
    const auto& raw = parsed.front();
    family::AirReading r;
    r.pm1_0 = family::calibrate(raw.pm1_0, config_.calibration);
    r.pm2_5 = family::calibrate(raw.pm2_5, config_.calibration);
    r.pm10_0 = family::calibrate(raw.pm10_0, config_.calibration);
    r.lat_udeg = config_.lat_udeg;
    r.lon_udeg = config_.lon_udeg;
    r.timestamp_s = now_s;
    r.source_flag = config_.source_flag;
    r.reporter_public_key = config_.key.public_key;
    return r;
}
}  // namespace airchain::ingest
