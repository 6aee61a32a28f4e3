// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "family/airquality.hpp"
#include "ingest/serial.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace airchain::ingest
{
/// Error characteristics of the PMS7003-class sensor.
struct SensorNoiseModel
{
    double rmse_ug_m3 = 2.22;
    double consistency_bound = 0.10;
    double temp_min_c = -10;
    double temp_max_c = 60;
    double humidity_min_pct = 0;
    double humidity_max_pct = 99;
};

/// Throws ConfigError unless rmse > 0 and the bound lies in [0, 1].
void check(const SensorNoiseModel& model);

/// One noisy sample of `true_value`: Gaussian error with sigma = rmse,
/// rounded, then clamped into the consistency window around the true value
/// and floored at zero.
int64_t emulate_sensor(int64_t true_value, const SensorNoiseModel& model, std::mt19937_64& rng);

bool within_envelope(const SensorNoiseModel& model, double temp_c, double humidity_pct) noexcept;

/// Ambient conditions at one instant.
struct Ambient
{
    int64_t pm1_0 = 0;
    int64_t pm2_5 = 0;
    int64_t pm10_0 = 0;
    double temp_c = 20;
    double humidity_pct = 50;
};

struct DeviceConfig
{
    crypto::KeyPair key;
    int64_t lat_udeg = 0;
    int64_t lon_udeg = 0;
    family::SourceFlag source_flag = family::SourceFlag::citizen;
    family::CalibrationModel calibration;
    SensorNoiseModel noise;
    uint64_t seed = 1;
};

/// An emulated device and its host-side preprocessing: samples are printed
/// in the serial layout, parsed back, calibrated, and stamped.
class EmulatedDevice
{
public:
    explicit EmulatedDevice(DeviceConfig config);

    /// Serial output for one sample of `ambient`.
    std::string sample_serial(const Ambient& ambient);

    /// A calibrated reading, or nothing when the sample is outside the
    /// operating envelope or the parser rejected it.
    std::optional<family::AirReading> read(const Ambient& ambient, int64_t now_s);

    const DeviceConfig& config() const noexcept { return config_; }
    const SerialParser& parser() const noexcept { return parser_; }

private:
    DeviceConfig config_;
    std::mt19937_64 rng_;
    SerialParser parser_;
};
}  // namespace airchain::ingest
