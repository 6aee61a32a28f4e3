// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "family/handler.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace airchain::family
{
inline constexpr std::string_view kAirQualityFamily = "airquality";
inline constexpr std::string_view kAirQualityVersion = "1.0";
/// Hex of the ASCII letters "air".
inline constexpr std::string_view kAirQualityNamespace = "616972";

inline constexpr int64_t kPmMax = 1000;
inline constexpr int64_t kLatMaxUdeg = 90'000'000;
inline constexpr int64_t kLonMaxUdeg = 180'000'000;
inline constexpr int64_t kFutureSkewS = 300;
inline constexpr size_t kGeohashPrecision = 5;

enum class SourceFlag
{
    citizen,
    government,
    institutional,
    other,
};

std::string_view to_string(SourceFlag flag) noexcept;
std::optional<SourceFlag> parse_source_flag(std::string_view s) noexcept;

/// One PM observation. Concentrations in µg/m³, coordinates in
/// microdegrees, time in Unix seconds.
struct AirReading
{
    int64_t pm1_0 = 0;
    int64_t pm2_5 = 0;
    int64_t pm10_0 = 0;
    int64_t lat_udeg = 0;
    int64_t lon_udeg = 0;
    int64_t timestamp_s = 0;
    SourceFlag source_flag = SourceFlag::citizen;
    std::string reporter_public_key;

    friend bool operator==(const AirReading&, const AirReading&) = default;
};

codec::Record to_record(const AirReading& r);
AirReading reading_from_record(const codec::Record& rec);

/// Canonical encoding of the reading record.
Bytes encode_reading(const AirReading& r);
/// Throws CodecError on malformed or truncated input.
AirReading decode_reading(ByteView payload);

/// Range checks, plus the future-timestamp bound when a clock is supplied.
std::vector<std::string> validate_reading(const AirReading& r, std::optional<int64_t> clock_s);

/// Standard base-32 geohash computed with exact integer bisection.
std::string geohash(int64_t lat_udeg, int64_t lon_udeg, size_t precision = kGeohashPrecision);

/// floor(timestamp / 3600).
int64_t hour_bucket(int64_t timestamp_s) noexcept;

/// "616972" + first 64 hex of SHA-512(reporter ‖ geohash5 ‖ decimal hour bucket).
std::string reading_address(const AirReading& r);

/// Linear correction slope·raw + intercept with exact rational coefficients.
struct CalibrationModel
{
    int64_t slope_num = 1;
    int64_t slope_den = 1;
    int64_t intercept_num = 0;
    int64_t intercept_den = 1;

    friend bool operator==(const CalibrationModel&, const CalibrationModel&) = default;
};

/// round-half-up(slope·raw + intercept), clamped to [0, kPmMax].
int64_t calibrate(int64_t raw, const CalibrationModel& model);

/// Ordinary least squares over (raw, reference) pairs, reduced to lowest
/// terms. Throws Error for fewer than two points or zero variance in raw.
CalibrationModel fit_calibration(std::span<const std::pair<int64_t, int64_t>> pairs);

/// A signed airquality transaction carrying `r`; inputs/outputs declare the
/// reading address.
ledger::Transaction make_reading_transaction(const AirReading& r, const crypto::KeyPair& signer,
    std::string nonce = {});

class AirQualityHandler final : public TransactionHandler
{
public:
    std::string_view family_name() const noexcept override { return kAirQualityFamily; }
    std::string_view family_version() const noexcept override { return kAirQualityVersion; }
    ApplyResult apply(const ledger::Transaction& txn, const StateReader& state,
        const ExecContext& ctx) const override;
};
}  // namespace airchain::family
