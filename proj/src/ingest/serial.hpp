// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace airchain::ingest
{
/// One uncalibrated device sample in µg/m³.
struct RawReading
{
    int64_t pm1_0 = 0;
    int64_t pm2_5 = 0;
    int64_t pm10_0 = 0;

    friend bool operator==(const RawReading&, const RawReading&) = default;
};

/// The device's print layout: three CRLF-terminated lines.
std::string format_serial(const RawReading& r);

/// Incremental parser for the device's serial output. Lines are
/// "PM1: <int>", "PM2.5: <int>" and "PM10: <int>" in that order; each
/// completed triple yields a reading. Anything else is skipped and noted.
class SerialParser
{
public:
    std::vector<RawReading> feed(std::string_view chunk);

    /// Bytes after the last CRLF, held for the next chunk.
    const std::string& carry() const noexcept { return carry_; }
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    void line(std::string_view text, std::vector<RawReading>& out);
    void skip(std::string_view text, std::string_view why);

    std::string carry_;
    std::optional<int64_t> pm1_;
    std::optional<int64_t> pm25_;
    std::vector<std::string> diagnostics_;
};
}  // namespace airchain::ingest
