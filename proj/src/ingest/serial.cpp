// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ingest/serial.hpp"

#include <charconv>

namespace airchain::ingest
{
namespace
{
constexpr std::string_view kDelimiter = "\r\n";
constexpr size_t kMaxDiagnostics = 256;
constexpr size_t kMaxLine = 256;

std::optional<int64_t> parse_value(std::string_view text, std::string_view label)
{
    if (!text.starts_with(label))
        return std::nullopt;
    text.remove_prefix(label.size());
    if (text.empty() || text.size() > 7)
        return std::nullopt;
    int64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || v < 0)
        return std::nullopt;
    return v;
}
}  // namespace

std::string format_serial(const RawReading& r)
{
    return "PM1: " + std::to_string(r.pm1_0) + "\r\nPM2.5: " + std::to_string(r.pm2_5) +
           "\r\nPM10: " + std::to_string(r.pm10_0) + "\r\n";
}

std::vector<RawReading> SerialParser::feed(std::string_view chunk)
{
    std::vector<RawReading> out;
    carry_.append(chunk);
    size_t start = 0;
    for (size_t pos; (pos = carry_.find(kDelimiter, start)) != std::string::npos; start = pos + kDelimiter.size())
        line(std::string_view{carry_}.substr(start, pos - start), out);
    carry_.erase(0, start);
    if (carry_.size() > kMaxLine)
    {
        // A trailing CR stays in the carry.
        const bool cr = carry_.back() == '\r';
        skip(carry_.substr(0, 32), "line too long");
        carry_ = cr ? "\r" : "";
    }
    return out;
}

void SerialParser::line(std::string_view text, std::vector<RawReading>& out)
{
    if (text.empty())
        return;
    if (text.starts_with("PM1:"))
    {
        const auto v = parse_value(text, "PM1: ");
        if (!v)
            return skip(text, "malformed PM1 value");
        if (pm1_)
            skip("PM1", "incomplete triple dropped");
        pm1_ = v;
        pm25_.reset();
    }
    else if (text.starts_with("PM2.5:"))
    {
        const auto v = parse_value(text, "PM2.5: ");
        if (!v)
            return skip(text, "malformed PM2.5 value");
        if (!pm1_ || pm25_)
        {
            pm1_.reset();
            pm25_.reset();
            return skip(text, "out of order");
        }
        pm25_ = v;
    }
    else if (text.starts_with("PM10:"))
    {
        const auto v = parse_value(text, "PM10: ");
        if (!v)
            return skip(text, "malformed PM10 value");
        if (!pm1_ || !pm25_)
        {
            pm1_.reset();
            pm25_.reset();
            return skip(text, "out of order");
        }
        out.push_back({*pm1_, *pm25_, *v});
        pm1_.reset();
        pm25_.reset();
    }
    else
        skip(text, "unrecognised line");
}

void SerialParser::skip(std::string_view text, std::string_view why)
{
    if (diagnostics_.size() < kMaxDiagnostics)
        diagnostics_.push_back(std::string{why} + ": " + std::string{text.substr(0, 64)});
}
}  // namespace airchain::ingest
