// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "family/airquality.hpp"
#include "common/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>

namespace airchain::family
{
namespace mp = boost::multiprecision;

std::string_view to_string(SourceFlag flag) noexcept
{
    switch (flag)
    {
    case SourceFlag::citizen:
        return "citizen";
    case SourceFlag::government:
        return "government";
    case SourceFlag::institutional:
        return "institutional";
    case SourceFlag::other:
        return "other";
    }
    return "other";
}

std::optional<SourceFlag> parse_source_flag(std::string_view s) noexcept
{
    for (const auto f :
        {SourceFlag::citizen, SourceFlag::government, SourceFlag::institutional, SourceFlag::other})
    {
        if (to_string(f) == s)
            return f;
    }
    return std::nullopt;
}

codec::Record to_record(const AirReading& r)
{
    return codec::Record{{"pm1_0", r.pm1_0}, {"pm2_5", r.pm2_5}, {"pm10_0", r.pm10_0},
        {"lat_udeg", r.lat_udeg}, {"lon_udeg", r.lon_udeg}, {"timestamp_s", r.timestamp_s},
        {"source_flag", to_string(r.source_flag)}, {"reporter_public_key", r.reporter_public_key}};
}

AirReading reading_from_record(const codec::Record& rec)
{
    codec::expect_keys(rec, {"pm1_0", "pm2_5", "pm10_0", "lat_udeg", "lon_udeg", "timestamp_s",
                                "source_flag", "reporter_public_key"});
    AirReading r;
    r.pm1_0 = codec::get_int(rec, "pm1_0");
    r.pm2_5 = codec::get_int(rec, "pm2_5");
    r.pm10_0 = codec::get_int(rec, "pm10_0");
    r.lat_udeg = codec::get_int(rec, "lat_udeg");
    r.lon_udeg = codec::get_int(rec, "lon_udeg");
    r.timestamp_s = codec::get_int(rec, "timestamp_s");
    const auto flag = parse_source_flag(codec::get_string(rec, "source_flag"));
    if (!flag)
        throw CodecError("unknown source_flag");
    r.source_flag = *flag;
    r.reporter_public_key = codec::get_string(rec, "reporter_public_key");
    return r;
}

Bytes encode_reading(const AirReading& r)
{
    return codec::encode_bytes(to_record(r));
}

AirReading decode_reading(ByteView payload)
{
    return reading_from_record(codec::decode(payload));
}

std::vector<std::string> validate_reading(const AirReading& r, std::optional<int64_t> clock_s)
{
    std::vector<std::string> v;
    const auto check_pm = [&](std::string_view name, int64_t value) {
        if (value < 0 || value > kPmMax)
            v.push_back("pm out of range: " + std::string{name} + "=" + std::to_string(value));
    };
    check_pm("pm1_0", r.pm1_0);
    check_pm("pm2_5", r.pm2_5);
    check_pm("pm10_0", r.pm10_0);
    if (r.lat_udeg < -kLatMaxUdeg || r.lat_udeg > kLatMaxUdeg)
        v.push_back("latitude out of range: " + std::to_string(r.lat_udeg));
    if (r.lon_udeg < -kLonMaxUdeg || r.lon_udeg > kLonMaxUdeg)
        v.push_back("longitude out of range: " + std::to_string(r.lon_udeg));
    if (!is_lower_hex(r.reporter_public_key, crypto::kPublicKeyHexLen))
        v.push_back("malformed reporter public key");
    if (clock_s && r.timestamp_s > *clock_s + kFutureSkewS)
        v.push_back("timestamp in the future: " + std::to_string(r.timestamp_s - *clock_s) +
                    " s ahead of validator clock");
    return v;
}

std::string geohash(int64_t lat_udeg, int64_t lon_udeg, size_t precision)
{
    static constexpr char kBase32[] = "0123456789bcdefghjkmnpqrstuvwxyz";
    // Coordinates scaled by 2^32; bisection midpoints are exact integers.
    constexpr int kShift = 32;
    const auto scaled = [](int64_t v) { return static_cast<__int128>(v) << kShift; };
    __int128 lat_lo = scaled(-kLatMaxUdeg), lat_hi = scaled(kLatMaxUdeg);
    __int128 lon_lo = scaled(-kLonMaxUdeg), lon_hi = scaled(kLonMaxUdeg);
    const __int128 lat = scaled(std::clamp(lat_udeg, -kLatMaxUdeg, kLatMaxUdeg));
    const __int128 lon = scaled(std::clamp(lon_udeg, -kLonMaxUdeg, kLonMaxUdeg));

    std::string out;
    bool even = true;  // even bits refine longitude
    int bit = 0, ch = 0;
    while (out.size() < precision)
    {
        auto& lo = even ? lon_lo : lat_lo;
        auto& hi = even ? lon_hi : lat_hi;
        const __int128 value = even ? lon : lat;
        const __int128 mid = (lo + hi) / 2;
        ch <<= 1;
        if (value >= mid)
        {
            ch |= 1;
            lo = mid;
        }
        else
            hi = mid;
        even = !even;
        if (++bit == 5)
        {
            out.push_back(kBase32[ch]);
            bit = 0;
            ch = 0;
        }
    }
    return out;
}

int64_t hour_bucket(int64_t timestamp_s) noexcept
{
    int64_t q = timestamp_s / 3600;
    if (timestamp_s % 3600 != 0 && timestamp_s < 0)
        --q;
    return q;
}

std::string reading_address(const AirReading& r)
{
    const auto key = r.reporter_public_key + geohash(r.lat_udeg, r.lon_udeg) +
                     std::to_string(hour_bucket(r.timestamp_s));
    return std::string{kAirQualityNamespace} + crypto::sha512_hex(key).substr(0, 64);
}

namespace
{
mp::cpp_rational rational(int64_t num, int64_t den)
{
    if (den == 0)
        throw Error("calibration denominator is zero");
    return mp::cpp_rational{mp::cpp_int{num}, mp::cpp_int{den}};
}

mp::cpp_int floor_div(const mp::cpp_int& a, const mp::cpp_int& b)
{
    mp::cpp_int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

std::pair<int64_t, int64_t> to_int_pair(const mp::cpp_rational& q)
{
    const auto num = mp::numerator(q);
    const auto den = mp::denominator(q);
    const mp::cpp_int lim = std::numeric_limits<int64_t>::max();
    if (num > lim || num < -lim || den > lim)
        throw Error("calibration coefficient overflows 64-bit integers");
    return {static_cast<int64_t>(num), static_cast<int64_t>(den)};
}
}  // namespace

int64_t calibrate(int64_t raw, const CalibrationModel& model)
{
    const auto x = rational(model.slope_num, model.slope_den) * raw +
                   rational(model.intercept_num, model.intercept_den) + mp::cpp_rational{1, 2};
    const auto rounded = floor_div(mp::numerator(x), mp::denominator(x));
    if (rounded < 0)
        return 0;
    if (rounded > kPmMax)
        return kPmMax;
    return static_cast<int64_t>(rounded);
}

CalibrationModel fit_calibration(std::span<const std::pair<int64_t, int64_t>> pairs)
{
    if (pairs.size() < 2)
        throw Error("calibration fit needs at least two points");
    mp::cpp_int n = pairs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pairs)
    {
        sx += x;
        sy += y;
        sxx += mp::cpp_int{x} * x;
        sxy += mp::cpp_int{x} * y;
    }
    const mp::cpp_int denom = n * sxx - sx * sx;
    if (denom == 0)
        throw Error("calibration fit needs variance in raw values");
    const mp::cpp_rational slope{n * sxy - sx * sy, denom};
    const mp::cpp_rational intercept = (mp::cpp_rational{sy} - slope * sx) / mp::cpp_rational{n};
    const auto [sn, sd] = to_int_pair(slope);
    const auto [in, id] = to_int_pair(intercept);
    return {sn, sd, in, id};
}

ledger::Transaction make_reading_transaction(const AirReading& r, const crypto::KeyPair& signer,
    std::string nonce)
{
    const auto address = reading_address(r);
    ledger::TransactionSpec spec{std::string{kAirQualityFamily}, std::string{kAirQualityVersion},
        encode_reading(r), {address}, {address}};
    return ledger::build_transaction(spec, signer, std::move(nonce));
}

ApplyResult AirQualityHandler::apply(
    const ledger::Transaction& txn, const StateReader& state, const ExecContext& ctx) const
{
    ApplyResult result;
    AirReading reading;
    try
    {
        reading = decode_reading(txn.payload);
    }
    catch (const CodecError& e)
    {
        result.violations.push_back(std::string{"payload codec error: "} + e.what());
        return result;
    }
    result.violations = validate_reading(reading, ctx.clock_s);
    if (reading.reporter_public_key != txn.header.signer_public_key)
        result.violations.push_back("reporter does not match transaction signer");
    if (!result.ok())
        return result;

    const auto address = reading_address(reading);
    auto encoded = encode_reading(reading);
    if (const auto existing = state.get(address))
    {
        // Newest timestamp wins; equal timestamps fall back to byte order.
        const auto stored = decode_reading(*existing);
        const bool newer = reading.timestamp_s > stored.timestamp_s ||
                           (reading.timestamp_s == stored.timestamp_s && encoded > *existing);
        if (!newer)
            return result;
    }
    result.delta.emplace(address, std::move(encoded));
    return result;
}
}  // namespace airchain::family
