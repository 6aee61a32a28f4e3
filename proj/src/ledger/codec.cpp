// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ledger/codec.hpp"
#include "common/error.hpp"

namespace airchain::codec
{
namespace
{
void check_kinds(const Record& r)
{
    switch (r.type())
    {
    case Record::value_t::object:
        for (const auto& [_, v] : r.items())
            check_kinds(v);
        return;
    case Record::value_t::array:
        for (const auto& v : r)
            check_kinds(v);
        return;
    case Record::value_t::string:
    case Record::value_t::number_integer:
    case Record::value_t::number_unsigned:
        return;
    case Record::value_t::number_float:
        throw CodecError("fractional numbers are not encodable");
    case Record::value_t::boolean:
        throw CodecError("booleans are not encodable");
    case Record::value_t::null:
        throw CodecError("null is not encodable");
    default:
        throw CodecError("unsupported value kind");
    }
}
}  // namespace

std::string encode(const Record& record)
{
    check_kinds(record);
    try
    {
        return record.dump(-1, ' ', false, Record::error_handler_t::strict);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw CodecError(std::string{"encoding failed: "} + e.what());
    }
}

Record decode(std::string_view text)
{
    Record r;
    try
    {
        r = Record::parse(text);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw CodecError(std::string{"malformed record: "} + e.what());
    }
    check_kinds(r);
    return r;
}

const Record& field(const Record& r, std::string_view key)
{
    if (!r.is_object())
        throw CodecError("record is not an object");
    const auto it = r.find(key);
    if (it == r.end())
        throw CodecError("missing field '" + std::string{key} + "'");
    return *it;
}

std::string get_string(const Record& r, std::string_view key)
{
    const auto& v = field(r, key);
    if (!v.is_string())
        throw CodecError("field '" + std::string{key} + "' is not a string");
    return v.get<std::string>();
}

int64_t get_int(const Record& r, std::string_view key)
{
    const auto& v = field(r, key);
    if (v.is_number_unsigned())
    {
        const auto u = v.get<uint64_t>();
        if (u > static_cast<uint64_t>(INT64_MAX))
            throw CodecError("field '" + std::string{key} + "' overflows");
        return static_cast<int64_t>(u);
    }
    if (!v.is_number_integer())
        throw CodecError("field '" + std::string{key} + "' is not an integer");
    return v.get<int64_t>();
}

uint64_t get_uint(const Record& r, std::string_view key)
{
    const auto& v = field(r, key);
    if (v.is_number_unsigned())
        return v.get<uint64_t>();
    if (v.is_number_integer() && v.get<int64_t>() >= 0)
        return static_cast<uint64_t>(v.get<int64_t>());
    throw CodecError("field '" + std::string{key} + "' is not a non-negative integer");
}

std::string get_hex(const Record& r, std::string_view key, size_t len)
{
    auto s = get_string(r, key);
    if (!is_lower_hex(s, len))
        throw CodecError("field '" + std::string{key} + "' is not " + std::to_string(len) +
                         " lowercase hex characters");
    return s;
}

std::vector<std::string> get_string_list(const Record& r, std::string_view key)
{
    const auto& v = field(r, key);
    if (!v.is_array())
        throw CodecError("field '" + std::string{key} + "' is not a list");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v)
    {
        if (!item.is_string())
            throw CodecError("field '" + std::string{key} + "' holds a non-string");
        out.push_back(item.get<std::string>());
    }
    return out;
}

void expect_keys(const Record& r, std::initializer_list<std::string_view> keys)
{
    if (!r.is_object())
        throw CodecError("record is not an object");
    for (const auto k : keys)
    {
        if (!r.contains(k))
            throw CodecError("missing field '" + std::string{k} + "'");
    }
    if (r.size() != keys.size())
        throw CodecError("record has unexpected fields");
}
}  // namespace airchain::codec
