// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace airchain::consensus
{
enum class Algorithm
{
    pbft,
    poet_cft,
    raft,
};

constexpr std::string_view to_string(Algorithm a) noexcept
{
    switch (a)
    {
    case Algorithm::pbft:
        return "pbft";
    case Algorithm::poet_cft:
        return "poet_cft";
    case Algorithm::raft:
        return "raft";
    }
    return "pbft";
}

constexpr std::optional<Algorithm> parse_algorithm(std::string_view s) noexcept
{
    for (const auto a : {Algorithm::pbft, Algorithm::poet_cft, Algorithm::raft})
    {
        if (to_string(a) == s)
            return a;
    }
    return std::nullopt;
}
}  // namespace airchain::consensus
