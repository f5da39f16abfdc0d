#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "treetab/table.hpp"

namespace treetab {

/// Schema-link output: the (table, column) pairs to keep and the ordered
/// foreign-key path that connects their tables into one join tree.
struct ColumnSelection {
    std::vector<std::pair<std::string, std::string>> kept;
    std::vector<ForeignKey> join_path;

    bool operator==(const ColumnSelection& other) const = default;
};

/// Condensation trigger thresholds. max_chars applies to the Markdown
/// encoding of a single table.
struct SizeBudget {
    std::size_t max_cells = 500;
    std::size_t max_chars = 8000;
};

}  // namespace treetab
