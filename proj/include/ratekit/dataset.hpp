#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratekit/common.hpp"
#include "ratekit/domain.hpp"

namespace ratekit {

enum class ColumnKind { numeric, categorical, text, label };

std::string_view column_kind_name(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view name); // throws ConfigError

struct Column {
    std::string name;
    ColumnKind kind;

    bool operator==(const Column&) const = default;
};

// Ordered column declaration for a dataset file. Exactly one label column,
// at least one numeric column, at most one text column.
class FeatureSchema {
public:
    static FeatureSchema make(std::vector<Column> columns); // throws ConfigError

    const std::vector<Column>& columns() const { return columns_; }

    std::vector<std::string> names_of(ColumnKind kind) const;
    int text_column_index() const { return text_index_; }   // -1 when absent
    int label_column_index() const { return label_index_; }

    nlohmann::json to_json() const;
    static FeatureSchema from_json(const nlohmann::json& j);

    bool operator==(const FeatureSchema&) const = default;

private:
    std::vector<Column> columns_;
    int text_index_ = -1;
    int label_index_ = -1;
};

// Empty categorical cells are loaded as this reserved category and written
// back out as empty cells.
inline constexpr std::string_view kMissingCategory = "⟨missing⟩";

// Column-oriented, immutable-after-load dataset. Missing numeric cells are
// stored as NaN.
struct Dataset {
    FeatureSchema schema;
    std::size_t n_rows = 0;

    std::vector<std::string> numeric_names;
    std::vector<std::vector<double>> numeric; // per column, NaN = missing

    std::vector<std::string> categorical_names;
    std::vector<std::vector<std::string>> categorical;

    std::optional<std::vector<std::string>> text; // at most one text column

    std::vector<std::string> label_raw; // notch or class code, as given
    std::vector<int> labels;            // aggregated class target, 0..8

    // Row-subset copy preserving schema and column order.
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

// Parse one CSV record (RFC-style quoting: fields may be quoted, quoted
// fields may contain commas and doubled quotes). Exposed for tests.
std::vector<std::string> split_csv_line(const std::string& line);

Dataset load_csv(const std::string& path, const FeatureSchema& schema);
void write_csv(const Dataset& data, const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace ratekit
