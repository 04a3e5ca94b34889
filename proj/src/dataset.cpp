#include "ratekit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ratekit {

std::string_view column_kind_name(ColumnKind kind) {
    switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::text: return "text";
    case ColumnKind::label: return "label";
    }
    return "?";
}

ColumnKind parse_column_kind(std::string_view name) {
    if (name == "numeric") return ColumnKind::numeric;
    if (name == "categorical") return ColumnKind::categorical;
    if (name == "text") return ColumnKind::text;
    if (name == "label") return ColumnKind::label;
    throw ConfigError("unknown column kind: \"" + std::string(name) + "\"");
}

FeatureSchema FeatureSchema::make(std::vector<Column> columns) {
    FeatureSchema s;
    std::set<std::string> seen;
    int n_numeric = 0;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const auto& col = columns[i];
        if (!seen.insert(col.name).second)
            throw ConfigError("duplicate column name in schema: \"" + col.name + "\"");
        switch (col.kind) {
        case ColumnKind::numeric: ++n_numeric; break;
        case ColumnKind::text:
            if (s.text_index_ >= 0) throw ConfigError("schema declares more than one text column");
            s.text_index_ = static_cast<int>(i);
            break;
        case ColumnKind::label:
            if (s.label_index_ >= 0) throw ConfigError("schema declares more than one label column");
            s.label_index_ = static_cast<int>(i);
            break;
        case ColumnKind::categorical: break;
        }
    }
    if (s.label_index_ < 0) throw ConfigError("schema declares no label column");
    if (n_numeric == 0) throw ConfigError("schema declares no numeric column");
    s.columns_ = std::move(columns);
    return s;
}

std::vector<std::string> FeatureSchema::names_of(ColumnKind kind) const {
    std::vector<std::string> out;
    for (const auto& col : columns_)
        if (col.kind == kind) out.push_back(col.name);
    return out;
}

nlohmann::json FeatureSchema::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& col : columns_)
        cols.push_back({{"name", col.name}, {"kind", std::string(column_kind_name(col.kind))}});
    return cols;
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ConfigError("schema must be a JSON array of {name, kind}");
    std::vector<Column> cols;
    for (const auto& item : j) {
        if (!item.contains("name") || !item.contains("kind"))
            throw ConfigError("schema entry missing \"name\" or \"kind\"");
        cols.push_back({item.at("name").get<std::string>(),
                        parse_column_kind(item.at("kind").get<std::string>())});
    }
    return make(std::move(cols));
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.schema = schema;
    out.n_rows = rows.size();
    out.numeric_names = numeric_names;
    out.categorical_names = categorical_names;
    out.numeric.resize(numeric.size());
    for (std::size_t c = 0; c < numeric.size(); ++c) {
        out.numeric[c].reserve(rows.size());
        for (std::size_t r : rows) out.numeric[c].push_back(numeric[c][r]);
    }
    out.categorical.resize(categorical.size());
    for (std::size_t c = 0; c < categorical.size(); ++c) {
        out.categorical[c].reserve(rows.size());
        for (std::size_t r : rows) out.categorical[c].push_back(categorical[c][r]);
    }
    if (text) {
        out.text.emplace();
        out.text->reserve(rows.size());
        for (std::size_t r : rows) out.text->push_back((*text)[r]);
    }
    out.label_raw.reserve(rows.size());
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        out.label_raw.push_back(label_raw[r]);
        out.labels.push_back(labels[r]);
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"' && cur.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string cell_coord(std::size_t row, const std::string& column) {
    return "row " + std::to_string(row) + ", column \"" + column + "\"";
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Dataset load_csv(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("empty file: " + path);
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();

    const auto header = split_csv_line(header_line);
    const auto& cols = schema.columns();
    if (header.size() != cols.size())
        throw DataError(path + ": header has " + std::to_string(header.size()) +
                        " columns, schema declares " + std::to_string(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (header[i] != cols[i].name)
            throw DataError(path + ": header column " + std::to_string(i) + " is \"" + header[i] +
                            "\", schema declares \"" + cols[i].name + "\"");

    Dataset data;
    data.schema = schema;
    data.numeric_names = schema.names_of(ColumnKind::numeric);
    data.categorical_names = schema.names_of(ColumnKind::categorical);
    data.numeric.resize(data.numeric_names.size());
    data.categorical.resize(data.categorical_names.size());
    if (schema.text_column_index() >= 0) data.text.emplace();

    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == EOF) break; // trailing newline
        ++row;
        const auto fields = split_csv_line(line);
        if (fields.size() != cols.size())
            throw DataError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(cols.size()));
        std::size_t num_idx = 0, cat_idx = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const std::string& cell = fields[c];
            switch (cols[c].kind) {
            case ColumnKind::numeric: {
                if (cell.empty()) {
                    data.numeric[num_idx++].push_back(std::nan(""));
                } else {
                    double value = 0.0;
                    const auto res =
                        std::from_chars(cell.data(), cell.data() + cell.size(), value);
                    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                        throw DataError(path + ": unparseable numeric cell \"" + cell + "\" at " +
                                        cell_coord(row, cols[c].name));
                    data.numeric[num_idx++].push_back(value);
                }
                break;
            }
            case ColumnKind::categorical:
                data.categorical[cat_idx++].push_back(
                    cell.empty() ? std::string(kMissingCategory) : cell);
                break;
            case ColumnKind::text: data.text->push_back(cell); break;
            case ColumnKind::label: {
                RatingClass cls;
                try {
                    cls = parse_label(cell);
                } catch (const DataError& e) {
                    throw DataError(path + ": " + e.what() + " at " + cell_coord(row, cols[c].name));
                }
                data.label_raw.push_back(cell);
                data.labels.push_back(class_target(cls));
                break;
            }
            }
        }
    }
    if (row == 0) throw DataError(path + ": no data rows");
    data.n_rows = row;
    return data;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);

    const auto& cols = data.schema.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out << ',';
        out << csv_quote(cols[c].name);
    }
    out << '\n';

    for (std::size_t r = 0; r < data.n_rows; ++r) {
        std::size_t num_idx = 0, cat_idx = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out << ',';
            switch (cols[c].kind) {
            case ColumnKind::numeric: {
                const double v = data.numeric[num_idx++][r];
                if (!std::isnan(v)) out << format_double(v);
                break;
            }
            case ColumnKind::categorical: {
                const std::string& v = data.categorical[cat_idx++][r];
                if (v != kMissingCategory) out << csv_quote(v);
                break;
            }
            case ColumnKind::text: out << csv_quote((*data.text)[r]); break;
            case ColumnKind::label: out << csv_quote(data.label_raw[r]); break;
            }
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace ratekit
