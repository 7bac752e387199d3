#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phi4ion::io {

/// Table cell: numeric (formatted at 17 significant digits) or text.
struct Cell {
    bool numeric;
    double num;
    std::string text;

    static Cell number(double v) { return {true, v, {}}; }
    static Cell str(std::string s) { return {false, 0.0, std::move(s)}; }
};

/// Column-labelled numeric/text table with an ordered metadata header. The
/// `run_info` line is volatile (wall clock, thread count) and excluded from
/// the reproducible body.
struct ResultTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::string run_info;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
    void add_meta(const std::string& key, double value);
    std::vector<Cell>& new_row();
};

/// 17-significant-digit formatting used for every numeric field.
std::string format_number(double v);

std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);

/// Parses a CSV document produced by to_csv. Emitting the parsed table again
/// reproduces the input byte for byte.
ResultTable from_csv(const std::string& text);

/// Body of a serialized table: everything except volatile "# run:" lines.
std::string stable_body(const std::string& serialized);

/// FNV-1a 64-bit digest, hex-encoded.
std::string digest_hex(const std::string& text);

}  // namespace phi4ion::io
