#include "phi4ion/table.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace phi4ion::io {

void ResultTable::add_meta(const std::string& key, double value) {
    meta.emplace_back(key, format_number(value));
}

std::vector<Cell>& ResultTable::new_row() {
    rows.emplace_back();
    return rows.back();
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    for (const auto& [k, v] : table.meta) out << "# " << k << " = " << v << "\n";
    if (!table.run_info.empty()) out << "# run: " << table.run_info << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::logic_error("to_csv: row width does not match column count");
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (row[c].numeric ? format_number(row[c].num) : row[c].text);
            out << (c + 1 < row.size() ? "," : "");
        }
        out << "\n";
    }
    return out.str();
}

std::string to_json(const ResultTable& table) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : table.meta) meta[k] = v;
    doc["meta"] = std::move(meta);
    if (!table.run_info.empty()) doc["run"] = table.run_info;
    doc["columns"] = table.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& cell : row) {
            if (!cell.numeric)
                r.push_back(cell.text);
            else if (std::isfinite(cell.num))
                r.push_back(cell.num);
            else
                r.push_back(format_number(cell.num));  // JSON has no nan/inf literals
        }
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

ResultTable from_csv(const std::string& text) {
    ResultTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# run: ", 0) == 0) {
            table.run_info = line.substr(7);
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            const std::size_t eq = line.find(" = ");
            if (eq == std::string::npos) throw std::runtime_error("from_csv: bad meta line: " + line);
            table.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
            continue;
        }
        if (!have_header) {
            table.columns = split(line, ',');
            have_header = true;
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != table.columns.size())
            throw std::runtime_error("from_csv: row width mismatch: " + line);
        auto& row = table.new_row();
        for (auto& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() + f.size() && !f.empty())
                row.push_back(Cell::number(v));
            else
                row.push_back(Cell::str(f));
        }
    }
    return table;
}

std::string stable_body(const std::string& serialized) {
    std::istringstream in(serialized);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("# run: ", 0) != 0 && line.find("\"run\"") == std::string::npos)
            out << line << "\n";
    return out.str();
}

std::string digest_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace phi4ion::io
