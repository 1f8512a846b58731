#include "mimo/metric_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "mimo/atomic_file.hpp"
#include "mimo/error.hpp"

namespace mimo {

MetricTable::MetricTable(std::vector<std::string> sample_ids, std::vector<std::string> organs)
    : sample_ids_(std::move(sample_ids)), organs_(std::move(organs)) {
    const std::size_t cells = sample_ids_.size() * organs_.size();
    dice_.assign(cells, 0.0);
    hd_.assign(cells, 0.0);
    conf_.assign(cells, 0.0);
}

std::vector<double> MetricTable::column(const std::vector<double>& values, std::size_t organ) const {
    if (organ >= organs_.size()) throw Error("organ column " + std::to_string(organ) + " out of range");
    std::vector<double> out(sample_ids_.size());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = values[cell(s, organ)];
    return out;
}

std::vector<double> MetricTable::dice_column(std::size_t organ) const { return column(dice_, organ); }
std::vector<double> MetricTable::hd_column(std::size_t organ) const { return column(hd_, organ); }
std::vector<double> MetricTable::conf_column(std::size_t organ) const { return column(conf_, organ); }

MetricTable MetricTable::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (auto r : rows) {
        if (r >= sample_ids_.size()) throw Error("row " + std::to_string(r) + " out of range");
        ids.push_back(sample_ids_[r]);
    }
    MetricTable out(std::move(ids), organs_);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < organs_.size(); ++j) {
            out.dice(i, j) = dice(rows[i], j);
            out.hd(i, j) = hd(rows[i], j);
            out.conf(i, j) = conf(rows[i], j);
        }
    return out;
}

void MetricTable::validate() const {
    if (sample_ids_.empty()) throw Error("metric table has no samples");
    if (organs_.empty()) throw Error("metric table has no organs");
    std::set<std::string> seen(sample_ids_.begin(), sample_ids_.end());
    if (seen.size() != sample_ids_.size()) throw Error("metric table has duplicate sample ids");
    std::set<std::string> organs(organs_.begin(), organs_.end());
    if (organs.size() != organs_.size()) throw Error("metric table has duplicate organs");

    for (std::size_t s = 0; s < sample_count(); ++s)
        for (std::size_t j = 0; j < organ_count(); ++j) {
            auto where = [&] { return " for sample '" + sample_ids_[s] + "', organ '" + organs_[j] + "'"; };
            const double d = dice(s, j), h = hd(s, j), c = conf(s, j);
            if (!(d >= 0.0 && d <= 1.0)) throw Error("dice " + format_number(d) + " outside [0,1]" + where());
            if (std::isnan(h) || h < 0.0) throw Error("hd " + format_number(h) + " is negative or NaN" + where());
            if (!(c >= 0.0 && c <= 1.0)) throw Error("conf " + format_number(c) + " outside [0,1]" + where());
        }
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buffer, end);
}

namespace {

double parse_number(const std::string& text, std::size_t line) {
    if (text == "inf" || text == "+inf" || text == "Infinity") return std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || end != last || text.empty())
        throw Error("metric csv line " + std::to_string(line) + ": bad number '" + text + "'");
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

void write_metric_csv(std::ostream& out, const MetricTable& table) {
    out << "sample_id,organ,dice,hd,conf\n";
    for (std::size_t s = 0; s < table.sample_count(); ++s)
        for (std::size_t j = 0; j < table.organ_count(); ++j)
            out << table.sample_ids()[s] << ',' << table.organs()[j] << ',' << format_number(table.dice(s, j)) << ','
                << format_number(table.hd(s, j)) << ',' << format_number(table.conf(s, j)) << '\n';
}

void write_metric_csv(const std::filesystem::path& path, const MetricTable& table) {
    std::ostringstream out;
    write_metric_csv(out, table);
    write_file_atomic(path, out.str());
}

MetricTable read_metric_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("metric csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "sample_id,organ,dice,hd,conf")
        throw Error("metric csv header must be 'sample_id,organ,dice,hd,conf', got '" + line + "'");

    struct Row {
        std::string sample, organ;
        double dice, hd, conf;
    };
    std::vector<Row> rows;
    std::vector<std::string> samples, organs;
    std::map<std::string, std::size_t> sample_index, organ_index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw Error("metric csv line " + std::to_string(line_no) + ": expected 5 fields, got " +
                        std::to_string(fields.size()));
        Row row{fields[0], fields[1], parse_number(fields[2], line_no), parse_number(fields[3], line_no),
                parse_number(fields[4], line_no)};
        if (sample_index.emplace(row.sample, samples.size()).second) samples.push_back(row.sample);
        if (organ_index.emplace(row.organ, organs.size()).second) organs.push_back(row.organ);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("metric csv has no data rows");

    MetricTable table(samples, organs);
    std::vector<bool> filled(samples.size() * organs.size(), false);
    for (const auto& row : rows) {
        const std::size_t s = sample_index[row.sample], j = organ_index[row.organ];
        const std::size_t flat = s * organs.size() + j;
        if (filled[flat]) throw Error("metric csv repeats cell (" + row.sample + ", " + row.organ + ")");
        filled[flat] = true;
        table.dice(s, j) = row.dice;
        table.hd(s, j) = row.hd;
        table.conf(s, j) = row.conf;
    }
    for (std::size_t flat = 0; flat < filled.size(); ++flat)
        if (!filled[flat])
            throw Error("metric csv lacks cell (" + samples[flat / organs.size()] + ", " +
                        organs[flat % organs.size()] + ")");
    table.validate();
    return table;
}

MetricTable read_metric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open metric csv '" + path.string() + "'");
    try {
        return read_metric_csv(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace mimo
