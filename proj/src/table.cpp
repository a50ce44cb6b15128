#include "stringvec/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stringvec/hash.hpp"
#include "stringvec/ngram.hpp"

namespace stringvec {

const Column* Table::find(std::string_view header) const noexcept {
    for (const auto& c : columns)
        if (c.header == header) return &c;
    return nullptr;
}

int Table::column_index(std::string_view header) const noexcept {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].header == header) return static_cast<int>(i);
    return -1;
}

Table Table::select_rows(const std::vector<int>& rows) const {
    Table out;
    out.name = name;
    out.n_rows = rows.size();
    out.columns.reserve(columns.size());
    for (const auto& c : columns) {
        Column nc;
        nc.header = c.header;
        nc.values.reserve(rows.size());
        for (int r : rows) nc.values.push_back(c.values.at(static_cast<std::size_t>(r)));
        out.columns.push_back(std::move(nc));
    }
    return out;
}

Table Table::drop_column(std::string_view header) const {
    Table out;
    out.name = name;
    out.n_rows = n_rows;
    for (const auto& c : columns)
        if (c.header != header) out.columns.push_back(c);
    return out;
}

namespace {

std::vector<std::vector<std::string>> split_records(std::string_view text, char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_started = false;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    cell.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                cell.push_back(c);
                ++i;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            row_started = true;
            ++i;
        } else if (c == delimiter) {
            row.push_back(std::move(cell));
            cell.clear();
            row_started = true;
            ++i;
        } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
            if (row_started) {
                row.push_back(std::move(cell));
                cell.clear();
                records.push_back(std::move(row));
                row.clear();
                row_started = false;
            }
            i += 2;  // blank lines are skipped
        } else if (c == '\n') {
            if (row_started) {
                row.push_back(std::move(cell));
                cell.clear();
                records.push_back(std::move(row));
                row.clear();
                row_started = false;
            }
            ++i;
        } else {
            cell.push_back(c);
            row_started = true;
            ++i;
        }
    }
    if (in_quotes) throw CsvError("unterminated quoted field");
    if (row_started || !row.empty() || !cell.empty()) {
        row.push_back(std::move(cell));
        records.push_back(std::move(row));
    }
    return records;
}

} // namespace

Table parse_csv(std::string_view text, char delimiter, bool has_header, std::string name) {
    // Strip a UTF-8 BOM if present.
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    if (!valid_utf8(text)) throw CsvError("input is not valid UTF-8");

    auto records = split_records(text, delimiter);
    if (records.empty()) throw CsvError("empty input");

    std::vector<std::string> headers;
    std::size_t first_data = 0;
    const std::size_t width = records[0].size();
    if (has_header) {
        headers = records[0];
        first_data = 1;
        std::unordered_set<std::string> seen;
        for (const auto& h : headers)
            if (!seen.insert(h).second) throw CsvError("duplicate header: " + h);
    } else {
        headers.reserve(width);
        for (std::size_t j = 0; j < width; ++j) headers.push_back("col" + std::to_string(j));
    }

    if (records.size() <= first_data) throw CsvError("no data rows");

    Table table;
    table.name = std::move(name);
    table.columns.resize(width);
    for (std::size_t j = 0; j < width; ++j) table.columns[j].header = headers[j];

    for (std::size_t r = first_data; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw CsvError("inconsistent row width at record " + std::to_string(r + 1) + ": expected " +
                           std::to_string(width) + ", got " + std::to_string(records[r].size()));
        }
        for (std::size_t j = 0; j < width; ++j)
            table.columns[j].values.push_back(std::move(records[r][j]));
    }
    table.n_rows = records.size() - first_data;
    return table;
}

Table load_csv(const std::string& path, char delimiter, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw CsvError("read failure: " + path);
    std::string stem = path;
    if (auto pos = stem.find_last_of('/'); pos != std::string::npos) stem = stem.substr(pos + 1);
    if (auto pos = stem.find_last_of('.'); pos != std::string::npos) stem = stem.substr(0, pos);
    return parse_csv(buf.str(), delimiter, has_header, stem);
}

namespace {

std::string csv_escape(const std::string& cell, char delimiter) {
    bool needs_quotes = cell.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
    if (!needs_quotes) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

std::string csv_to_string(const Table& table, char delimiter) {
    // Single-column tables quote empty cells so the row is not read back as
    // a skippable blank line.
    const bool quote_empty = table.columns.size() == 1;
    std::string out;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out.push_back(delimiter);
        const std::string& header = table.columns[j].header;
        if (header.empty() && quote_empty) out += "\"\"";
        else out += csv_escape(header, delimiter);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j) out.push_back(delimiter);
            const std::string& cell = table.columns[j].values[r];
            if (cell.empty() && quote_empty) out += "\"\"";
            else out += csv_escape(cell, delimiter);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const Table& table, const std::string& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open file for writing: " + path);
    out << csv_to_string(table, delimiter);
    if (!out) throw CsvError("write failure: " + path);
}

const char* column_kind_name(ColumnKind k) noexcept {
    switch (k) {
        case ColumnKind::Numeric: return "numeric";
        case ColumnKind::Datetime: return "datetime";
        case ColumnKind::LowCardCategorical: return "low_card_categorical";
        case ColumnKind::MidCardCategorical: return "mid_card_categorical";
        case ColumnKind::Text: return "text";
    }
    return "unknown";
}

std::optional<double> parse_number(std::string_view cell) {
    std::size_t begin = 0, end = cell.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(cell[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(cell[end - 1]))) --end;
    if (begin == end) return std::nullopt;

    std::string body(cell.substr(begin, end - begin));
    char* parse_end = nullptr;
    double v = std::strtod(body.c_str(), &parse_end);
    if (parse_end != body.c_str() + body.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool read_int(std::string_view s, std::size_t& pos, int digits_min, int digits_max, int& out) {
    int v = 0, used = 0;
    while (pos < s.size() && used < digits_max && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        v = v * 10 + (s[pos] - '0');
        ++pos;
        ++used;
    }
    if (used < digits_min) return false;
    out = v;
    return true;
}

} // namespace

std::optional<DateTimeParts> parse_datetime(std::string_view cell) {
    std::size_t begin = 0, end = cell.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(cell[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(cell[end - 1]))) --end;
    std::string_view s = cell.substr(begin, end - begin);
    if (s.empty()) return std::nullopt;

    std::size_t pos = 0;
    int year, month, day;
    if (!read_int(s, pos, 4, 4, year)) return std::nullopt;
    if (pos >= s.size() || (s[pos] != '-' && s[pos] != '/')) return std::nullopt;
    const char sep = s[pos++];
    if (!read_int(s, pos, 1, 2, month)) return std::nullopt;
    if (pos >= s.size() || s[pos] != sep) return std::nullopt;
    ++pos;
    if (!read_int(s, pos, 1, 2, day)) return std::nullopt;

    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;

    int hour = 0, minute = 0, second = 0;
    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
        ++pos;
        if (!read_int(s, pos, 1, 2, hour)) return std::nullopt;
        if (pos >= s.size() || s[pos] != ':') return std::nullopt;
        ++pos;
        if (!read_int(s, pos, 2, 2, minute)) return std::nullopt;
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!read_int(s, pos, 2, 2, second)) return std::nullopt;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                int frac;
                if (!read_int(s, pos, 1, 9, frac)) return std::nullopt;
            }
        }
        if (pos < s.size() && s[pos] == 'Z') ++pos;
        if (pos != s.size()) return std::nullopt;
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    }

    DateTimeParts parts;
    parts.year = year;
    parts.month = month;
    parts.day = day;
    parts.hour = hour;
    // 1970-01-01 was a Thursday; shift so Monday = 0.
    std::int64_t z = days_from_civil(year, month, day);
    parts.weekday = static_cast<int>(((z + 3) % 7 + 7) % 7);
    return parts;
}

ColumnKind infer_kind(const std::vector<std::string>& values) {
    std::size_t non_empty = 0, numeric = 0, datetime = 0;
    std::unordered_set<std::string_view> distinct;
    for (const auto& v : values) {
        if (v.empty()) continue;
        ++non_empty;
        if (parse_number(v)) ++numeric;
        else if (parse_datetime(v)) ++datetime;
        distinct.insert(v);
    }
    if (non_empty > 0) {
        const double threshold = 0.99 * static_cast<double>(non_empty);
        if (static_cast<double>(numeric) >= threshold) return ColumnKind::Numeric;
        if (static_cast<double>(datetime) >= threshold) return ColumnKind::Datetime;
    }
    const std::size_t d = distinct.size();
    if (d <= 10) return ColumnKind::LowCardCategorical;
    if (d <= 30) return ColumnKind::MidCardCategorical;
    return ColumnKind::Text;
}

std::vector<std::pair<std::string, ColumnKind>> infer_column_kinds(const Table& table) {
    if (table.n_rows == 0 || table.columns.empty())
        throw std::invalid_argument("infer_column_kinds: table must be non-empty");
    std::vector<std::pair<std::string, ColumnKind>> kinds;
    kinds.reserve(table.columns.size());
    for (const auto& c : table.columns) kinds.emplace_back(c.header, infer_kind(c.values));
    return kinds;
}

SupervisedDataset binarize_and_balance(const Table& table, const std::string& target_header,
                                       std::uint64_t seed, const std::string& group_header,
                                       bool drop_group_from_features) {
    const Column* target = table.find(target_header);
    if (!target) throw std::invalid_argument("target column not found: " + target_header);
    const Column* group = nullptr;
    if (!group_header.empty()) {
        group = table.find(group_header);
        if (!group) throw std::invalid_argument("group column not found: " + group_header);
    }

    // Rows with an empty target are unusable for supervision.
    std::vector<int> usable;
    for (std::size_t r = 0; r < table.n_rows; ++r)
        if (!target->values[r].empty()) usable.push_back(static_cast<int>(r));
    if (usable.empty()) throw std::invalid_argument("target column has no non-empty cells");

    std::unordered_set<std::string> distinct;
    bool all_numeric = true;
    for (int r : usable) {
        const std::string& v = target->values[static_cast<std::size_t>(r)];
        distinct.insert(v);
        if (!parse_number(v)) all_numeric = false;
    }
    if (distinct.size() < 2)
        throw std::invalid_argument("target column has a single distinct value");

    std::vector<int> labels(usable.size());
    if (distinct.size() == 2) {
        // Binary categorical target: smaller value (numeric order when both
        // parse, else lexicographic) is class 0.
        std::vector<std::string> vals(distinct.begin(), distinct.end());
        if (all_numeric) {
            std::sort(vals.begin(), vals.end(), [](const std::string& a, const std::string& b) {
                return *parse_number(a) < *parse_number(b);
            });
        } else {
            std::sort(vals.begin(), vals.end());
        }
        for (std::size_t i = 0; i < usable.size(); ++i)
            labels[i] = target->values[static_cast<std::size_t>(usable[i])] == vals[1] ? 1 : 0;
    } else if (all_numeric) {
        std::vector<double> nums(usable.size());
        for (std::size_t i = 0; i < usable.size(); ++i)
            nums[i] = *parse_number(target->values[static_cast<std::size_t>(usable[i])]);
        std::vector<double> sorted = nums;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        double median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        for (std::size_t i = 0; i < usable.size(); ++i) labels[i] = nums[i] > median ? 1 : 0;
    } else {
        throw std::invalid_argument("target column must be numeric or binary categorical");
    }

    std::vector<int> pos, neg;
    for (std::size_t i = 0; i < usable.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(static_cast<int>(i));
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("binarization produced a single class");

    std::vector<int>& majority = pos.size() >= neg.size() ? pos : neg;
    const std::size_t keep = std::min(pos.size(), neg.size());
    if (majority.size() > keep) {
        SplitMix64 rng(seed);
        for (std::size_t i = 0; i < keep; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.bounded(majority.size() - i));
            std::swap(majority[i], majority[j]);
        }
        majority.resize(keep);
    }

    std::vector<int> kept;
    kept.reserve(2 * keep);
    kept.insert(kept.end(), pos.begin(), pos.end());
    kept.insert(kept.end(), neg.begin(), neg.end());
    std::sort(kept.begin(), kept.end());

    SupervisedDataset out;
    out.source_rows.reserve(kept.size());
    out.labels.reserve(kept.size());
    for (int i : kept) {
        out.source_rows.push_back(usable[static_cast<std::size_t>(i)]);
        out.labels.push_back(labels[static_cast<std::size_t>(i)]);
    }

    Table features = table.drop_column(target_header);
    if (group && drop_group_from_features) features = features.drop_column(group_header);
    out.features = features.select_rows(out.source_rows);

    if (group) {
        out.group_keys.reserve(out.source_rows.size());
        for (int r : out.source_rows) out.group_keys.push_back(group->values[static_cast<std::size_t>(r)]);
    }
    return out;
}

} // namespace stringvec
