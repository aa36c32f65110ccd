#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace crack {

const char* attr_type_name(AttrType t) {
    switch (t) {
        case AttrType::Binary: return "binary";
        case AttrType::Categorical: return "categorical";
        case AttrType::Numeric: return "numeric";
    }
    return "?";
}

double domain_size(const Attribute& a) {
    if (is_nominal(a.type)) return static_cast<double>(a.category_count);
    return (a.vmax - a.vmin) / a.resolution + 1.0;
}

double robust_min_diff(const std::vector<double>& values, double fraction,
                       bool* constant_out) {
    if (constant_out) *constant_out = false;
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() < 2) {
        if (constant_out) *constant_out = true;
        return 1.0;
    }
    std::vector<double> diffs;
    diffs.reserve(sorted.size() - 1);
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        double d = sorted[i] - sorted[i - 1];
        if (d > 0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        if (constant_out) *constant_out = true;
        return 1.0;
    }
    std::sort(diffs.begin(), diffs.end());
    std::size_t k = static_cast<std::size_t>(
        std::max(1.0, std::round(fraction * static_cast<double>(values.size()))));
    if (k > diffs.size()) k = diffs.size();
    return diffs[k - 1];
}

namespace {

bool parse_number(const std::string& s, double* out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return false;
    if (!std::isfinite(v)) return false;
    *out = v;
    return true;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<AttrType> infer_schema(const std::vector<std::string>& header,
                                   const std::vector<std::vector<std::string>>& rows) {
    std::vector<AttrType> types;
    for (std::size_t c = 0; c < header.size(); ++c) {
        bool all_numeric = true;
        std::vector<std::string> distinct;
        for (const auto& row : rows) {
            const std::string& cell = row[c];
            if (cell.empty())
                throw InputError("missing value in column '" + header[c] + "'");
            double v;
            if (!parse_number(cell, &v)) all_numeric = false;
            if (std::find(distinct.begin(), distinct.end(), cell) == distinct.end() &&
                distinct.size() <= 2)
                distinct.push_back(cell);
        }
        if (rows.empty()) throw InputError("empty dataset");
        if (all_numeric)
            types.push_back(AttrType::Numeric);
        else if (distinct.size() == 2)
            types.push_back(AttrType::Binary);
        else
            types.push_back(AttrType::Categorical);
    }
    return types;
}

std::vector<int> parse_selector(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty()) continue;
        std::size_t dash = part.find('-', 1);
        if (dash != std::string::npos) {
            int lo = std::stoi(part.substr(0, dash));
            int hi = std::stoi(part.substr(dash + 1));
            if (lo > hi) throw InputError("bad range '" + part + "'");
            for (int i = lo; i <= hi; ++i) out.push_back(i);
        } else {
            out.push_back(std::stoi(part));
        }
    }
    if (out.empty()) throw InputError("empty column selector");
    return out;
}

std::vector<AttrType> parse_type_string(const std::string& spec) {
    std::vector<AttrType> out;
    if (spec.empty()) return out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part == "b" || part == "binary")
            out.push_back(AttrType::Binary);
        else if (part == "c" || part == "categorical")
            out.push_back(AttrType::Categorical);
        else if (part == "n" || part == "numeric")
            out.push_back(AttrType::Numeric);
        else
            throw InputError("unknown type token '" + part + "'");
    }
    return out;
}

void finalize_attribute(Attribute& a, double resolution_fraction) {
    if (is_nominal(a.type)) {
        a.resolution = 1.0;
        int max_code = -1;
        for (int c : a.codes) max_code = std::max(max_code, c);
        if (a.category_count < max_code + 1) a.category_count = max_code + 1;
        a.constant = a.category_count <= 1;
        // with a single observed category the column carries no information
        if (!a.codes.empty()) {
            int first = a.codes.front();
            a.constant = std::all_of(a.codes.begin(), a.codes.end(),
                                     [&](int c) { return c == first; });
        }
    } else {
        if (a.values.empty()) {
            a.vmin = a.vmax = 0;
            a.resolution = 1.0;
            a.constant = true;
            return;
        }
        a.vmin = *std::min_element(a.values.begin(), a.values.end());
        a.vmax = *std::max_element(a.values.begin(), a.values.end());
        bool constant = false;
        a.resolution = robust_min_diff(a.values, resolution_fraction, &constant);
        a.constant = constant;
    }
}

Dataset build_dataset(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows,
                      const LoadOptions& opts) {
    if (rows.empty()) throw InputError("empty dataset");
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != header.size())
            throw InputError("ragged row " + std::to_string(r + 1) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(rows[r].size()));

    std::vector<AttrType> types;
    if (!opts.schema_override.empty()) {
        if (opts.schema_override.size() != header.size())
            throw InputError("type override has " +
                             std::to_string(opts.schema_override.size()) +
                             " entries for " + std::to_string(header.size()) +
                             " columns");
        types = opts.schema_override;
    } else {
        types = infer_schema(header, rows);
    }

    Dataset d;
    d.n = rows.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        Attribute a;
        a.name = header[c];
        a.type = types[c];
        if (is_nominal(a.type)) {
            std::unordered_map<std::string, int> code_of;
            for (const auto& row : rows) {
                const std::string& cell = row[c];
                if (cell.empty())
                    throw InputError("missing value in column '" + a.name + "'");
                auto it = code_of.find(cell);
                if (it == code_of.end()) {
                    it = code_of.emplace(cell, static_cast<int>(a.categories.size()))
                             .first;
                    a.categories.push_back(cell);
                }
                a.codes.push_back(it->second);
            }
            a.category_count = static_cast<int>(a.categories.size());
            if (a.type == AttrType::Binary && a.category_count > 2)
                throw InputError("column '" + a.name + "' declared binary but has " +
                                 std::to_string(a.category_count) + " values");
        } else {
            for (const auto& row : rows) {
                double v;
                if (!parse_number(row[c], &v))
                    throw InputError("unparseable numeric cell '" + row[c] +
                                     "' in column '" + a.name + "'");
                a.values.push_back(v);
            }
        }
        finalize_attribute(a, opts.resolution_fraction);
        d.attributes.push_back(std::move(a));
    }

    auto check_indices = [&](const std::vector<int>& idx, const char* which) {
        for (int i : idx)
            if (i < 0 || static_cast<std::size_t>(i) >= d.m())
                throw InputError(std::string(which) + " selector references column " +
                                 std::to_string(i) + " but file has " +
                                 std::to_string(d.m()) + " columns");
    };
    if (!opts.x_selector.empty()) d.x_indices = parse_selector(opts.x_selector);
    if (!opts.y_selector.empty()) d.y_indices = parse_selector(opts.y_selector);
    check_indices(d.x_indices, "x");
    check_indices(d.y_indices, "y");
    for (int xi : d.x_indices)
        for (int yi : d.y_indices)
            if (xi == yi)
                throw InputError("overlapping selectors: column " +
                                 std::to_string(xi) + " is in both X and Y");
    return d;
}

Dataset load_csv(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, opts.delimiter)) cells.push_back(trim(cell));
        if (!line.empty() && line.back() == opts.delimiter) cells.push_back("");
        if (first && opts.header) {
            header = cells;
            first = false;
            continue;
        }
        if (first) {  // headerless: synthesize column names
            for (std::size_t i = 0; i < cells.size(); ++i)
                header.push_back("col" + std::to_string(i));
            first = false;
        }
        rows.push_back(std::move(cells));
    }
    if (header.empty()) throw InputError("empty dataset");
    return build_dataset(header, rows, opts);
}

DatasetView project(const Dataset& d, Side side) {
    const auto& idx = side == Side::X ? d.x_indices : d.y_indices;
    if (idx.empty())
        throw InputError(side == Side::X ? "empty X side" : "empty Y side");
    return DatasetView{&d, idx};
}

Dataset swap_sides(const Dataset& d) {
    Dataset out = d;
    std::swap(out.x_indices, out.y_indices);
    return out;
}

std::string to_csv(const Dataset& d) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t c = 0; c < d.m(); ++c)
        out << d.attributes[c].name << (c + 1 < d.m() ? "," : "\n");
    for (std::size_t r = 0; r < d.n; ++r) {
        for (std::size_t c = 0; c < d.m(); ++c) {
            const Attribute& a = d.attributes[c];
            if (is_nominal(a.type)) {
                int code = a.codes[r];
                if (static_cast<std::size_t>(code) < a.categories.size())
                    out << a.categories[static_cast<std::size_t>(code)];
                else
                    out << code;
            } else {
                out << a.values[r];
            }
            out << (c + 1 < d.m() ? "," : "\n");
        }
    }
    return out.str();
}

}  // namespace crack
