#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crack {

struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class AttrType { Binary, Categorical, Numeric };

inline bool is_nominal(AttrType t) { return t != AttrType::Numeric; }

const char* attr_type_name(AttrType t);

/// One typed column. Nominal columns hold dense category codes in
/// first-appearance order; numeric columns hold finite reals.
struct Attribute {
    std::string name;
    AttrType type = AttrType::Numeric;

    std::vector<int> codes;       // nominal only
    std::vector<double> values;   // numeric only

    double resolution = 1.0;      // 1 for nominal
    double vmin = 0.0, vmax = 0.0;  // numeric only
    int category_count = 0;       // nominal only
    std::vector<std::string> categories;  // code -> label, nominal only
    bool constant = false;

    std::size_t size() const {
        return is_nominal(type) ? codes.size() : values.size();
    }
};

struct Dataset {
    std::vector<Attribute> attributes;
    std::size_t n = 0;
    std::vector<int> x_indices;
    std::vector<int> y_indices;

    std::size_t m() const { return attributes.size(); }
};

enum class Side { X, Y };

/// Effective number of representable values of an attribute (nominal:
/// category count; numeric: range over resolution plus one).
double domain_size(const Attribute& a);

/// Resolution estimate: the k-th smallest strictly positive adjacent
/// difference of the sorted values, k = max(1, round(fraction * n)).
/// All-equal columns fall back to 1 and set *constant_out.
double robust_min_diff(const std::vector<double>& values, double fraction,
                       bool* constant_out = nullptr);

std::vector<AttrType> infer_schema(const std::vector<std::string>& header,
                                   const std::vector<std::vector<std::string>>& rows);

/// Parse selectors like "0,2-4" into 0-based column indices.
std::vector<int> parse_selector(const std::string& spec);

/// Parse a "--types b,c,n" override; empty string means infer.
std::vector<AttrType> parse_type_string(const std::string& spec);

struct LoadOptions {
    std::vector<AttrType> schema_override;  // empty -> infer
    std::string x_selector;
    std::string y_selector;
    double resolution_fraction = 0.1;
    char delimiter = ',';
    bool header = true;
};

Dataset load_csv(const std::string& path, const LoadOptions& opts);

/// Build a Dataset from already-parsed text cells (same pipeline as load_csv).
Dataset build_dataset(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows,
                      const LoadOptions& opts);

/// Finalize an attribute whose raw values were filled in directly:
/// sets min/max, resolution (via robust_min_diff), and the constant flag.
void finalize_attribute(Attribute& a, double resolution_fraction = 0.1);

/// Read-only projection onto one side. Indices refer into the parent Dataset.
struct DatasetView {
    const Dataset* data = nullptr;
    std::vector<int> indices;

    const Attribute& attribute(std::size_t i) const {
        return data->attributes[indices[i]];
    }
    std::size_t size() const { return indices.size(); }
};

DatasetView project(const Dataset& d, Side side);

/// Swap which attribute set is labelled X and which Y.
Dataset swap_sides(const Dataset& d);

/// Header + rows back out as comma-separated text (nominal cells as labels).
std::string to_csv(const Dataset& d);

}  // namespace crack
