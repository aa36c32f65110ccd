#include "crack/crack.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bench.hpp"

using nlohmann::json;

struct crack_dataset {
    crack::Dataset data;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_error(char** error, const std::string& msg) {
    if (error) *error = dup_string(msg);
}

template <typename Fn>
crack_status guarded(char** error, Fn&& fn) {
    try {
        fn();
        return CRACK_OK;
    } catch (const crack::InputError& e) {
        set_error(error, e.what());
        return CRACK_ERR_INPUT;
    } catch (const json::exception& e) {
        set_error(error, e.what());
        return CRACK_ERR_INPUT;
    } catch (const std::exception& e) {
        set_error(error, e.what());
        return CRACK_ERR_INTERNAL;
    }
}

crack::Indicator parse_indicator(const std::string& s) {
    if (s == "delta") return crack::Indicator::Delta;
    if (s == "nci") return crack::Indicator::Nci;
    throw crack::InputError("unknown indicator '" + s + "'");
}

crack::MarginalMode parse_marginal(const std::string& s) {
    if (s == "domain") return crack::MarginalMode::Domain;
    if (s == "res") return crack::MarginalMode::Res;
    throw crack::InputError("unknown marginal mode '" + s + "'");
}

crack::TypeMode parse_type_mode(const std::string& s) {
    if (s == "nominal") return crack::TypeMode::Nominal;
    if (s == "numeric") return crack::TypeMode::Numeric;
    if (s == "mixed") return crack::TypeMode::Mixed;
    throw crack::InputError("unknown type mode '" + s + "'");
}

json parse_options(const char* options_json) {
    if (!options_json || !*options_json) return json::object();
    return json::parse(options_json);
}

crack::InferenceOptions inference_options(const json& j) {
    crack::InferenceOptions io;
    if (j.contains("indicator")) io.indicator = parse_indicator(j["indicator"]);
    if (j.contains("epsilon")) io.epsilon = j["epsilon"].get<double>();
    if (j.contains("marginal")) io.marginal = parse_marginal(j["marginal"]);
    if (j.contains("precision")) io.search.precision = j["precision"].get<double>();
    if (io.epsilon < 0) throw crack::InputError("epsilon must be >= 0");
    return io;
}

crack::BenchOptions bench_options(const json& j) {
    crack::BenchOptions bo;
    if (j.contains("indicator")) bo.indicator = parse_indicator(j["indicator"]);
    if (j.contains("epsilon")) bo.epsilon = j["epsilon"].get<double>();
    if (j.contains("marginal")) bo.marginal = parse_marginal(j["marginal"]);
    if (j.contains("precision")) bo.precision = j["precision"].get<double>();
    if (j.contains("confidence_threshold"))
        bo.confidence_threshold = j["confidence_threshold"].get<double>();
    if (j.contains("threads")) bo.threads = j["threads"].get<int>();
    if (j.contains("undecided_as_half"))
        bo.undecided_as_half = j["undecided_as_half"].get<bool>();
    return bo;
}

crack::SyntheticSpec synthetic_spec(const json& j) {
    crack::SyntheticSpec spec;
    if (j.contains("k")) spec.k = j["k"].get<int>();
    if (j.contains("l")) spec.l = j["l"].get<int>();
    if (j.contains("n")) spec.n = j["n"].get<long>();
    if (j.contains("phi")) spec.phi = j["phi"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("type")) spec.type_mode = parse_type_mode(j["type"]);
    if (j.contains("q_range")) spec.q_range = j["q_range"].get<std::vector<double>>();
    if (j.contains("noise_sd_factor"))
        spec.noise_sd_factor = j["noise_sd_factor"].get<double>();
    spec.validate();
    return spec;
}

json spec_to_json(const crack::SyntheticSpec& spec) {
    json j;
    j["k"] = spec.k;
    j["l"] = spec.l;
    j["n"] = spec.n;
    j["phi"] = spec.phi;
    j["seed"] = spec.seed;
    switch (spec.type_mode) {
        case crack::TypeMode::Nominal: j["type"] = "nominal"; break;
        case crack::TypeMode::Numeric: j["type"] = "numeric"; break;
        case crack::TypeMode::Mixed: j["type"] = "mixed"; break;
    }
    j["q_range"] = spec.q_range;
    j["noise_sd_factor"] = spec.noise_sd_factor;
    return j;
}

json sweep_rows_to_json(const std::vector<crack::SweepRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json e;
        e["phi"] = r.phi;
        e["k"] = r.k;
        e["l"] = r.l;
        e["type"] = r.type_mode;
        e["pairs"] = r.pairs;
        e["decided"] = r.decided;
        e["correct"] = r.correct;
        e["decided_fraction"] = r.decided_fraction;
        if (std::isnan(r.accuracy))
            e["accuracy"] = nullptr;
        else
            e["accuracy"] = r.accuracy;
        arr.push_back(e);
    }
    return arr;
}

}  // namespace

extern "C" {

const char* crack_version(void) { return "0.1.0"; }

void crack_string_free(char* s) { std::free(s); }

crack_status crack_dataset_load_csv(const char* path, const char* types,
                                    const char* x_cols, const char* y_cols,
                                    crack_dataset** out, char** error) {
    return guarded(error, [&] {
        if (!path || !out) throw crack::InputError("null argument");
        crack::LoadOptions lo;
        if (types && *types) lo.schema_override = crack::parse_type_string(types);
        if (x_cols) lo.x_selector = x_cols;
        if (y_cols) lo.y_selector = y_cols;
        auto handle = std::make_unique<crack_dataset>();
        handle->data = crack::load_csv(path, lo);
        *out = handle.release();
    });
}

void crack_dataset_free(crack_dataset* d) { delete d; }

size_t crack_dataset_rows(const crack_dataset* d) { return d ? d->data.n : 0; }
size_t crack_dataset_cols(const crack_dataset* d) { return d ? d->data.m() : 0; }

crack_status crack_infer(const crack_dataset* d, const char* options_json,
                         char** verdict_json, char** error) {
    return guarded(error, [&] {
        if (!d || !verdict_json) throw crack::InputError("null argument");
        json j = parse_options(options_json);
        crack::InferenceOptions io = inference_options(j);
        crack::InferenceOutcome outcome = crack::infer(d->data, io);
        crack::CausalVerdict v = outcome.verdict(io.indicator, io.epsilon);
        *verdict_json = dup_string(crack::verdict_to_json(v, 2));
    });
}

crack_status crack_export_dag(const crack_dataset* d, const char* side,
                              const char* options_json, char** dot_text,
                              char** error) {
    return guarded(error, [&] {
        if (!d || !side || !dot_text) throw crack::InputError("null argument");
        json j = parse_options(options_json);
        crack::InferenceOptions io = inference_options(j);
        std::string s(side);
        crack::Side target;
        if (s == "xy")
            target = crack::Side::Y;
        else if (s == "yx")
            target = crack::Side::X;
        else
            throw crack::InputError("side must be 'xy' or 'yx'");
        crack::ConditionalCost cc = crack::conditional_cost(d->data, target, io.search);
        *dot_text = dup_string(crack::export_dag(cc.search.forest, d->data));
    });
}

crack_status crack_generate(const char* spec_json, const char* out_dir,
                            char** manifest_json, char** error) {
    return guarded(error, [&] {
        if (!spec_json || !out_dir) throw crack::InputError("null argument");
        json j = json::parse(spec_json);
        crack::SyntheticSpec spec = synthetic_spec(j);
        int pairs = j.value("pairs", 1);
        if (pairs < 1) throw crack::InputError("pairs must be >= 1");
        namespace fs = std::filesystem;
        fs::path dir(out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (!fs::is_directory(dir))
            throw crack::InputError("cannot create directory " + dir.string());
        json manifest;
        manifest["spec"] = spec_to_json(spec);
        manifest["files"] = json::array();
        for (int p = 0; p < pairs; ++p) {
            crack::GeneratedPair pair =
                crack::generate_pair(spec, static_cast<std::uint64_t>(p));
            std::string stem = "pair" + std::to_string(p);
            fs::path csv_path = dir / (stem + ".csv");
            fs::path meta_path = dir / (stem + ".json");
            std::ofstream csv(csv_path);
            if (!csv) throw crack::InputError("cannot write " + csv_path.string());
            csv << crack::to_csv(pair.data);
            json meta;
            meta["spec"] = spec_to_json(spec);
            meta["pair_index"] = p;
            meta["swapped"] = pair.swapped;
            meta["ground_truth"] = crack::direction_name(pair.truth);
            json xsel = json::array(), ysel = json::array();
            for (int i : pair.data.x_indices) xsel.push_back(i);
            for (int i : pair.data.y_indices) ysel.push_back(i);
            meta["x_columns"] = xsel;
            meta["y_columns"] = ysel;
            std::ofstream metaf(meta_path);
            metaf << meta.dump(2) << "\n";
            manifest["files"].push_back(
                {{"csv", csv_path.string()}, {"meta", meta_path.string()}});
        }
        if (manifest_json) *manifest_json = dup_string(manifest.dump(2));
    });
}

crack_status crack_sweep(const char* grid_json, char** results_json, char** error) {
    return guarded(error, [&] {
        if (!grid_json || !results_json) throw crack::InputError("null argument");
        json j = json::parse(grid_json);
        crack::BenchOptions bo = bench_options(j);
        int pairs = j.value("pairs", 50);
        std::vector<crack::SweepCell> grid;
        for (const auto& cell : j.at("cells")) {
            crack::SweepCell c;
            c.spec = synthetic_spec(cell);
            c.pairs = pairs;
            grid.push_back(c);
        }
        auto rows = crack::run_sweep(grid, bo);
        json out;
        out["rows"] = sweep_rows_to_json(rows);
        *results_json = dup_string(out.dump(2));
    });
}

crack_status crack_bench(const char* directory, const char* options_json,
                         char** summary_json, char** error) {
    return guarded(error, [&] {
        if (!directory || !summary_json) throw crack::InputError("null argument");
        json j = parse_options(options_json);
        crack::BenchOptions bo = bench_options(j);
        crack::BenchmarkLoad load = crack::load_benchmark_pairs(directory);
        if (load.pairs.empty()) throw crack::InputError("no usable pairs in directory");
        auto results = crack::evaluate_benchmark(load, bo);
        auto curve = crack::decision_rate(results, bo);
        json out;
        out["weighted_accuracy"] = crack::weighted_accuracy(results, bo);
        out["pairs"] = json::array();
        for (const auto& r : results) {
            json e;
            e["id"] = r.id;
            e["truth"] = crack::direction_name(r.truth);
            e["direction"] = crack::direction_name(r.verdict.direction);
            e["score_xy"] = r.verdict.score_xy;
            e["score_yx"] = r.verdict.score_yx;
            e["confidence"] = r.verdict.confidence;
            e["weight"] = r.weight;
            e["correct"] = r.correct();
            e["runtime_ms"] = r.runtime_ms;
            out["pairs"].push_back(e);
        }
        out["decision_rate"] = json::array();
        for (const auto& p : curve)
            out["decision_rate"].push_back({{"rate", p.rate}, {"accuracy", p.accuracy}});
        out["warnings"] = load.warnings;
        *summary_json = dup_string(out.dump(2));
    });
}

crack_status crack_nml_table(long n_max, int k_max, char** table_json, char** error) {
    return guarded(error, [&] {
        if (!table_json) throw crack::InputError("null argument");
        if (n_max < 0 || k_max < 1) throw crack::InputError("n_max >= 0 and k_max >= 1 required");
        json rows = json::array();
        for (long n = 0; n <= n_max; ++n) {
            json row = json::array();
            for (int k = 1; k <= k_max; ++k) row.push_back(crack::nml_regret(n, k));
            rows.push_back(row);
        }
        json out;
        out["n_max"] = n_max;
        out["k_max"] = k_max;
        out["regret_bits"] = rows;
        *table_json = dup_string(out.dump());
    });
}

}  // extern "C"
