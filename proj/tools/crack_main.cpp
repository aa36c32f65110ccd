#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crack/crack.h"

using nlohmann::json;

namespace {

struct Scoped {
    char* s = nullptr;
    ~Scoped() { crack_string_free(s); }
};

int report(crack_status st, const char* error) {
    if (st == CRACK_OK) return 0;
    std::cerr << "error: " << (error ? error : "unknown failure") << "\n";
    return static_cast<int>(st);
}

int default_threads() {
    if (const char* env = std::getenv("CRACK_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

/// "0:1:0.25" -> {0, 0.25, 0.5, 0.75, 1}; a bare number is a single value.
std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> out;
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) {
        out.push_back(parts[0]);
    } else if (parts.size() == 3 && parts[2] > 0) {
        for (double v = parts[0]; v <= parts[1] + 1e-12; v += parts[2])
            out.push_back(v);
    } else {
        throw CLI::ValidationError("range", "expected VALUE or LO:HI:STEP, got '" + spec + "'");
    }
    return out;
}

struct CommonOpts {
    std::string indicator = "nci";
    double epsilon = 0.0;
    std::string marginal = "domain";
    double precision = 0.001;

    json to_json() const {
        return {{"indicator", indicator},
                {"epsilon", epsilon},
                {"marginal", marginal},
                {"precision", precision}};
    }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--indicator", o.indicator, "Causal indicator")
        ->check(CLI::IsMember({"delta", "nci"}));
    cmd->add_option("--epsilon", o.epsilon, "Decision margin")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--marginal", o.marginal, "Numeric marginal prior")
        ->check(CLI::IsMember({"domain", "res"}));
    cmd->add_option("--precision", o.precision, "Regression parameter precision")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crack: MDL-based causal direction inference"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(crack_version()));
    bool verbose = false;
    app.add_flag("--verbose", verbose, "Progress diagnostics on stderr");

    // infer
    auto* infer = app.add_subcommand("infer", "Infer causal direction from a CSV file");
    std::string in_path, types, x_cols, y_cols, dag_path;
    CommonOpts io;
    infer->add_option("file", in_path, "Input CSV")->required();
    infer->add_option("--types", types, "Comma list of b/c/n per column");
    infer->add_option("--x", x_cols, "X columns, e.g. 0,2-4")->required();
    infer->add_option("--y", y_cols, "Y columns")->required();
    infer->add_option("--dag", dag_path, "Write the winning direction's DAG as DOT");
    add_common(infer, io);

    // generate
    auto* gen = app.add_subcommand("generate", "Write synthetic cause-effect pairs");
    int gk = 3, gl = 3, gpairs = 1;
    long gn = 5000;
    double gphi = 1.0;
    std::uint64_t gseed = 0;
    std::string gtype = "mixed", gout = ".";
    gen->add_option("--k", gk, "Cause attributes")->check(CLI::PositiveNumber);
    gen->add_option("--l", gl, "Effect attributes")->check(CLI::PositiveNumber);
    gen->add_option("--n", gn, "Rows per pair")->check(CLI::PositiveNumber);
    gen->add_option("--phi", gphi, "Dependency probability")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--pairs", gpairs, "Number of pairs")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gseed, "RNG seed");
    gen->add_option("--type", gtype, "Attribute types")
        ->check(CLI::IsMember({"nominal", "numeric", "mixed"}));
    gen->add_option("--out", gout, "Output directory");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Accuracy grid over synthetic pairs");
    std::string sphi = "1", stype = "mixed", scsv;
    std::vector<int> sk = {3}, sl = {3};
    long sn = 1000;
    int spairs = 50, sthreads = default_threads();
    std::uint64_t sseed = 0;
    double sconf = -1.0;
    CommonOpts so;
    sweep->add_option("--phi", sphi, "Value or LO:HI:STEP range");
    sweep->add_option("--k", sk, "Cause attribute counts");
    sweep->add_option("--l", sl, "Effect attribute counts");
    sweep->add_option("--n", sn, "Rows per pair")->check(CLI::PositiveNumber);
    sweep->add_option("--pairs", spairs, "Pairs per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sseed, "Base RNG seed");
    sweep->add_option("--type", stype, "Attribute types")
        ->check(CLI::IsMember({"nominal", "numeric", "mixed"}));
    sweep->add_option("--threads", sthreads, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--confidence-threshold", sconf,
                      "Minimum confidence to count a verdict as decided");
    sweep->add_option("--csv", scsv, "Also write rows as CSV to this path");
    add_common(sweep, so);

    // bench
    auto* bench = app.add_subcommand("bench", "Evaluate a benchmark pair directory");
    std::string bdir, bcurve;
    int bthreads = default_threads();
    CommonOpts bo;
    bench->add_option("dir", bdir, "Directory with pair files and metadata")->required();
    bench->add_option("--threads", bthreads, "Worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--curve", bcurve, "Write the decision-rate curve as CSV");
    add_common(bench, bo);

    // nml-table
    auto* nml = app.add_subcommand("nml-table", "Dump NML multinomial regret table");
    long nmax = 100;
    int kmax = 5;
    nml->add_option("--n", nmax, "Max sample size")->check(CLI::NonNegativeNumber);
    nml->add_option("--k", kmax, "Max category count")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (infer->parsed()) {
        Scoped err, verdict;
        crack_dataset* d = nullptr;
        crack_status st = crack_dataset_load_csv(
            in_path.c_str(), types.empty() ? nullptr : types.c_str(),
            x_cols.c_str(), y_cols.c_str(), &d, &err.s);
        if (st != CRACK_OK) return report(st, err.s);
        if (verbose)
            std::cerr << "loaded " << crack_dataset_rows(d) << " rows x "
                      << crack_dataset_cols(d) << " columns\n";
        std::string opts = io.to_json().dump();
        st = crack_infer(d, opts.c_str(), &verdict.s, &err.s);
        if (st != CRACK_OK) {
            crack_dataset_free(d);
            return report(st, err.s);
        }
        std::cout << verdict.s << "\n";
        if (!dag_path.empty()) {
            json v = json::parse(verdict.s);
            std::string side = v["direction"] == "y->x" ? "yx" : "xy";
            Scoped dot;
            st = crack_export_dag(d, side.c_str(), opts.c_str(), &dot.s, &err.s);
            if (st != CRACK_OK) {
                crack_dataset_free(d);
                return report(st, err.s);
            }
            std::ofstream out(dag_path);
            if (!out) {
                std::cerr << "error: cannot write " << dag_path << "\n";
                crack_dataset_free(d);
                return 2;
            }
            out << dot.s;
            if (verbose) std::cerr << "wrote " << dag_path << "\n";
        }
        crack_dataset_free(d);
        return 0;
    }

    if (gen->parsed()) {
        json spec = {{"k", gk},       {"l", gl},     {"n", gn},
                     {"phi", gphi},   {"seed", gseed}, {"type", gtype},
                     {"pairs", gpairs}};
        Scoped err, manifest;
        crack_status st =
            crack_generate(spec.dump().c_str(), gout.c_str(), &manifest.s, &err.s);
        if (st != CRACK_OK) return report(st, err.s);
        std::cout << manifest.s << "\n";
        return 0;
    }

    if (sweep->parsed()) {
        json grid = so.to_json();
        grid["pairs"] = spairs;
        grid["threads"] = sthreads;
        if (sconf >= 0) grid["confidence_threshold"] = sconf;
        grid["cells"] = json::array();
        std::vector<double> phis;
        try {
            phis = parse_range(sphi);
        } catch (const CLI::ValidationError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        for (double phi : phis)
            for (int k : sk)
                for (int l : sl)
                    grid["cells"].push_back({{"phi", phi},
                                             {"k", k},
                                             {"l", l},
                                             {"n", sn},
                                             {"seed", sseed},
                                             {"type", stype}});
        if (verbose)
            std::cerr << "sweeping " << grid["cells"].size() << " cells x " << spairs
                      << " pairs on " << sthreads << " threads\n";
        Scoped err, results;
        crack_status st = crack_sweep(grid.dump().c_str(), &results.s, &err.s);
        if (st != CRACK_OK) return report(st, err.s);
        std::cout << results.s << "\n";
        if (!scsv.empty()) {
            json r = json::parse(results.s);
            std::ofstream out(scsv);
            if (!out) {
                std::cerr << "error: cannot write " << scsv << "\n";
                return 2;
            }
            out << "phi,k,l,type,pairs,decided,correct,decided_fraction,accuracy\n";
            for (const auto& row : r["rows"]) {
                out << row["phi"].get<double>() << "," << row["k"].get<int>() << ","
                    << row["l"].get<int>() << "," << row["type"].get<std::string>()
                    << "," << row["pairs"].get<int>() << ","
                    << row["decided"].get<int>() << "," << row["correct"].get<int>()
                    << "," << row["decided_fraction"].get<double>() << ",";
                if (row["accuracy"].is_null())
                    out << "nan";
                else
                    out << row["accuracy"].get<double>();
                out << "\n";
            }
        }
        return 0;
    }

    if (bench->parsed()) {
        json opts = bo.to_json();
        opts["threads"] = bthreads;
        Scoped err, summary;
        crack_status st =
            crack_bench(bdir.c_str(), opts.dump().c_str(), &summary.s, &err.s);
        if (st != CRACK_OK) return report(st, err.s);
        std::cout << summary.s << "\n";
        json s = json::parse(summary.s);
        for (const auto& w : s["warnings"])
            std::cerr << "warning: " << w.get<std::string>() << "\n";
        if (!bcurve.empty()) {
            std::ofstream out(bcurve);
            if (!out) {
                std::cerr << "error: cannot write " << bcurve << "\n";
                return 2;
            }
            out << "rate,accuracy\n";
            for (const auto& p : s["decision_rate"])
                out << p["rate"].get<double>() << "," << p["accuracy"].get<double>()
                    << "\n";
        }
        return 0;
    }

    if (nml->parsed()) {
        Scoped err, table;
        crack_status st = crack_nml_table(nmax, kmax, &table.s, &err.s);
        if (st != CRACK_OK) return report(st, err.s);
        std::cout << table.s << "\n";
        return 0;
    }

    return 0;
}
