#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace crack {

namespace {

const char* type_mode_name(TypeMode t) {
    switch (t) {
        case TypeMode::Nominal: return "nominal";
        case TypeMode::Numeric: return "numeric";
        case TypeMode::Mixed: return "mixed";
    }
    return "?";
}

InferenceOptions to_inference_options(const BenchOptions& opts) {
    InferenceOptions io;
    io.indicator = opts.indicator;
    io.epsilon = opts.epsilon;
    io.marginal = opts.marginal;
    io.search.precision = opts.precision;
    return io;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    int width = std::min<int>(threads, static_cast<int>(count));
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace

PairResult evaluate_pair(const GeneratedPair& pair, const std::string& id,
                         const BenchOptions& opts) {
    PairResult r;
    r.id = id;
    r.truth = pair.truth;
    InferenceOptions io = to_inference_options(opts);
    InferenceOutcome outcome = infer(pair.data, io);
    r.verdict = outcome.verdict(opts.indicator, opts.epsilon);
    r.runtime_ms = outcome.runtime_ms;
    return r;
}

std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& grid,
                                const BenchOptions& opts) {
    std::vector<SweepRow> rows;
    for (const auto& cell : grid) {
        std::vector<PairResult> results(static_cast<std::size_t>(cell.pairs));
        parallel_for(static_cast<std::size_t>(cell.pairs), opts.threads, [&](std::size_t p) {
            GeneratedPair pair = generate_pair(cell.spec, p);
            results[p] = evaluate_pair(pair, "pair" + std::to_string(p), opts);
        });
        SweepRow row;
        row.phi = cell.spec.phi;
        row.k = cell.spec.k;
        row.l = cell.spec.l;
        row.type_mode = type_mode_name(cell.spec.type_mode);
        for (const auto& r : results) {
            row.pairs++;
            if (!r.decided(opts.confidence_threshold)) continue;
            row.decided++;
            if (r.correct()) row.correct++;
        }
        row.decided_fraction = row.pairs ? static_cast<double>(row.decided) / row.pairs : 0.0;
        row.accuracy = row.decided ? static_cast<double>(row.correct) / row.decided
                                   : std::nan("");
        rows.push_back(row);
    }
    return rows;
}

std::vector<DecisionRatePoint> decision_rate(const std::vector<PairResult>& results,
                                             const BenchOptions& opts) {
    if (results.empty()) throw InputError("decision_rate: empty input");
    std::vector<const PairResult*> order;
    for (const auto& r : results) {
        if (r.verdict.direction == Direction::Inconclusive && !opts.undecided_as_half)
            continue;
        order.push_back(&r);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const PairResult* a, const PairResult* b) {
                         return a->verdict.confidence > b->verdict.confidence;
                     });
    std::vector<DecisionRatePoint> curve;
    double weight_sum = 0.0, correct_sum = 0.0;
    double total_weight = 0.0;
    for (const auto* r : order) total_weight += r->weight;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const PairResult& r = *order[i];
        weight_sum += r.weight;
        if (r.verdict.direction == Direction::Inconclusive)
            correct_sum += 0.5 * r.weight;
        else if (r.correct())
            correct_sum += r.weight;
        curve.push_back(DecisionRatePoint{weight_sum / total_weight,
                                          correct_sum / weight_sum});
    }
    return curve;
}

BenchmarkLoad load_benchmark_pairs(const std::string& directory) {
    namespace fs = std::filesystem;
    BenchmarkLoad out;
    fs::path dir(directory);
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + directory);

    fs::path meta_path;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.find("meta") != std::string::npos) {
            meta_path = entry.path();
            break;
        }
    }
    if (meta_path.empty()) throw InputError("no metadata file (*meta*) in " + directory);

    std::ifstream meta(meta_path);
    std::string line;
    while (std::getline(meta, line)) {
        std::istringstream ss(line);
        std::string stem;
        long cs, ce, es, ee;
        double weight;
        if (!(ss >> stem >> cs >> ce >> es >> ee >> weight)) continue;
        // accept both "0001 ..." and "pair0001 ..." stems
        std::string base = stem.rfind("pair", 0) == 0 ? stem : "pair" + stem;
        fs::path pair_path = dir / (base + ".txt");
        if (!fs::exists(pair_path)) {
            out.warnings.push_back("missing pair file: " + pair_path.string());
            continue;
        }
        try {
            std::ifstream in(pair_path);
            std::vector<std::vector<std::string>> rows;
            std::string pline;
            std::size_t width = 0;
            while (std::getline(in, pline)) {
                std::istringstream ps(pline);
                std::vector<std::string> cells;
                std::string cell;
                while (ps >> cell) cells.push_back(cell);
                if (cells.empty()) continue;
                if (width == 0) width = cells.size();
                rows.push_back(std::move(cells));
            }
            std::vector<std::string> header;
            for (std::size_t c = 0; c < width; ++c)
                header.push_back("col" + std::to_string(c));
            LoadOptions lo;
            std::ostringstream xs, ys;
            for (long c = cs; c <= ce; ++c) xs << (c - 1) << (c < ce ? "," : "");
            for (long c = es; c <= ee; ++c) ys << (c - 1) << (c < ee ? "," : "");
            lo.x_selector = xs.str();
            lo.y_selector = ys.str();
            BenchmarkPair bp;
            bp.id = base;
            bp.data = build_dataset(header, rows, lo);
            bp.truth = Direction::XtoY;  // X loaded as the listed cause columns
            bp.weight = weight;
            out.pairs.push_back(std::move(bp));
        } catch (const std::exception& e) {
            out.warnings.push_back(base + ": " + e.what());
        }
    }
    return out;
}

std::vector<PairResult> evaluate_benchmark(const BenchmarkLoad& load,
                                           const BenchOptions& opts) {
    std::vector<PairResult> results(load.pairs.size());
    parallel_for(load.pairs.size(), opts.threads, [&](std::size_t i) {
        const BenchmarkPair& bp = load.pairs[i];
        PairResult r;
        r.id = bp.id;
        r.truth = bp.truth;
        r.weight = bp.weight;
        InferenceOptions io = to_inference_options(opts);
        InferenceOutcome outcome = infer(bp.data, io);
        r.verdict = outcome.verdict(opts.indicator, opts.epsilon);
        r.runtime_ms = outcome.runtime_ms;
        results[i] = std::move(r);
    });
    return results;
}

double weighted_accuracy(const std::vector<PairResult>& results,
                         const BenchOptions& opts) {
    double correct = 0.0, total = 0.0;
    for (const auto& r : results) {
        total += r.weight;
        if (r.verdict.direction == Direction::Inconclusive) {
            if (opts.undecided_as_half) correct += 0.5 * r.weight;
        } else if (r.correct()) {
            correct += r.weight;
        }
    }
    return total > 0 ? correct / total : 0.0;
}

}  // namespace crack
