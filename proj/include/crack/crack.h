/* C API for the CRACK causal-direction engine.
 *
 * All functions return crack_status; rich results come back as
 * heap-allocated JSON strings that the caller releases with
 * crack_string_free. Datasets are opaque handles.
 */
#ifndef CRACK_H
#define CRACK_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CRACK_OK = 0,
    CRACK_ERR_INPUT = 2,
    CRACK_ERR_INTERNAL = 3
} crack_status;

typedef struct crack_dataset crack_dataset;

const char* crack_version(void);

void crack_string_free(char* s);

/* types: NULL to infer, or a comma list of b/c/n tokens per column.
 * x_cols / y_cols: comma/range lists of 0-based column indices. */
crack_status crack_dataset_load_csv(const char* path, const char* types,
                                    const char* x_cols, const char* y_cols,
                                    crack_dataset** out, char** error);

void crack_dataset_free(crack_dataset* d);

size_t crack_dataset_rows(const crack_dataset* d);
size_t crack_dataset_cols(const crack_dataset* d);

/* options_json keys (all optional): indicator ("delta"|"nci"), epsilon,
 * marginal ("domain"|"res"), precision.
 * On success *verdict_json holds the CausalVerdict document. */
crack_status crack_infer(const crack_dataset* d, const char* options_json,
                         char** verdict_json, char** error);

/* Dependency DAG of the directed search (target side conditioned on the
 * other), as Graphviz DOT. side is "xy" or "yx". */
crack_status crack_export_dag(const crack_dataset* d, const char* side,
                              const char* options_json, char** dot_text,
                              char** error);

/* spec_json keys: k, l, n, phi, pairs, seed, type ("nominal"|"numeric"|
 * "mixed"), q_range, noise_sd_factor. Writes pair CSVs plus JSON sidecars
 * into out_dir; *manifest_json lists the files. */
crack_status crack_generate(const char* spec_json, const char* out_dir,
                            char** manifest_json, char** error);

/* grid_json: {"cells":[{spec...},...], "pairs":N, options...}.
 * *results_json holds per-cell accuracy rows. */
crack_status crack_sweep(const char* grid_json, char** results_json, char** error);

/* Benchmark directory of pair files + metadata; *summary_json holds
 * weighted accuracy, the decision-rate curve, and per-pair results. */
crack_status crack_bench(const char* directory, const char* options_json,
                         char** summary_json, char** error);

/* Table of NML multinomial regrets for n in [0,n_max], k in [1,k_max]. */
crack_status crack_nml_table(long n_max, int k_max, char** table_json, char** error);

#ifdef __cplusplus
}
#endif

#endif /* CRACK_H */
