/* C interface to the dtek signature-estimation library.
 *
 * All handles are opaque. Every function returns a dtek_status; on failure a
 * message describing the error is available from dtek_last_error() on the
 * calling thread until the next failing call on that thread. Strings handed
 * out by the library are released with dtek_string_free().
 */
#ifndef DTEK_DTEK_H
#define DTEK_DTEK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DTEK_API __declspec(dllexport)
#else
#define DTEK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum dtek_status {
    DTEK_OK = 0,
    DTEK_ERR_INTERNAL = 1, /* unexpected failure */
    DTEK_ERR_CONFIG = 2,   /* invalid arguments, configuration, parse or file errors */
    DTEK_ERR_NUMERIC = 3,  /* domain, dimension or singularity errors */
    DTEK_ERR_RESOURCE = 4  /* memory cap exceeded or allocation failure */
} dtek_status;

typedef struct dtek_config dtek_config;
typedef struct dtek_channel dtek_channel;
typedef struct dtek_estimate dtek_estimate;

DTEK_API const char* dtek_version(void);
DTEK_API const char* dtek_last_error(void);
DTEK_API void dtek_string_free(char* s);

/* Configuration (JSON; unknown keys are rejected). */
DTEK_API dtek_status dtek_config_new(dtek_config** out);
DTEK_API dtek_status dtek_config_from_json(const char* json_text, dtek_config** out);
DTEK_API dtek_status dtek_config_load(const char* path, dtek_config** out);
/* Applies an RFC 7386 merge patch and re-validates; the config is unchanged on error. */
DTEK_API dtek_status dtek_config_patch(dtek_config* cfg, const char* json_patch);
/* Fully resolved configuration as JSON text. */
DTEK_API dtek_status dtek_config_to_json(const dtek_config* cfg, char** out);
DTEK_API void dtek_config_free(dtek_config* cfg);

/* Channel matrices. `interleaved` holds rows*cols (re, im) pairs, row-major. */
DTEK_API dtek_status dtek_channel_synthesize(const dtek_config* cfg, dtek_channel** out);
DTEK_API dtek_status dtek_channel_from_data(uint32_t rows, uint32_t cols, const double* interleaved,
                                            double noise_variance, dtek_channel** out);
DTEK_API dtek_status dtek_channel_read(const char* path, dtek_channel** out);
DTEK_API dtek_status dtek_channel_write(const dtek_channel* ch, const char* path);
DTEK_API dtek_status dtek_channel_dims(const dtek_channel* ch, uint32_t* rows, uint32_t* cols);
DTEK_API dtek_status dtek_channel_noise_variance(const dtek_channel* ch, double* out);
DTEK_API dtek_status dtek_channel_copy_data(const dtek_channel* ch, double* interleaved, size_t count);
DTEK_API void dtek_channel_free(dtek_channel* ch);

/* Single-shot estimation with the configured method. */
DTEK_API dtek_status dtek_estimate_run(const dtek_config* cfg, const dtek_channel* ch, dtek_estimate** out);
DTEK_API dtek_status dtek_estimate_count(const dtek_estimate* est, size_t* out);
DTEK_API dtek_status dtek_estimate_path(const dtek_estimate* est, size_t index, double* gain_re, double* gain_im,
                                        double* theta_norm, double* tau_norm);
DTEK_API dtek_status dtek_estimate_runtime(const dtek_estimate* est, double* seconds);
/* Estimate plus seed and resolved configuration as JSON text. */
DTEK_API dtek_status dtek_estimate_to_json(const dtek_estimate* est, char** out);
DTEK_API void dtek_estimate_free(dtek_estimate* est);

/* Experiments. Output files are written atomically; manifest_path may be NULL. */
DTEK_API dtek_status dtek_sweep_run(const dtek_config* cfg, const char* csv_path, const char* manifest_path);
DTEK_API dtek_status dtek_runtime_table_run(const dtek_config* cfg, const char* csv_path,
                                            const char* manifest_path);

#ifdef __cplusplus
}
#endif

#endif /* DTEK_DTEK_H */
