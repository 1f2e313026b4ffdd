/* C interface to the cemkit capacity-expansion modeling library.
 *
 * All functions return a cemkit_status; on failure cemkit_last_error() holds
 * a thread-local message describing what went wrong. Handles are opaque and
 * freed with their matching _free call.
 */
#ifndef CEMKIT_H
#define CEMKIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CEMKIT_OK = 0,
  CEMKIT_ERROR = 1,            /* schema violation, solve failure, I/O error */
  CEMKIT_MISMATCH = 2,         /* comparison across different scenarios */
  CEMKIT_INVALID_ARGUMENT = 3
} cemkit_status;

typedef struct cemkit_system cemkit_system;

const char* cemkit_version(void);
/* Message for the most recent failing call on this thread. */
const char* cemkit_last_error(void);

/* Loads and fully validates a canonical system directory. */
cemkit_status cemkit_system_load(const char* directory, cemkit_system** out);
void cemkit_system_free(cemkit_system* system);
int cemkit_system_zone_count(const cemkit_system* system);
int cemkit_system_cluster_count(const cemkit_system* system);
int cemkit_system_hour_count(const cemkit_system* system);

/* Validates a system directory. Returns CEMKIT_OK if clean; otherwise the
 * findings (newline separated) are copied into `report` when non-NULL. */
cemkit_status cemkit_validate(const char* directory, char* report, size_t report_len);

/* Capacity-expansion run: myopic or foresight per the configuration file.
 * backend may be NULL/empty (CEMKIT_BACKEND environment variable or the
 * built-in barrier method). Writes a results directory. */
cemkit_status cemkit_plan(const char* system_dir, const char* scenario_path,
                          const char* config_path, const char* backend, int workers,
                          const char* out_dir);

/* 52-week frozen-capacity operational simulation of a stored plan. */
cemkit_status cemkit_simulate(const char* system_dir, const char* scenario_path,
                              const char* plan_dir, const char* backend, int workers,
                              const char* out_dir);

/* Cross-run comparison and harmonization check. *pass_out is set to 1 when
 * every pairwise NPV delta is within tolerance. Returns CEMKIT_MISMATCH when
 * the runs belong to different scenarios. */
cemkit_status cemkit_compare(const char* const* run_dirs, size_t run_count,
                             double tolerance, const char* out_dir, int* pass_out);

/* Writes the bundled demonstration kit (system/, scenarios/, configs/). */
cemkit_status cemkit_write_demo_kit(const char* directory);

#ifdef __cplusplus
}
#endif

#endif /* CEMKIT_H */
