/* C interface of the crossing-experiment library.
 *
 * A run takes a command name and a flat key=value configuration and returns
 * an opaque result holding named text artifacts (CSV / JSON). The status code
 * doubles as the process exit code convention:
 *   0 ok, 2 usage error, 3 resource limit, 4 numerical failure.
 * Results must be released with lfpp_result_free. All functions are
 * null-safe; accessors on a null or out-of-range input return 0 / NULL.
 */

#ifndef LFPP_H
#define LFPP_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lfpp_result lfpp_result;

/* Commands: "kernels", "gff", "fpp-scan", "tv", "multiscale". keys/values
 * are parallel arrays of n_pairs entries. Always sets *out (when out is
 * non-null) to a result carrying either artifacts or an error message, and
 * returns the status. */
int lfpp_run(const char* command, const char* const* keys,
             const char* const* values, int n_pairs, lfpp_result** out);

int lfpp_result_status(const lfpp_result* res);

/* empty string when the run succeeded */
const char* lfpp_result_error(const lfpp_result* res);

int lfpp_result_count(const lfpp_result* res);
const char* lfpp_result_name(const lfpp_result* res, int index);
const char* lfpp_result_data(const lfpp_result* res, int index);

void lfpp_result_free(lfpp_result* res);

const char* lfpp_version(void);

#ifdef __cplusplus
}
#endif

#endif /* LFPP_H */
