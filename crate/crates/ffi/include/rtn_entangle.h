#ifndef RTN_ENTANGLE_H
#define RTN_ENTANGLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RtnStatus {
  RTN_STATUS_OK = 0,
  RTN_STATUS_NULL_POINTER = 1,
  RTN_STATUS_DOMAIN = 2,
  RTN_STATUS_DEGENERATE_BRANCH = 3,
  RTN_STATUS_GRID = 4,
  RTN_STATUS_NON_PHYSICAL = 5,
  RTN_STATUS_RESOLUTION = 6,
  RTN_STATUS_BRACKET = 7,
  RTN_STATUS_INDEX_OUT_OF_RANGE = 8,
  RTN_STATUS_PANIC = 99,
} RtnStatus;

typedef enum RtnFamily {
  RTN_FAMILY_ONE_EXCITATION = 0,
  RTN_FAMILY_TWO_EXCITATION = 1,
} RtnFamily;

typedef struct RtnEvents RtnEvents;

/**
 * Initial state plus the two qubits' environments.
 */
typedef struct RtnModel RtnModel;

/**
 * Noise parameters of one qubit.
 */
typedef struct RtnQubit {
  double omega;
  double v;
  double gamma;
  double delta_p0;
} RtnQubit;

typedef struct RtnComplex {
  double re;
  double im;
} RtnComplex;

/**
 * Werner-like initial state; `family` must hold one of the `RtnFamily` values.
 */
typedef struct RtnState {
  enum RtnFamily family;
  double r;
  double a_mod;
} RtnState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length including the NUL, or
 * 0 if there is no message.
 */
size_t rtn_last_error_message(char *buf, size_t len);

/**
 * Single-qubit coherence `q(t)`.
 */
enum RtnStatus rtn_coherence(const struct RtnQubit *qubit, double t, struct RtnComplex *out);

/**
 * Concurrence of the initial Werner-like state.
 */
enum RtnStatus rtn_initial_concurrence(double r, double a_mod, double *out);

/**
 * Weak-coupling estimate of the sudden-death time (identical qubits, `δp0 = 0`).
 */
enum RtnStatus rtn_esd_time_analytic(double g, double r, double a_mod, double gamma, double *out);

/**
 * Revival threshold `g_th` searched on `[g_lo, g_hi]` to `tol`, with the
 * library's default horizon and step.
 */
enum RtnStatus rtn_find_g_threshold(double r,
                                    double a_mod,
                                    double delta_p0,
                                    double g_lo,
                                    double g_hi,
                                    double tol,
                                    double *out);

/**
 * Monte Carlo average of `e^{iφ(t)}` over `n_trajectories` noise histories.
 * `mean_out` and `std_err_out` must hold `n_times` entries; `std_err_out`
 * may be null.
 */
enum RtnStatus rtn_ensemble_coherence(const struct RtnQubit *qubit,
                                      size_t n_trajectories,
                                      uint64_t seed,
                                      const double *times,
                                      size_t n_times,
                                      struct RtnComplex *mean_out,
                                      double *std_err_out);

/**
 * Creates a model; `qubit_b` may be null for identical qubits.
 */
enum RtnStatus rtn_model_new(const struct RtnState *initial,
                             const struct RtnQubit *qubit_a,
                             const struct RtnQubit *qubit_b,
                             struct RtnModel **out);

void rtn_model_free(struct RtnModel *model);

/**
 * Concurrence at time `t`.
 */
enum RtnStatus rtn_model_concurrence(const struct RtnModel *model, double t, double *out);

/**
 * Concurrence on `n` increasing, non-negative times.
 */
enum RtnStatus rtn_model_series(const struct RtnModel *model,
                                const double *times,
                                size_t n,
                                double *out);

/**
 * Sudden death, dark intervals, revivals and final death up to `horizon`
 * (a non-positive horizon selects the default).
 */
enum RtnStatus rtn_model_events(const struct RtnModel *model,
                                double horizon,
                                struct RtnEvents **out);

void rtn_events_free(struct RtnEvents *events);

/**
 * First time with zero concurrence; `*found` is false if there is none.
 */
enum RtnStatus rtn_events_esd_time(const struct RtnEvents *events, bool *found, double *out);

/**
 * Start of the dark interval reaching the horizon; `*found` is false if the
 * state is entangled at the horizon.
 */
enum RtnStatus rtn_events_final_death_time(const struct RtnEvents *events,
                                           bool *found,
                                           double *out);

/**
 * Number of revivals; 0 for a null handle.
 */
size_t rtn_events_revival_count(const struct RtnEvents *events);

enum RtnStatus rtn_events_revival(const struct RtnEvents *events,
                                  size_t index,
                                  double *t_peak,
                                  double *amplitude);

/**
 * Number of dark intervals; 0 for a null handle.
 */
size_t rtn_events_dark_interval_count(const struct RtnEvents *events);

enum RtnStatus rtn_events_dark_interval(const struct RtnEvents *events,
                                        size_t index,
                                        double *start,
                                        double *end);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RTN_ENTANGLE_H */
