#ifndef MULTIFIELD_H
#define MULTIFIELD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_ARGUMENT = 2,
  /*
   The inputs were valid but the quantity is undefined, e.g. a
   degenerate dressed basis or a g² with zero singles.
   */
  MF_STATUS_NUMERIC = 3,
  MF_STATUS_PANIC = 4,
} MfStatus;

typedef struct MfEmissionSet MfEmissionSet;

typedef struct MfEventStream MfEventStream;

typedef struct MfFilterStack MfFilterStack;

/*
 Level scheme and drive for [`mf_emission_compute`]. GHz and ns.
 */
typedef struct MfDriveInput {
  double splitting_31_ghz;
  double delta23_ghz;
  double gauge;
  double omega12_ghz;
  double omega23_ghz;
  double pulse_duration_ns;
  double d12;
  double d32;
} MfDriveInput;

/*
 Photon-pair source. Times in ns.
 */
typedef struct MfSourceParams {
  double mu;
  double eta_s;
  double eta_i;
  double noise_s;
  double noise_i;
  double purity;
  double cascade_lag_ns;
  double jitter_ns;
  double emission_window_ns;
  double record_start_ns;
  double record_stop_ns;
  uint32_t schmidt_modes;
} MfSourceParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null after a
 successful call. Valid until the next `mf_*` call on the same thread.
 */
const char *mf_last_error(void);

/*
 Cesium-like defaults at Δ₂₃ = 4 GHz with unit Rabi frequencies.
 */
enum MfStatus mf_drive_input_default(struct MfDriveInput *out);

/*
 Solves the dressed system and builds the seven emission components.
 `collection` points to 7 weights or is null for all ones.
 */
enum MfStatus mf_emission_compute(const struct MfDriveInput *input,
                                  const double *collection,
                                  struct MfEmissionSet **out);

/*
 Component `j` in 1..=7: offset from ω₀ in GHz, signed amplitude and
 collected intensity normalized to the strongest component. Any output
 pointer may be null.
 */
enum MfStatus mf_emission_component(const struct MfEmissionSet *set,
                                    uintptr_t j,
                                    double *offset_ghz,
                                    double *amplitude,
                                    double *intensity_norm);

void mf_emission_free(struct MfEmissionSet *set);

/*
 `n` identical cavities whose cascade has total FWHM `total_fwhm_mhz` and
 peak transmission `total_peak`. `fsr_ghz` = 0 means a single Lorentzian
 line without repeats.
 */
enum MfStatus mf_stack_calibrate(uintptr_t n,
                                 double total_fwhm_mhz,
                                 double total_peak,
                                 double fsr_ghz,
                                 double center_ghz,
                                 struct MfFilterStack **out);

enum MfStatus mf_stack_transmission(const struct MfFilterStack *stack,
                                    double freq_ghz,
                                    double *out);

/*
 FWHM of the whole cascade in MHz, measured on its transmission curve.
 */
enum MfStatus mf_stack_fwhm_mhz(const struct MfFilterStack *stack, double *out);

void mf_stack_free(struct MfFilterStack *stack);

enum MfStatus mf_source_params_default(struct MfSourceParams *out);

/*
 Runs `n_trials` trials. The result depends only on `params`, `n_trials`
 and `seed`, not on the thread count.
 */
enum MfStatus mf_simulate(const struct MfSourceParams *params,
                          uint64_t n_trials,
                          uint64_t seed,
                          struct MfEventStream **out);

enum MfStatus mf_events_len(const struct MfEventStream *events, uintptr_t *out);

/*
 Event `i`: trial index, channel (0 = signal, 1 = idler) and time in ns.
 */
enum MfStatus mf_events_get(const struct MfEventStream *events,
                            uintptr_t i,
                            uint64_t *trial,
                            uint8_t *channel,
                            double *time_ns);

/*
 Gated signal-idler cross-correlation with its first-order uncertainty.
 */
enum MfStatus mf_events_g2_cross(const struct MfEventStream *events,
                                 double gate_s_width_ns,
                                 double gate_s_delay_ns,
                                 double gate_i_width_ns,
                                 double gate_i_delay_ns,
                                 double *value,
                                 double *sigma);

void mf_events_free(struct MfEventStream *events);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULTIFIELD_H */
