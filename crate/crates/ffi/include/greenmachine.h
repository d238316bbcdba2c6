/* C interface to the greenmachine receiver simulator. */

#ifndef GREENMACHINE_H
#define GREENMACHINE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call; zero means success.
 */
typedef enum GmStatus {
  GM_STATUS_OK = 0,
  GM_STATUS_NULL_ARGUMENT = 1,
  GM_STATUS_INVALID_ARGUMENT = 2,
  GM_STATUS_DOMAIN_ERROR = 3,
  GM_STATUS_DECODE_FAILURE = 4,
  GM_STATUS_NO_SIGNAL = 5,
  GM_STATUS_MODE_ERROR = 6,
  GM_STATUS_NO_TURN_ON = 7,
  GM_STATUS_CALIBRATION_ERROR = 8,
  GM_STATUS_CONFIG_ERROR = 9,
  GM_STATUS_IO_ERROR = 10,
  GM_STATUS_INTERNAL_ERROR = 11,
  GM_STATUS_PANIC = 12,
} GmStatus;

/**
 * AND-gate delay aggregation selector for FFI calls.
 */
typedef enum GmDelayPolicy {
  /**
   * Sum of per-stage worst-case switching delays.
   */
  GM_DELAY_POLICY_STAGE_WORST_SUM = 0,
  /**
   * Use the `fixed_delay_s` argument as the aggregate delay.
   */
  GM_DELAY_POLICY_FIXED_DELAY = 1,
} GmDelayPolicy;

/**
 * Opaque device datasheet handle.
 */
typedef struct GmDatasheet GmDatasheet;

/**
 * Opaque butterfly plan handle.
 */
typedef struct GmPlan GmPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gm_version(void);

/**
 * Static name of a status code.
 */
const char *gm_status_name(enum GmStatus status);

/**
 * Copies the calling thread's last error message (NUL-terminated) into
 * `buffer` and returns the full message length including the terminator.
 * Call with a null buffer to query the required capacity.
 *
 * # Safety
 * `buffer` must point to at least `capacity` writable bytes, or be null.
 */
size_t gm_last_error_message(char *buffer, size_t capacity);

/**
 * Builds the butterfly plan for `order` stages.
 *
 * # Safety
 * `out_plan` must be a valid pointer.
 */
enum GmStatus gm_plan_new(uint32_t order, struct GmPlan **out_plan);

/**
 * Releases a plan handle. Null is ignored.
 *
 * # Safety
 * `plan` must have come from [`gm_plan_new`] and not be freed twice.
 */
void gm_plan_free(struct GmPlan *plan);

/**
 * # Safety
 * `plan` must be a live handle.
 */
uint32_t gm_plan_order(const struct GmPlan *plan);

/**
 * # Safety
 * `plan` must be a live handle.
 */
uint64_t gm_plan_modes(const struct GmPlan *plan);

/**
 * # Safety
 * `plan` must be a live handle.
 */
uint32_t gm_plan_depth(const struct GmPlan *plan);

/**
 * Number of couplers for an order-`order` network: `n · 2^(n-1)`.
 *
 * # Safety
 * `out_count` must be a valid pointer.
 */
enum GmStatus gm_beamsplitter_count(uint32_t order, uint64_t *out_count);

/**
 * Transistor cost of the electronic receiver at this order.
 *
 * # Safety
 * `out_count` must be a valid pointer.
 */
enum GmStatus gm_transistor_count(uint32_t order, uint64_t *out_count);

/**
 * Copies stage `stage` of the plan as interleaved `lo,hi` mode indices.
 * `capacity` counts u32 slots; the pair count times two is written through
 * `out_written`.
 *
 * # Safety
 * `out_pairs` must hold `capacity` u32 slots; `out_written` must be valid.
 */
enum GmStatus gm_plan_stage_pairs(const struct GmPlan *plan,
                                  uint32_t stage,
                                  uint32_t *out_pairs,
                                  size_t capacity,
                                  size_t *out_written);

/**
 * In-place unnormalized fast Walsh-Hadamard transform of `data`.
 *
 * # Safety
 * `data` must point to `len` f64 values.
 */
enum GmStatus gm_fwht(double *data, size_t len);

/**
 * Hadamard matrix entry `(-1)^(j·k)` as ±1.
 *
 * # Safety
 * `out_sign` must be a valid pointer.
 */
enum GmStatus gm_hadamard_entry(uint64_t j, uint64_t k, uint32_t order, int32_t *out_sign);

/**
 * Propagates `len` complex amplitudes (split into `re`/`im` arrays) through
 * every stage of the plan, in place.
 *
 * # Safety
 * `re` and `im` must each point to `len` f64 values.
 */
enum GmStatus gm_optical_propagate(const struct GmPlan *plan,
                                   double *re,
                                   double *im,
                                   size_t len,
                                   double transmittance,
                                   double reflectance,
                                   double phase,
                                   bool phase_correction);

/**
 * Picks the dominant output mode and its energy share.
 *
 * # Safety
 * `re` and `im` must each point to `len` values; outputs must be valid.
 */
enum GmStatus gm_optical_decode(const double *re,
                                const double *im,
                                size_t len,
                                uint64_t *out_index,
                                double *out_share);

/**
 * Optical decoding latency for a chip with the given beamsplitter length
 * and refractive index.
 *
 * # Safety
 * `out_seconds` must be a valid pointer.
 */
enum GmStatus gm_optical_latency_s(const struct GmPlan *plan,
                                   double bs_traversal_length_m,
                                   double refractive_index,
                                   double *out_seconds);

/**
 * Runtime power of the passive optical network (always 0 W).
 */
double gm_optical_runtime_power_w(void);

/**
 * Whether the zero-power figure excludes the one-off tuning step (it does).
 */
bool gm_optical_tuning_power_excluded(void);

/**
 * Encodes message `j` as digital symbols (0 vacuum, 1 plus, 2 minus).
 *
 * # Safety
 * `out_symbols` must hold `capacity` bytes; `out_written` must be valid.
 */
enum GmStatus gm_digital_encode(uint64_t j,
                                uint32_t order,
                                bool invert,
                                uint8_t *out_symbols,
                                size_t capacity,
                                size_t *out_written);

/**
 * Propagates `len` digital symbols through every stage of the plan, in place.
 *
 * # Safety
 * `symbols` must point to `len` bytes valued 0, 1, or 2.
 */
enum GmStatus gm_digital_propagate(const struct GmPlan *plan, uint8_t *symbols, size_t len);

/**
 * Reads the decoded index and polarity (+1/-1) off a digital output word.
 *
 * # Safety
 * `symbols` must point to `len` bytes; outputs must be valid.
 */
enum GmStatus gm_digital_decode(const uint8_t *symbols,
                                size_t len,
                                uint64_t *out_index,
                                int8_t *out_polarity);

/**
 * Electronic decoding latency: depth times the AND-gate delay.
 *
 * # Safety
 * `out_seconds` must be a valid pointer.
 */
enum GmStatus gm_electronic_latency_s(const struct GmPlan *plan,
                                      double and_delay_s,
                                      double *out_seconds);

/**
 * Loads a bundled device preset, calibrated for gate voltage `v_gs`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out_datasheet` must be valid.
 */
enum GmStatus gm_datasheet_preset(const char *name,
                                  double v_gs,
                                  struct GmDatasheet **out_datasheet);

/**
 * Parses a JSON datasheet (capacitances in picofarads).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_datasheet` must be valid.
 */
enum GmStatus gm_datasheet_from_json(const char *json, struct GmDatasheet **out_datasheet);

/**
 * Releases a datasheet handle. Null is ignored.
 *
 * # Safety
 * `datasheet` must have come from this library and not be freed twice.
 */
void gm_datasheet_free(struct GmDatasheet *datasheet);

/**
 * Turn-on delay at the given drive.
 *
 * # Safety
 * `datasheet` must be a live handle; `out_seconds` must be valid.
 */
enum GmStatus gm_turn_on_delay_s(const struct GmDatasheet *datasheet,
                                 double r_gext_ohm,
                                 double v_gs,
                                 double *out_seconds);

/**
 * Turn-off delay at the given drive.
 *
 * # Safety
 * `datasheet` must be a live handle; `out_seconds` must be valid.
 */
enum GmStatus gm_turn_off_delay_s(const struct GmDatasheet *datasheet,
                                  double r_gext_ohm,
                                  double v_gs,
                                  double *out_seconds);

/**
 * Dissipated power `I_d · V_DS` at a bias point (zero in cutoff).
 *
 * # Safety
 * `datasheet` must be a live handle; `out_watts` must be valid.
 */
enum GmStatus gm_mosfet_power_w(const struct GmDatasheet *datasheet,
                                double v_gs,
                                double v_ds,
                                double *out_watts);

/**
 * Closed-form triode dissipation integral between `v_off` and `v_ds`.
 *
 * # Safety
 * `datasheet` must be a live handle; `out_watts` must be valid.
 */
enum GmStatus gm_dissipation_integral_w(const struct GmDatasheet *datasheet,
                                        double v_gs,
                                        double v_ds,
                                        double v_off,
                                        double *out_watts);

/**
 * Aggregated AND-gate (NAND + inverter) delay under the chosen policy.
 *
 * # Safety
 * Both datasheets must be live handles; `out_seconds` must be valid.
 */
enum GmStatus gm_and_gate_delay_s(const struct GmDatasheet *nmos,
                                  const struct GmDatasheet *pmos,
                                  double r_gext_ohm,
                                  double v_gs,
                                  enum GmDelayPolicy policy,
                                  double fixed_delay_s,
                                  double *out_seconds);

/**
 * Runs the full comparison with bundled presets and returns the JSON report
 * as a heap string; release it with [`gm_string_free`]. A non-positive
 * `stage_delay_ps` means "derive the per-stage delay from the default chip
 * geometry".
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum GmStatus gm_compare_report_json(uint32_t order,
                                     double v_gs,
                                     double r_gext_ohm,
                                     enum GmDelayPolicy policy,
                                     double fixed_delay_s,
                                     double stage_delay_ps,
                                     char **out_json);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `text` must have come from this library and not be freed twice.
 */
void gm_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREENMACHINE_H */
