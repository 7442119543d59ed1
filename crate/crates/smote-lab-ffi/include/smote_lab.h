#ifndef SMOTE_LAB_H
#define SMOTE_LAB_H

/* Generated by cbindgen from the smote-lab-ffi crate. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// The call succeeded.
#define SMOTE_OK 0

// A required pointer was null or a buffer was too small.
#define SMOTE_ERR_ARGUMENT 1

// The library rejected the inputs; the message has the details.
#define SMOTE_ERR_COMPUTE 2

// The call panicked; treat the handle state as poisoned.
#define SMOTE_ERR_PANIC 3

// Uniform(a, b): `param0` = a, `param1` = b.
#define SMOTE_DIST_UNIFORM 0

// Gaussian(mean, std): `param0` = mean, `param1` = std.
#define SMOTE_DIST_GAUSSIAN 1

// Exponential(rate): `param0` = rate, `param1` ignored.
#define SMOTE_DIST_EXPONENTIAL 2

// Interpolate toward the neighbor of exactly the configured rank.
#define SMOTE_VARIANT_FIXED_RANK 0

// Draw the rank uniformly from {1, ..., configured rank} per draw.
#define SMOTE_VARIANT_RANDOM_FROM_POOL 1

// An immutable set of points, row major. Opaque to callers.
typedef struct SmoteSample SmoteSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message for the current thread's most recent failure, or an empty
// string after a success. The pointer stays valid until this thread's
// next call into the library.
const char *smote_last_error_message(void);

// Creates a sample of `len` points of dimension `dim` from a row-major
// array of `len * dim` finite values. Returns null on failure (empty
// data, zero dimension, non-finite coordinates, null pointer).
struct SmoteSample *smote_sample_new(const double *values, size_t len, size_t dim);

// Releases a sample. Null is accepted and ignored.
void smote_sample_free(struct SmoteSample *sample);

// Number of points, or 0 for a null handle.
size_t smote_sample_len(const struct SmoteSample *sample);

// Dimension per point, or 0 for a null handle.
size_t smote_sample_dim(const struct SmoteSample *sample);

// Copies the sample's values row major into `out`. `capacity` is the
// number of doubles the buffer holds; it must be at least len * dim.
int smote_sample_copy_values(const struct SmoteSample *sample, double *out, size_t capacity);

// Generates `count` synthetic points by seeded neighbor interpolation.
//
// `rank` is the neighbor rank (fixed-rank variant) or the pool size
// (random-from-pool variant); it must satisfy `1 <= rank < len`. The
// result is a pure function of (base, rank, variant, seed, count) and
// is identical at any thread count. Returns null on failure.
struct SmoteSample *smote_generate_batch(const struct SmoteSample *base,
                                         size_t rank,
                                         int variant,
                                         uint64_t seed,
                                         size_t count);

// Two-sample Kolmogorov-Smirnov distance between 1-D samples.
int smote_ks_two_sample(const struct SmoteSample *a,
                        const struct SmoteSample *b,
                        double *out_value);

// One-sample Kolmogorov-Smirnov distance against an analytic
// distribution chosen by `kind` (see the SMOTE_DIST constants).
int smote_ks_one_sample(const struct SmoteSample *sample,
                        int kind,
                        double param0,
                        double param1,
                        double *out_value);

// First Wasserstein distance between 1-D samples.
int smote_wasserstein1(const struct SmoteSample *a, const struct SmoteSample *b, double *out_value);

// Histogram KL divergence of a 1-D sample from an analytic reference,
// on `n_bins` shared equal-width bins (at least 2).
int smote_kl_histogram(const struct SmoteSample *sample,
                       int kind,
                       double param0,
                       double param1,
                       size_t n_bins,
                       double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMOTE_LAB_H */
