#ifndef EMALG_EMALG_H
#define EMALG_EMALG_H

#include <stddef.h>
#include <stdint.h>

#if defined(EMALG_BUILDING)
#define EMALG_API __attribute__((visibility("default")))
#else
#define EMALG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  EMALG_OK = 0,
  EMALG_ERR_PARSE = 1,      /* see emalg_last_error_offset */
  EMALG_ERR_VALIDATION = 2, /* ill-formed expression, e.g. an index used three times */
  EMALG_ERR_RULE = 3,       /* a rewrite rule met an unsupported shape */
  EMALG_ERR_ORACLE = 4,     /* oracle precondition or refused input */
  EMALG_ERR_ARGUMENT = 5,   /* null handle, unknown enum value, bad JSON */
  EMALG_ERR_INTERNAL = 6
} emalg_status;

typedef enum { EMALG_PP = 0, EMALG_JP = 1, EMALG_JJ = 2, EMALG_ORDERING = 3 } emalg_derivation;
typedef enum { EMALG_MODE_DEFAULT = 0, EMALG_MODE_SYMBOLIC = 1, EMALG_MODE_CONCRETE = 2 } emalg_mode;
typedef enum { EMALG_PROVEN = 0, EMALG_RESIDUAL = 1, EMALG_DEFERRED = 2 } emalg_verdict;
typedef enum { EMALG_RECTANGLE = 0, EMALG_GAUSSIAN = 1 } emalg_family;

typedef struct {
  int div_e_zero;
  int div_b_zero;
} emalg_constraints;

typedef struct emalg_expr emalg_expr;
typedef struct emalg_report emalg_report;

/* Message of the last failing call on this thread; "" if none. */
EMALG_API const char* emalg_last_error(void);
/* Byte offset of the last parse error on this thread, or -1. */
EMALG_API long emalg_last_error_offset(void);

EMALG_API const char* emalg_version(void);
EMALG_API emalg_constraints emalg_default_constraints(void);

/* Strings returned through char** are owned by the caller. */
EMALG_API void emalg_string_free(char* s);

/* --- expressions --- */

/* Parses surface text. Commutators and named operators are simplified with the
   full rule pipeline when the expression is first needed in lowered form. */
EMALG_API emalg_status emalg_expr_parse(const char* text, emalg_expr** out);
EMALG_API void emalg_expr_free(emalg_expr* e);
/* Surface text of the parsed tree. */
EMALG_API emalg_status emalg_expr_print(const emalg_expr* e, char** out);
/* Canonical text; concrete != 0 expands summed indices first. */
EMALG_API emalg_status emalg_expr_canonical(const emalg_expr* e, const emalg_constraints* c, int concrete,
                                            char** out);
EMALG_API emalg_status emalg_expr_equal(const emalg_expr* a, const emalg_expr* b, const emalg_constraints* c,
                                        int* equal);
EMALG_API emalg_status emalg_expr_latex(const emalg_expr* e, char** out);

/* --- derivations --- */

EMALG_API emalg_status emalg_derive(emalg_derivation d, const emalg_constraints* c, emalg_mode mode,
                                    emalg_report** out);
EMALG_API void emalg_report_free(emalg_report* r);
EMALG_API emalg_verdict emalg_report_verdict(const emalg_report* r);
EMALG_API size_t emalg_report_run_count(const emalg_report* r);
/* Borrowed strings, valid until the report is freed. */
EMALG_API emalg_status emalg_report_run(const emalg_report* r, size_t run, const char** label,
                                        const char** final_text, emalg_verdict* verdict);
EMALG_API size_t emalg_report_step_count(const emalg_report* r, size_t run);
EMALG_API emalg_status emalg_report_step(const emalg_report* r, size_t run, size_t step, const char** rule,
                                         const char** anchor, const char** text, const char** note);
EMALG_API size_t emalg_report_milestone_count(const emalg_report* r, size_t run);
EMALG_API emalg_status emalg_report_milestone(const emalg_report* r, size_t run, size_t k, const char** label,
                                              int* matched, int* mandatory);
EMALG_API size_t emalg_report_assumption_count(const emalg_report* r);
EMALG_API const char* emalg_report_assumption(const emalg_report* r, size_t k);
EMALG_API emalg_status emalg_report_json(const emalg_report* r, char** out);
EMALG_API emalg_status emalg_report_latex(const emalg_report* r, char** out);

/* Replays a JSON trace document; EMALG_OK only if every step reproduces and the
   recomputed verdicts match the recorded ones. */
EMALG_API emalg_status emalg_trace_replay(const char* json, emalg_verdict* verdict, char** message);
EMALG_API emalg_status emalg_trace_latex(const char* json, char** out);

/* [J1,[J2,P3]] + cyclic with the inner brackets replaced by their closed forms. */
EMALG_API emalg_status emalg_jacobi_check(const emalg_constraints* c, int* zero, char** sum_text);

/* --- oracle --- */

EMALG_API emalg_status emalg_enumerate_identity(const emalg_expr* lhs, const emalg_expr* rhs, int* equal,
                                                char** message);
EMALG_API emalg_status emalg_oracle_flip(emalg_family f, double a, double extent, int points, double* max_error,
                                         double* off_edge_error, double* truncation);
/* Gaussian bumps f (centre 0.2, width 0.4) and g (centre -0.1, width 0.5). */
EMALG_API emalg_status emalg_oracle_ibp(emalg_family f, double a, double extent, int points, double* err1,
                                        double* err2, double* limit_error);
EMALG_API emalg_status emalg_oracle_ordering(emalg_family f, double a, double* axis_integral, double* transverse,
                                             double* transverse_expected);
EMALG_API emalg_status emalg_random_field_check(const emalg_expr* lhs, const emalg_expr* rhs, uint64_t seed,
                                                double* max_error);

#ifdef __cplusplus
}
#endif

#endif
