#ifndef OPCALC_H
#define OPCALC_H

#include <stddef.h>
#include <stdint.h>

#if defined(OPCALC_BUILDING)
#define OPC_API __attribute__((visibility("default")))
#else
#define OPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opc_status {
  OPC_OK = 0,
  OPC_ERR_INVALID_ARGUMENT = 1,
  OPC_ERR_DIMENSION_MISMATCH = 2,
  OPC_ERR_SPACE_MISMATCH = 3,
  OPC_ERR_NOT_SQUARE_INTEGRABLE = 4,
  OPC_ERR_PARSE = 5,
  OPC_ERR_VALIDATION = 6,
  OPC_ERR_CAPACITY = 7,
  OPC_ERR_INTERNAL = 99
} opc_status;

typedef struct opc_family opc_family;
typedef struct opc_quantizer opc_quantizer;
typedef struct opc_frame opc_frame;

typedef struct opc_family_info {
  int64_t hdim;
  int64_t points;
  double total_mass;
  double tolerance;
  int exact;
} opc_family_info;

typedef struct opc_run_options {
  int has_seed;
  uint64_t seed;
  int has_tol;
  double tol;
  int timings;
} opc_run_options;

/* Message of the last failed call on this thread; empty after success. */
OPC_API const char* opc_last_error(void);
OPC_API const char* opc_version(void);

/* Strings returned through char** are owned by the caller. */
OPC_API void opc_string_free(char* s);

OPC_API opc_status opc_family_from_json(const char* backend_json, opc_family** out);
OPC_API void opc_family_free(opc_family* fam);
OPC_API opc_status opc_family_info_get(const opc_family* fam, opc_family_info* out);
/* Writes the square-integrability report as JSON; pass tol <= 0 for the family default. */
OPC_API opc_status opc_family_verify_sq(const opc_family* fam, double tol, char** report_json);

OPC_API opc_status opc_quantizer_new(const opc_family* fam, opc_quantizer** out);
OPC_API void opc_quantizer_free(opc_quantizer* q);
OPC_API opc_status opc_quantizer_rank(const opc_quantizer* q, int64_t* rank);

/* Symbols are interleaved (re, im) arrays of 2*points doubles; operators are
   column-major interleaved arrays of 2*hdim*hdim doubles. */
OPC_API opc_status opc_quantize(const opc_quantizer* q, const double* symbol, double* op_out);
OPC_API opc_status opc_dequantize(const opc_quantizer* q, const double* op, double* symbol_out);
OPC_API opc_status opc_star(const opc_quantizer* q, const double* f, const double* g,
                            double* symbol_out);

/* fiducial: interleaved vector of 2*hdim doubles. */
OPC_API opc_status opc_frame_new(const opc_family* fam, const double* fiducial, opc_frame** out);
OPC_API void opc_frame_free(opc_frame* fr);
OPC_API opc_status opc_berezin(const opc_frame* fr, const double* symbol, double* op_out);

OPC_API opc_status opc_describe_json(const char* backend_json, char** out_json);

/* Runs a task configuration. Parse and validation problems are reported in
   the JSON and in exit_code, not in the returned status. */
OPC_API opc_status opc_run_json(const char* config_json, const opc_run_options* options,
                                char** report_json, int* exit_code);
OPC_API opc_status opc_render_table(const char* report_json, char** out_text);

#ifdef __cplusplus
}
#endif

#endif
